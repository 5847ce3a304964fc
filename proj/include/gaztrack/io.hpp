// Copyright 2026 The gaztrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZTRACK_IO_HPP
#define GAZTRACK_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace gaztrack {

/// Whole file as bytes. Throws Error(kIo).
std::string read_file(std::filesystem::path const& path);

/// Writes `bytes` to a sibling temporary file, flushes it to disk and
/// renames it over `path`. Readers see either the old or the new content.
void write_file_atomic(std::filesystem::path const& path, std::string_view bytes);

}  // namespace gaztrack

#endif  // GAZTRACK_IO_HPP

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


#ifndef GAZTRACK_SUGGEST_HPP
#define GAZTRACK_SUGGEST_HPP

#include "gaztrack/store.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

// Rule-refinement hints mined from reviewer feedback. Suggestions are
// advisory; nothing here edits a rule set.
namespace gaztrack {

enum class SuggestionDirection { kAddInclude, kAddExclude };

std::string_view name(SuggestionDirection d);

struct RefinementSuggestion {
  std::string theme_name;
  std::string candidate_token;
  double score = 0;  // smoothed log-odds ratio, always > 0
  SuggestionDirection direction = SuggestionDirection::kAddInclude;
  std::size_t evidence_count = 0;  // disagreement documents containing the token

  friend bool operator==(RefinementSuggestion const&, RefinementSuggestion const&) = default;
};

nlohmann::json to_json(RefinementSuggestion const& s);

/// Per theme, a closed item (reviewed or discarded) is
///   agreement  when the robot matched the theme and the reviewer kept it,
///   missed     when the reviewer added a theme the robot did not match,
///   captured   when the robot matched a theme the reviewer dropped
///              (a discarded item drops all of its themes).
/// Tokens are scored by
///   logit((df_dis + 1) / (n_dis + 2)) - logit((df_agr + 1) / (n_agr + 2))
/// over document frequencies in the item's match text; missed documents
/// feed add_include, captured documents feed add_exclude. Only positive
/// scores are kept, at most top_n per (theme, direction), ordered by theme,
/// direction, score desc, evidence desc, token.
///
/// Throws InsufficientFeedback when no closed item disagrees with the robot
/// or none agrees, and InvalidArgument when top_n < 1.
std::vector<RefinementSuggestion> suggest_refinements(std::span<ReviewItem const> items,
                                                      std::size_t top_n);
std::vector<RefinementSuggestion> suggest_refinements(Store const& store, std::size_t top_n);

}  // namespace gaztrack

#endif  // GAZTRACK_SUGGEST_HPP

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

#ifndef GAZTRACK_RULES_HPP
#define GAZTRACK_RULES_HPP

#include "gaztrack/document.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Theme rules: boolean phrase expressions deciding whether a document
// belongs to a theme.
//
//   ruleset := theme*
//   theme   := "theme" STRING "{" "include:" expr ("exclude:" expr)? "}"
//   expr    := and ("OR" and)*
//   and     := not ("AND" not)*
//   not     := "NOT" not | "(" expr ")" | STRING
//
// Strings are double-quoted with \" and \\ escapes. `#` starts a comment
// that runs to the end of the line. Operators are upper case.
namespace gaztrack {

class RuleExpr;
using RuleExprPtr = std::shared_ptr<RuleExpr const>;

/// Matches a run of consecutive document words equal to `words`.
struct Phrase {
  std::string text;                // as written, normalized
  std::vector<std::string> words;  // folded words of `text`, never empty
};
struct And { RuleExprPtr left, right; };
struct Or { RuleExprPtr left, right; };
struct Not { RuleExprPtr inner; };

/// Immutable expression node; trees share subexpressions freely.
class RuleExpr {
 public:
  using Node = std::variant<Phrase, And, Or, Not>;

  explicit RuleExpr(Node node) : node_(std::move(node)) {}
  Node const& node() const { return node_; }

 private:
  Node node_;
};

/// Throws SyntaxError if `text` contains no letters or digits.
RuleExprPtr make_phrase(std::string_view text);
RuleExprPtr make_and(RuleExprPtr left, RuleExprPtr right);
RuleExprPtr make_or(RuleExprPtr left, RuleExprPtr right);
RuleExprPtr make_not(RuleExprPtr inner);

/// Structural equality; phrases compare by folded words.
bool same_expr(RuleExpr const& a, RuleExpr const& b);

/// Minimal-parenthesis rendering in rule-file syntax.
std::string to_source(RuleExpr const& expr);

struct ThemeRule {
  std::string theme_name;
  RuleExprPtr include;
  RuleExprPtr exclude;  // may be null
};

struct RuleSet {
  std::vector<ThemeRule> rules;
  /// Content hash of the canonical rendering, "fnv1a64:<hex>".
  std::string version;

  ThemeRule const* find(std::string_view theme_name) const;
};

/// Throws SyntaxError {line, column, expected, found} and
/// DuplicateTheme {name}. An empty rule file is a syntax error.
RuleSet parse_rules(std::string_view source);
RuleSet load_rules(std::filesystem::path const& path);

/// Canonical rule-file text; parse_rules(to_source(rs)) reproduces `rs`.
std::string to_source(RuleSet const& rules);

bool same_rules(RuleSet const& a, RuleSet const& b);

/// Folded word sequence of a document; build once, match many rules.
class DocWords {
 public:
  explicit DocWords(std::string_view text);
  /// Already folded words, e.g. from unicode::fold_words_with_offsets.
  explicit DocWords(std::vector<std::string> words) : words_(std::move(words)) {}
  bool contains(std::vector<std::string> const& phrase) const;
  std::vector<std::string> const& words() const { return words_; }

 private:
  std::vector<std::string> words_;
};

bool evaluate(RuleExpr const& expr, DocWords const& doc);
bool match_theme(ThemeRule const& rule, DocWords const& doc);
bool match_theme(ThemeRule const& rule, NormalizedText const& doc_text);

/// Names of every matching theme in rule-set order.
std::vector<std::string> pre_classify(RuleSet const& rules, RawDocument const& doc);

/// Word ranges [begin, end) in `doc` matched by include phrases of `rule`,
/// for highlighting.
std::vector<std::pair<std::size_t, std::size_t>> include_spans(ThemeRule const& rule,
                                                               DocWords const& doc);

/// Built-in five-theme rule set for demos and first runs.
std::string_view demo_rules_source();

}  // namespace gaztrack

#endif  // GAZTRACK_RULES_HPP

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


#include "gaztrack/suggest.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gaztrack {
namespace {

using TokenSet = std::set<std::string>;

struct ThemeEvidence {
  std::vector<TokenSet const*> agreed, missed, captured;
};

double logit(double p) { return std::log(p) - std::log1p(-p); }

std::map<std::string, std::size_t> document_frequency(std::vector<TokenSet const*> const& docs) {
  std::map<std::string, std::size_t> df;
  for (auto const* doc : docs) {
    for (auto const& t : *doc) ++df[t];
  }
  return df;
}

void rank(std::string const& theme, SuggestionDirection direction,
          std::vector<TokenSet const*> const& disagreement,
          std::vector<TokenSet const*> const& agreement, std::size_t top_n,
          std::vector<RefinementSuggestion>& out) {
  if (disagreement.empty()) return;
  auto const df_dis = document_frequency(disagreement);
  auto const df_agr = document_frequency(agreement);
  auto const n_dis = static_cast<double>(disagreement.size());
  auto const n_agr = static_cast<double>(agreement.size());

  std::vector<RefinementSuggestion> ranked;
  for (auto const& [token, count] : df_dis) {
    auto it = df_agr.find(token);
    double const agr = it == df_agr.end() ? 0.0 : static_cast<double>(it->second);
    double const score = logit((static_cast<double>(count) + 1) / (n_dis + 2)) -
                         logit((agr + 1) / (n_agr + 2));
    if (score > 0) ranked.push_back({theme, token, score, direction, count});
  }
  std::sort(ranked.begin(), ranked.end(), [](auto const& a, auto const& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.evidence_count != b.evidence_count) return a.evidence_count > b.evidence_count;
    return a.candidate_token < b.candidate_token;
  });
  if (ranked.size() > top_n) ranked.resize(top_n);
  out.insert(out.end(), ranked.begin(), ranked.end());
}

bool contains(std::vector<std::string> const& v, std::string const& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

std::string_view name(SuggestionDirection d) {
  return d == SuggestionDirection::kAddInclude ? "add_include" : "add_exclude";
}

nlohmann::json to_json(RefinementSuggestion const& s) {
  return {{"theme_name", s.theme_name},
          {"candidate_token", s.candidate_token},
          {"score", s.score},
          {"direction", name(s.direction)},
          {"evidence_count", s.evidence_count}};
}

std::vector<RefinementSuggestion> suggest_refinements(std::span<ReviewItem const> items,
                                                      std::size_t top_n) {
  if (top_n < 1) throw Error(ErrorCode::kInvalidArgument, "top_n must be at least 1");

  std::vector<ReviewItem const*> closed;
  for (auto const& item : items) {
    if (item.status != ReviewStatus::kPending) closed.push_back(&item);
  }
  // Deterministic regardless of input order.
  std::sort(closed.begin(), closed.end(),
            [](auto const* a, auto const* b) { return a->item_id < b->item_id; });

  std::vector<TokenSet> tokens;
  tokens.reserve(closed.size());
  for (auto const* item : closed) {
    auto list = tokenize(normalize(item->doc.match_text()));
    tokens.emplace_back(list.begin(), list.end());
  }

  std::map<std::string, ThemeEvidence> by_theme;
  std::size_t agreements = 0, disagreements = 0;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    auto const& item = *closed[i];
    static std::vector<std::string> const kNone;
    auto const& expert = item.status == ReviewStatus::kReviewed && item.annotation
                             ? item.annotation->themes
                             : kNone;
    std::set<std::string> themes(item.matched_themes.begin(), item.matched_themes.end());
    themes.insert(expert.begin(), expert.end());
    for (auto const& theme : themes) {
      bool const robot = contains(item.matched_themes, theme);
      bool const human = contains(expert, theme);
      auto& ev = by_theme[theme];
      if (robot && human) {
        ev.agreed.push_back(&tokens[i]);
        ++agreements;
      } else if (human) {
        ev.missed.push_back(&tokens[i]);
        ++disagreements;
      } else {
        ev.captured.push_back(&tokens[i]);
        ++disagreements;
      }
    }
  }
  if (disagreements == 0 || agreements == 0) {
    throw Error(ErrorCode::kInsufficientFeedback,
                "suggestions need at least one reviewed item agreeing with the rules and one "
                "disagreeing",
                {{"agreements", agreements}, {"disagreements", disagreements}});
  }

  std::vector<RefinementSuggestion> out;
  for (auto const& [theme, ev] : by_theme) {
    rank(theme, SuggestionDirection::kAddInclude, ev.missed, ev.agreed, top_n, out);
    rank(theme, SuggestionDirection::kAddExclude, ev.captured, ev.agreed, top_n, out);
  }
  return out;
}

std::vector<RefinementSuggestion> suggest_refinements(Store const& store, std::size_t top_n) {
  auto const items = store.items();
  return suggest_refinements(items, top_n);
}

}  // namespace gaztrack

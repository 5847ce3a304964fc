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


// Independent reference implementations used as test oracles. They share
// no code with the library beyond Unicode folding and plain data types.

#ifndef GAZTRACK_TESTS_ORACLES_HPP
#define GAZTRACK_TESTS_ORACLES_HPP

#include "gaztrack/rules.hpp"
#include "gaztrack/unicode.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<std::uint64_t>>;

/// The matrix as a list of (truth, predicted) samples.
inline std::vector<std::pair<std::size_t, std::size_t>> expand(Matrix const& cm) {
  std::vector<std::pair<std::size_t, std::size_t>> samples;
  for (std::size_t t = 0; t < cm.size(); ++t) {
    for (std::size_t p = 0; p < cm.size(); ++p) {
      for (std::uint64_t i = 0; i < cm[t][p]; ++i) samples.emplace_back(t, p);
    }
  }
  return samples;
}

inline double accuracy(Matrix const& cm) {
  auto s = expand(cm);
  std::size_t hits = 0;
  for (auto [t, p] : s) hits += t == p;
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

/// Support-weighted mean of per-class F1; a class with zero precision and
/// recall contributes 0.
inline double weighted_f1(Matrix const& cm) {
  auto s = expand(cm);
  double total = 0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (auto [t, p] : s) {
      if (t == c) ++support;
      if (t == c && p == c) ++tp;
      if (t != c && p == c) ++fp;
      if (t == c && p != c) ++fn;
    }
    double precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    double recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    total += f1 * support;
  }
  return total / static_cast<double>(s.size());
}

/// Multiclass MCC as the correlation of one-hot truth and prediction
/// vectors: cov(Y, P) / sqrt(cov(Y, Y) cov(P, P)), 0 if degenerate.
inline double mcc(Matrix const& cm) {
  auto s = expand(cm);
  auto const k = cm.size();
  double const n = static_cast<double>(s.size());
  std::vector<double> mean_t(k, 0), mean_p(k, 0);
  for (auto [t, p] : s) {
    mean_t[t] += 1 / n;
    mean_p[p] += 1 / n;
  }
  double cov_tp = 0, cov_tt = 0, cov_pp = 0;
  for (auto [t, p] : s) {
    for (std::size_t c = 0; c < k; ++c) {
      double yt = (t == c) - mean_t[c];
      double yp = (p == c) - mean_p[c];
      cov_tp += yt * yp;
      cov_tt += yt * yt;
      cov_pp += yp * yp;
    }
  }
  if (cov_tt <= 0 || cov_pp <= 0) return 0;
  return cov_tp / std::sqrt(cov_tt * cov_pp);
}

/// Classical binary MCC with class 0 as positive.
inline double binary_mcc(Matrix const& cm) {
  double tp = static_cast<double>(cm[0][0]), fn = static_cast<double>(cm[0][1]);
  double fp = static_cast<double>(cm[1][0]), tn = static_cast<double>(cm[1][1]);
  double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0) return 0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t k, std::uint64_t max_cell) {
  std::uniform_int_distribution<std::uint64_t> cell(0, max_cell);
  Matrix cm(k, std::vector<std::uint64_t>(k));
  std::uint64_t total = 0;
  for (auto& row : cm) {
    for (auto& x : row) total += x = cell(rng);
  }
  if (total == 0) cm[0][0] = 1;
  return cm;
}

// ------------------------------------------------------------------ rules

/// " w1 w2 ... wn " over folded words, for substring phrase search.
inline std::string padded_words(std::string_view text) {
  std::string out = " ";
  for (auto const& w : gaztrack::unicode::fold_words(text)) out += w + " ";
  return out;
}

/// Recursive evaluation by padded substring search.
inline bool eval_rule(gaztrack::RuleExpr const& e, std::string const& padded_doc) {
  using namespace gaztrack;
  if (auto const* p = std::get_if<Phrase>(&e.node())) {
    auto needle = padded_words(p->text);
    return needle.size() > 2 && padded_doc.find(needle) != std::string::npos;
  }
  if (auto const* a = std::get_if<And>(&e.node())) {
    return eval_rule(*a->left, padded_doc) && eval_rule(*a->right, padded_doc);
  }
  if (auto const* o = std::get_if<Or>(&e.node())) {
    return eval_rule(*o->left, padded_doc) || eval_rule(*o->right, padded_doc);
  }
  return !eval_rule(*std::get<Not>(e.node()).inner, padded_doc);
}

inline bool theme_matches(gaztrack::ThemeRule const& rule, std::string_view text) {
  auto doc = padded_words(text);
  return eval_rule(*rule.include, doc) && !(rule.exclude && eval_rule(*rule.exclude, doc));
}

// ------------------------------------------------------------- naive Bayes

using boost::multiprecision::cpp_int;

/// Exact rational a / b.
struct Rational {
  cpp_int num, den;
};

/// Unsmoothed-form product score
///   (n_c / n) * prod_t ((count_ct + alpha) / (total_c + alpha V))^x_t
/// for a rational alpha = alpha_num / alpha_den, in exact arithmetic.
/// docs: (class, dense counts). Returns the argmax class; exact ties go to
/// the larger class size, then the smaller class id.
inline int nb_argmax(std::vector<std::pair<int, std::vector<unsigned>>> const& docs,
                     std::vector<unsigned> const& x, unsigned alpha_num, unsigned alpha_den) {
  std::map<int, std::vector<cpp_int>> counts;
  std::map<int, cpp_int> totals, sizes;
  auto const v = x.size();
  for (auto const& [c, d] : docs) {
    auto& row = counts[c];
    row.resize(v);
    for (std::size_t t = 0; t < v; ++t) {
      row[t] += d[t];
      totals[c] += d[t];
    }
    sizes[c] += 1;
  }
  cpp_int const n = docs.size();
  int best = -1;
  Rational best_score;
  for (auto const& [c, row] : counts) {
    // (count + a/b) / (total + a V / b) = (b count + a) / (b total + a V)
    Rational s{sizes[c], n};
    for (std::size_t t = 0; t < v; ++t) {
      for (unsigned i = 0; i < x[t]; ++i) {
        s.num *= alpha_den * row[t] + alpha_num;
        s.den *= alpha_den * totals[c] + cpp_int(alpha_num) * v;
      }
    }
    if (best < 0) {
      best = c;
      best_score = s;
      continue;
    }
    auto lhs = s.num * best_score.den;
    auto rhs = best_score.num * s.den;
    if (lhs > rhs || (lhs == rhs && sizes[c] > sizes[best])) {
      best = c;
      best_score = s;
    }
  }
  return best;
}


/// Rewrites `text` with random case flips, added or removed accents, and
/// decomposed marks. Folding makes the result equivalent to the input.
inline std::string mutate_accents_and_case(std::mt19937_64& rng, std::string_view text) {
  // Precomposed lowercase/uppercase variants per base letter.
  static std::map<char, std::vector<std::string>> const kVariants = {
      {'a', {"á", "à", "â", "ã", "Á", "À", "Â", "Ã", "A"}},
      {'e', {"é", "ê", "É", "Ê", "E"}},
      {'i', {"í", "Í", "I"}},
      {'o', {"ó", "ô", "õ", "Ó", "Ô", "Õ", "O"}},
      {'u', {"ú", "ü", "Ú", "Ü", "U"}},
      {'c', {"ç", "Ç", "C"}},
      {'n', {"ñ", "Ñ", "N"}},
  };
  static std::map<std::string, char> const kBase = [] {
    std::map<std::string, char> m;
    for (auto const& [base, variants] : kVariants) {
      for (auto const& v : variants) {
        if (v.size() > 1) m[v] = base;
      }
    }
    return m;
  }();
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    auto const byte = static_cast<unsigned char>(text[i]);
    std::size_t const len = byte < 0x80 ? 1 : byte < 0xE0 ? 2 : byte < 0xF0 ? 3 : 4;
    std::string cp(text.substr(i, len));
    i += len;
    char base = 0;
    if (len == 1 && std::isalpha(byte)) {
      base = static_cast<char>(std::tolower(byte));
    } else if (auto it = kBase.find(cp); it != kBase.end()) {
      base = it->second;
    }
    if (base == 0) {
      out += cp;
      continue;
    }
    switch (rng() % 4) {
      case 0: out += cp; break;
      case 1: out += static_cast<char>(rng() % 2 ? std::toupper(base) : base); break;
      case 2: {
        auto v = kVariants.find(base);
        if (v == kVariants.end()) {
          out += static_cast<char>(std::toupper(base));
        } else {
          out += v->second[rng() % v->second.size()];
        }
        break;
      }
      default:
        out += base;
        out += "\xCC\x81";  // U+0301 combining acute
        break;
    }
  }
  return out;
}

}  // namespace oracle

#endif  // GAZTRACK_TESTS_ORACLES_HPP

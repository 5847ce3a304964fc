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

#include "gaztrack/rules.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/unicode.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace gaztrack {
namespace {

enum class Tok { kIdent, kString, kColon, kLBrace, kRBrace, kLParen, kRParen, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string describe(Token const& t) {
  switch (t.kind) {
    case Tok::kIdent: return t.text;
    case Tok::kString: return "string \"" + t.text + "\"";
    case Tok::kColon: return "':'";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

[[noreturn]] void syntax_error(std::size_t line, std::size_t column,
                               std::string const& expected, std::string const& found) {
  throw Error(ErrorCode::kSyntaxError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) +
                  ": expected " + expected + ", found " + found,
              {{"line", line}, {"column", column}, {"expected", expected}, {"found", found}});
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;

    char c = src_[pos_];
    auto single = [&](Tok kind) {
      advance();
      t.kind = kind;
      return t;
    };
    switch (c) {
      case ':': return single(Tok::kColon);
      case '{': return single(Tok::kLBrace);
      case '}': return single(Tok::kRBrace);
      case '(': return single(Tok::kLParen);
      case ')': return single(Tok::kRParen);
      case '"': return string_literal(t);
      default: break;
    }
    if (is_ident_start(c)) {
      t.kind = Tok::kIdent;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
        t.text.push_back(src_[pos_]);
        advance();
      }
      return t;
    }
    std::string found(1, c);
    if (static_cast<unsigned char>(c) >= 0x80) found = "non-ASCII character";
    syntax_error(t.line, t.column, "keyword, string or punctuation", "'" + found + "'");
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }

  void advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++column_;
    }
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  Token string_literal(Token t) {
    advance();  // opening quote
    t.kind = Tok::kString;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        syntax_error(line_, column_, "closing '\"'",
                     pos_ >= src_.size() ? "end of input" : "end of line");
      }
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return t;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\\')) {
          syntax_error(line_, column_, "'\\\"' or '\\\\' escape", "invalid escape");
        }
        c = src_[pos_];
      }
      t.text.push_back(c);
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { look_ = lexer_.next(); }

  RuleSet ruleset() {
    RuleSet rs;
    std::unordered_set<std::string> names;
    while (look_.kind != Tok::kEnd) {
      auto const at = look_;
      auto rule = theme();
      if (!names.insert(rule.theme_name).second) {
        throw Error(ErrorCode::kDuplicateTheme,
                    "line " + std::to_string(at.line) + ": duplicate theme \"" +
                        rule.theme_name + "\"",
                    {{"name", rule.theme_name}, {"line", at.line}, {"column", at.column}});
      }
      rs.rules.push_back(std::move(rule));
    }
    if (rs.rules.empty()) syntax_error(look_.line, look_.column, "'theme'", describe(look_));
    return rs;
  }

 private:
  Token take() {
    Token t = std::move(look_);
    look_ = lexer_.next();
    return t;
  }

  Token expect(Tok kind, std::string const& expected) {
    if (look_.kind != kind) syntax_error(look_.line, look_.column, expected, describe(look_));
    return take();
  }

  bool at_keyword(std::string_view kw) const {
    return look_.kind == Tok::kIdent && look_.text == kw;
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      syntax_error(look_.line, look_.column, "'" + std::string(kw) + "'", describe(look_));
    }
    take();
  }

  ThemeRule theme() {
    expect_keyword("theme");
    auto name_tok = look_;
    auto name = normalize(expect(Tok::kString, "theme name string").text).text;
    if (name.empty()) {
      syntax_error(name_tok.line, name_tok.column, "non-empty theme name", "empty string");
    }
    expect(Tok::kLBrace, "'{'");
    ThemeRule rule;
    rule.theme_name = std::move(name);
    expect_keyword("include");
    expect(Tok::kColon, "':'");
    rule.include = expr(0);
    if (at_keyword("exclude")) {
      take();
      expect(Tok::kColon, "':'");
      rule.exclude = expr(0);
    }
    expect(Tok::kRBrace, rule.exclude ? "'}' or operator" : "'exclude:', '}' or operator");
    return rule;
  }

  RuleExprPtr expr(int depth) {
    auto left = conjunction(depth);
    while (at_keyword("OR")) {
      take();
      left = make_or(left, conjunction(depth));
    }
    return left;
  }

  RuleExprPtr conjunction(int depth) {
    auto left = negation(depth);
    while (at_keyword("AND")) {
      take();
      left = make_and(left, negation(depth));
    }
    return left;
  }

  RuleExprPtr negation(int depth) {
    if (depth > kMaxDepth) {
      syntax_error(look_.line, look_.column, "shallower nesting", "nesting deeper than 200");
    }
    if (at_keyword("NOT")) {
      take();
      return make_not(negation(depth + 1));
    }
    if (look_.kind == Tok::kLParen) {
      take();
      auto inner = expr(depth + 1);
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (look_.kind == Tok::kString) {
      auto tok = take();
      try {
        return make_phrase(tok.text);
      } catch (Error const&) {
        syntax_error(tok.line, tok.column, "phrase with at least one word",
                     "\"" + tok.text + "\"");
      }
    }
    syntax_error(look_.line, look_.column, "string, '(' or 'NOT'", describe(look_));
  }

  Lexer lexer_;
  Token look_;
};

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

int precedence(RuleExpr const& e) {
  return std::visit(
      [](auto const& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Or>) return 1;
        else if constexpr (std::is_same_v<T, And>) return 2;
        else if constexpr (std::is_same_v<T, Not>) return 3;
        else return 4;
      },
      e.node());
}

void render(RuleExpr const& e, int min_prec, std::string& out) {
  bool parens = precedence(e) < min_prec;
  if (parens) out.push_back('(');
  std::visit(
      [&](auto const& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Phrase>) {
          out += quote(n.text);
        } else if constexpr (std::is_same_v<T, Or>) {
          render(*n.left, 1, out);
          out += " OR ";
          render(*n.right, 2, out);
        } else if constexpr (std::is_same_v<T, And>) {
          render(*n.left, 2, out);
          out += " AND ";
          render(*n.right, 3, out);
        } else {
          out += "NOT ";
          render(*n.inner, 3, out);
        }
      },
      e.node());
  if (parens) out.push_back(')');
}

std::string fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void collect_positive_phrases(RuleExpr const& e, std::vector<Phrase const*>& out) {
  std::visit(
      [&](auto const& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Phrase>) {
          out.push_back(&n);
        } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
          collect_positive_phrases(*n.left, out);
          collect_positive_phrases(*n.right, out);
        }
      },
      e.node());
}

}  // namespace

RuleExprPtr make_phrase(std::string_view text) {
  Phrase p;
  p.text = normalize(text).text;
  p.words = unicode::fold_words(p.text);
  if (p.words.empty()) {
    throw Error(ErrorCode::kSyntaxError, "phrase \"" + std::string(text) + "\" has no words");
  }
  return std::make_shared<RuleExpr const>(std::move(p));
}

RuleExprPtr make_and(RuleExprPtr left, RuleExprPtr right) {
  return std::make_shared<RuleExpr const>(And{std::move(left), std::move(right)});
}

RuleExprPtr make_or(RuleExprPtr left, RuleExprPtr right) {
  return std::make_shared<RuleExpr const>(Or{std::move(left), std::move(right)});
}

RuleExprPtr make_not(RuleExprPtr inner) {
  return std::make_shared<RuleExpr const>(Not{std::move(inner)});
}

bool same_expr(RuleExpr const& a, RuleExpr const& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      [&](auto const& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        auto const& y = std::get<T>(b.node());
        if constexpr (std::is_same_v<T, Phrase>) {
          return x.text == y.text;
        } else if constexpr (std::is_same_v<T, Not>) {
          return same_expr(*x.inner, *y.inner);
        } else {
          return same_expr(*x.left, *y.left) && same_expr(*x.right, *y.right);
        }
      },
      a.node());
}

std::string to_source(RuleExpr const& expr) {
  std::string out;
  render(expr, 0, out);
  return out;
}

ThemeRule const* RuleSet::find(std::string_view theme_name) const {
  for (auto const& r : rules) {
    if (r.theme_name == theme_name) return &r;
  }
  return nullptr;
}

RuleSet parse_rules(std::string_view source) {
  Parser parser(source);
  auto rs = parser.ruleset();
  rs.version = fnv1a64(to_source(rs));
  return rs;
}

RuleSet load_rules(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open rules file " + path.string(),
                {{"path", path.string()}});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

std::string to_source(RuleSet const& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.rules.size(); ++i) {
    auto const& r = rules.rules[i];
    if (i) out += "\n";
    out += "theme " + quote(r.theme_name) + " {\n";
    out += "  include: " + to_source(*r.include) + "\n";
    if (r.exclude) out += "  exclude: " + to_source(*r.exclude) + "\n";
    out += "}\n";
  }
  return out;
}

bool same_rules(RuleSet const& a, RuleSet const& b) {
  if (a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    auto const& x = a.rules[i];
    auto const& y = b.rules[i];
    if (x.theme_name != y.theme_name) return false;
    if (!same_expr(*x.include, *y.include)) return false;
    if (bool(x.exclude) != bool(y.exclude)) return false;
    if (x.exclude && !same_expr(*x.exclude, *y.exclude)) return false;
  }
  return true;
}

DocWords::DocWords(std::string_view text) : words_(unicode::fold_words(text)) {}

bool DocWords::contains(std::vector<std::string> const& phrase) const {
  if (phrase.empty() || phrase.size() > words_.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= words_.size(); ++i) {
    std::size_t j = 0;
    while (j < phrase.size() && words_[i + j] == phrase[j]) ++j;
    if (j == phrase.size()) return true;
  }
  return false;
}

bool evaluate(RuleExpr const& expr, DocWords const& doc) {
  return std::visit(
      [&](auto const& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Phrase>) {
          return doc.contains(n.words);
        } else if constexpr (std::is_same_v<T, And>) {
          return evaluate(*n.left, doc) && evaluate(*n.right, doc);
        } else if constexpr (std::is_same_v<T, Or>) {
          return evaluate(*n.left, doc) || evaluate(*n.right, doc);
        } else {
          return !evaluate(*n.inner, doc);
        }
      },
      expr.node());
}

bool match_theme(ThemeRule const& rule, DocWords const& doc) {
  if (!evaluate(*rule.include, doc)) return false;
  return !rule.exclude || !evaluate(*rule.exclude, doc);
}

bool match_theme(ThemeRule const& rule, NormalizedText const& doc_text) {
  return match_theme(rule, DocWords(doc_text.text));
}

std::vector<std::string> pre_classify(RuleSet const& rules, RawDocument const& doc) {
  DocWords words(doc.match_text());
  std::vector<std::string> themes;
  for (auto const& rule : rules.rules) {
    if (match_theme(rule, words)) themes.push_back(rule.theme_name);
  }
  return themes;
}

std::vector<std::pair<std::size_t, std::size_t>> include_spans(ThemeRule const& rule,
                                                               DocWords const& doc) {
  std::vector<Phrase const*> phrases;
  collect_positive_phrases(*rule.include, phrases);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  auto const& words = doc.words();
  for (auto const* p : phrases) {
    for (std::size_t i = 0; i + p->words.size() <= words.size(); ++i) {
      std::size_t j = 0;
      while (j < p->words.size() && words[i + j] == p->words[j]) ++j;
      if (j == p->words.size()) spans.emplace_back(i, i + j);
    }
  }
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  return spans;
}

std::string_view demo_rules_source() {
  return R"(# Demo theme rules. Phrases match whole words, ignoring case and accents.

theme "Climate Change" {
  include: "mudança do clima" OR "mudanças climáticas" OR "efeito estufa" OR "Acordo de Paris" OR "emissões de carbono" OR "crédito de carbono"
  exclude: "previsão do tempo"
}

theme "Amazon Region" {
  include: "amazônia" OR "amazônia legal" OR "bioma amazônico" OR "Zona Franca de Manaus"
}

theme "Environmental Disasters" {
  include: "desastre" OR "rompimento de barragem" OR "derramamento de óleo" OR "incêndio florestal" OR "queimadas" OR "estado de calamidade"
  exclude: "desastre natural" AND "seguro"
}

theme "Institutional" {
  include: ("Ibama" OR "ICMBio" OR "Funai" OR "Ministério do Meio Ambiente") AND ("revoga" OR "estrutura regimental" OR "competência" OR "cargos em comissão")
}

theme "Energy" {
  include: "energia elétrica" OR "geração de energia" OR "petróleo" OR "gás natural" OR "Aneel" OR "leilão de energia" OR "hidrelétrica"
}
)";
}

}  // namespace gaztrack

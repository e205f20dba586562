#include "gvas/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

namespace gvas {

int Gvas::find(std::string_view name) const {
  for (std::size_t i = 0; i < nonterminals.size(); ++i)
    if (nonterminals[i] == name) return static_cast<int>(i);
  return -1;
}

int Gvas::intern(const std::string& name) {
  int i = find(name);
  if (i >= 0) return i;
  nonterminals.push_back(name);
  return static_cast<int>(nonterminals.size() - 1);
}

std::vector<std::vector<int>> Gvas::rules_by_lhs() const {
  std::vector<std::vector<int>> out(nonterminals.size());
  for (std::size_t i = 0; i < rules.size(); ++i)
    out[static_cast<std::size_t>(rules[i].lhs)].push_back(static_cast<int>(i));
  return out;
}

std::size_t Gvas::degree() const {
  std::size_t d = 0;
  for (const auto& r : rules) d = std::max(d, r.rhs.size());
  return d;
}

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum class Kind { Ident, Number, Arrow, Bar, Colon, Semi, End } kind;
  std::string text;
  int column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize_line(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Token::Kind::Arrow, "->", col});
      i += 2;
    } else if (c == '|') {
      out.push_back({Token::Kind::Bar, "|", col});
      ++i;
    } else if (c == ':') {
      out.push_back({Token::Kind::Colon, ":", col});
      ++i;
    } else if (c == ';') {
      out.push_back({Token::Kind::Semi, ";", col});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      std::size_t j = i + 1;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      if (j == i + 1 && !std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
      if (j < line.size() && ident_char(line[j]))
        throw ParseError("malformed number", lineno, col);
      out.push_back({Token::Kind::Number, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
    }
  }
  out.push_back({Token::Kind::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

Int parse_number(const Token& t, int lineno) {
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  Int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("integer out of range: " + t.text, lineno, t.column);
  return v;
}

}  // namespace

Gvas parse_text(std::string_view source) {
  Gvas g;
  std::string start_name;
  int start_line = 0;
  bool have_rule = false;
  std::string first_lhs;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t eol = source.find('\n', pos);
    if (eol == std::string_view::npos) eol = source.size();
    std::string_view line = source.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    pos = eol + 1;

    auto toks = tokenize_line(line, lineno);
    std::size_t k = 0;
    auto expect = [&](Token::Kind kind, const char* what) -> const Token& {
      if (toks[k].kind != kind) throw ParseError(std::string("expected ") + what, lineno, toks[k].column);
      return toks[k++];
    };

    while (toks[k].kind != Token::Kind::End) {
      if (toks[k].kind == Token::Kind::Semi) {
        ++k;
        continue;
      }
      const Token& head = expect(Token::Kind::Ident, "identifier");
      if (head.text == "start" && toks[k].kind == Token::Kind::Colon) {
        ++k;
        const Token& id = expect(Token::Kind::Ident, "start symbol");
        if (id.text == "eps") throw ParseError("'eps' is reserved", lineno, id.column);
        if (start_line != 0)
          throw ParseError("duplicate start directive (first on line " + std::to_string(start_line) + ")",
                           lineno, head.column);
        start_name = id.text;
        start_line = lineno;
      } else {
        if (head.text == "eps") throw ParseError("'eps' cannot be a rule head", lineno, head.column);
        int lhs = g.intern(head.text);
        if (!have_rule) {
          have_rule = true;
          first_lhs = head.text;
        }
        expect(Token::Kind::Arrow, "'->'");
        for (;;) {
          SymbolString rhs;
          bool eps = false;
          int body_col = toks[k].column;
          while (toks[k].kind == Token::Kind::Ident || toks[k].kind == Token::Kind::Number) {
            const Token& t = toks[k++];
            if (t.kind == Token::Kind::Number) {
              rhs.push_back(Symbol::t(parse_number(t, lineno)));
            } else if (t.text == "eps") {
              eps = true;
            } else {
              rhs.push_back(Symbol::nt(g.intern(t.text)));
            }
            if (eps && (!rhs.empty() || toks[k].kind == Token::Kind::Ident || toks[k].kind == Token::Kind::Number))
              throw ParseError("'eps' must be the whole body", lineno, t.column);
          }
          if (!eps && rhs.empty()) throw ParseError("empty body (write 'eps')", lineno, body_col);
          g.rules.push_back(Rule{lhs, std::move(rhs)});
          if (toks[k].kind == Token::Kind::Bar) {
            ++k;
            continue;
          }
          break;
        }
        if (toks[k].kind != Token::Kind::Semi && toks[k].kind != Token::Kind::End)
          throw ParseError("unexpected '" + toks[k].text + "'", lineno, toks[k].column);
      }
    }
    if (eol == source.size()) break;
  }

  if (!start_name.empty()) {
    g.start = g.intern(start_name);
  } else if (have_rule) {
    g.start = g.find(first_lhs);
  } else {
    throw ParseError("grammar has no rules", lineno, 1);
  }
  return g;
}

std::string symbol_text(const Gvas& g, const Symbol& s) {
  if (s.is_terminal()) return std::to_string(s.action());
  return g.nonterminals[static_cast<std::size_t>(s.index())];
}

std::string rhs_text(const Gvas& g, const SymbolString& rhs) {
  if (rhs.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (i) out += ' ';
    out += symbol_text(g, rhs[i]);
  }
  return out;
}

std::string to_text(const Gvas& g) {
  std::ostringstream os;
  os << "start: " << g.nonterminals[static_cast<std::size_t>(g.start)] << '\n';
  for (const auto& r : g.rules)
    os << g.nonterminals[static_cast<std::size_t>(r.lhs)] << " -> " << rhs_text(g, r.rhs) << '\n';
  return os.str();
}

std::vector<bool> productive_nonterminals(const Gvas& g) {
  std::vector<bool> prod(g.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules) {
      if (prod[static_cast<std::size_t>(r.lhs)]) continue;
      bool ok = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) {
        return s.is_terminal() || prod[static_cast<std::size_t>(s.index())];
      });
      if (ok) {
        prod[static_cast<std::size_t>(r.lhs)] = true;
        changed = true;
      }
    }
  }
  return prod;
}

NormalizeResult normalize(const Gvas& g) {
  auto prod = productive_nonterminals(g);
  if (!prod[static_cast<std::size_t>(g.start)]) return EmptyLanguage{};

  Gvas out;
  std::vector<int> remap(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (prod[i]) remap[i] = out.intern(g.nonterminals[i]);
  out.start = remap[static_cast<std::size_t>(g.start)];

  for (const auto& r : g.rules) {
    if (remap[static_cast<std::size_t>(r.lhs)] < 0) continue;
    bool keep = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) {
      return s.is_terminal() || remap[static_cast<std::size_t>(s.index())] >= 0;
    });
    if (!keep) continue;
    Rule nr{remap[static_cast<std::size_t>(r.lhs)], {}};
    for (const auto& s : r.rhs) {
      if (s.is_nonterminal()) {
        nr.rhs.push_back(Symbol::nt(remap[static_cast<std::size_t>(s.index())]));
      } else if (s.action() == 0) {
        nr.rhs.push_back(Symbol::t(0));
      } else {
        Int a = s.action();
        Int unit = a > 0 ? 1 : -1;
        for (Int k = 0; k != a; k += unit) nr.rhs.push_back(Symbol::t(unit));
      }
    }
    out.rules.push_back(std::move(nr));
  }

  if (out.degree() < 2) {
    auto& rhs = out.rules.front().rhs;
    while (rhs.size() < 2) rhs.push_back(Symbol::t(0));
  }
  return NormalizedGvas::from_normalized(std::move(out));
}

NormalizedGvas normalized(std::string_view source) {
  auto r = normalize(parse_text(source));
  if (std::holds_alternative<EmptyLanguage>(r))
    throw std::invalid_argument("grammar start symbol is unproductive (empty language)");
  return std::get<NormalizedGvas>(std::move(r));
}

NormalizedGvas NormalizedGvas::from_normalized(Gvas g) {
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("normalized grammar needs a nonterminal");
  if (g.start < 0 || static_cast<std::size_t>(g.start) >= n) throw std::invalid_argument("bad start symbol");
  for (const auto& r : g.rules)
    for (const auto& s : r.rhs) {
      if (s.is_terminal() && (s.action() < -1 || s.action() > 1))
        throw std::invalid_argument("normalized grammar has terminal outside {-1,0,1}");
      if (s.is_nonterminal() && (s.index() < 0 || static_cast<std::size_t>(s.index()) >= n))
        throw std::invalid_argument("rule references unknown nonterminal");
    }
  if (g.degree() < 2) throw std::invalid_argument("normalized grammar needs degree >= 2");

  NormalizedGvas ng;
  ng.by_lhs_ = g.rules_by_lhs();
  ng.degree_ = g.degree();

  // Shortest words (Bellman-Ford on lengths); unproductive stays at max.
  constexpr Int kInf = std::numeric_limits<Int>::max();
  ng.min_len_.assign(n, kInf);
  ng.witness_rule_.assign(n, -1);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
      const Rule& r = g.rules[i];
      Int len = 0;
      for (const auto& s : r.rhs) {
        Int l = s.is_terminal() ? 1 : ng.min_len_[static_cast<std::size_t>(s.index())];
        if (l == kInf || len > kInf / 2 - l) {
          len = kInf;
          break;
        }
        len += l;
      }
      auto& cur = ng.min_len_[static_cast<std::size_t>(r.lhs)];
      if (len < cur) {
        cur = len;
        ng.witness_rule_[static_cast<std::size_t>(r.lhs)] = static_cast<int>(i);
        changed = true;
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    if (ng.min_len_[x] == kInf)
      throw std::invalid_argument("nonterminal '" + g.nonterminals[x] + "' is unproductive");

  // Transitive closure of "occurs in a rhs of".
  ng.derives_.assign(n, std::vector<bool>(n, false));
  for (const auto& r : g.rules)
    for (const auto& s : r.rhs)
      if (s.is_nonterminal()) ng.derives_[static_cast<std::size_t>(r.lhs)][static_cast<std::size_t>(s.index())] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (ng.derives_[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (ng.derives_[k][j]) ng.derives_[i][j] = true;

  ng.g_ = std::move(g);
  return ng;
}

bool NormalizedGvas::derivable_from(int x, const SymbolString& alpha) const {
  return std::any_of(alpha.begin(), alpha.end(),
                     [&](const Symbol& s) { return s.is_nonterminal() && in_closure(s.index(), x); });
}

std::vector<int> NormalizedGvas::closure(int x) const {
  std::vector<int> out;
  for (std::size_t y = 0; y < size(); ++y)
    if (in_closure(x, static_cast<int>(y))) out.push_back(static_cast<int>(y));
  return out;
}

Int NormalizedGvas::elementary_bound(Int cap) const {
  Int b = 1;
  for (std::size_t i = 0; i < size(); ++i) {
    if (b > cap / static_cast<Int>(degree_)) return cap;
    b *= static_cast<Int>(degree_);
  }
  return std::min(b, cap);
}

Word NormalizedGvas::witness_word(int x) const {
  Word w;
  std::vector<Symbol> stack{Symbol::nt(x)};
  while (!stack.empty()) {
    Symbol s = stack.back();
    stack.pop_back();
    if (s.is_terminal()) {
      w.push_back(s.action());
      continue;
    }
    const Rule& r = rule(witness_rule_[static_cast<std::size_t>(s.index())]);
    for (auto it = r.rhs.rbegin(); it != r.rhs.rend(); ++it) stack.push_back(*it);
  }
  return w;
}

bool is_terminal_wrapped(const SymbolString& alpha) {
  return std::count_if(alpha.begin(), alpha.end(), [](const Symbol& s) { return s.is_nonterminal(); }) == 1;
}

bool is_ava(const SymbolString& alpha) {
  return alpha.size() == 3 && alpha[0].is_terminal() && alpha[1].is_nonterminal() && alpha[2].is_terminal();
}

StructuralReport structural_report(const NormalizedGvas& g) {
  StructuralReport rep;
  rep.degree = g.degree();
  rep.derivability.resize(g.size());
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      if (g.derives(static_cast<int>(x), static_cast<int>(y))) rep.derivability[x].push_back(static_cast<int>(y));
  rep.is_thin = true;
  rep.is_simple = true;
  for (const auto& r : g.grammar().rules) {
    if (!g.derivable_from(r.lhs, r.rhs)) continue;
    if (!is_terminal_wrapped(r.rhs)) rep.is_thin = false;
    if (!is_ava(r.rhs)) rep.is_simple = false;
  }
  return rep;
}

}  // namespace gvas

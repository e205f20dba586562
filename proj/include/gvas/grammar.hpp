#ifndef GVAS_GRAMMAR_HPP_
#define GVAS_GRAMMAR_HPP_

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gvas/ext_value.hpp"

namespace gvas {

/// A grammar symbol: an integer counter action or a nonterminal index.
struct Symbol {
  enum class Kind : std::uint8_t { Terminal, NonTerminal };

  Kind kind = Kind::Terminal;
  Int value = 0;  // the action, or the nonterminal index

  static Symbol t(Int action) { return {Kind::Terminal, action}; }
  static Symbol nt(int index) { return {Kind::NonTerminal, index}; }

  bool is_terminal() const { return kind == Kind::Terminal; }
  bool is_nonterminal() const { return kind == Kind::NonTerminal; }
  Int action() const { return value; }
  int index() const { return static_cast<int>(value); }

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using SymbolString = std::vector<Symbol>;
using Word = std::vector<Int>;

struct Rule {
  int lhs = 0;
  SymbolString rhs;

  friend auto operator<=>(const Rule&, const Rule&) = default;
};

/// A 1-dimensional grammar-controlled vector addition system.
///
/// Nonterminal order and rule order follow the source text; every analysis
/// iterates in this order so that results are reproducible.
struct Gvas {
  std::vector<std::string> nonterminals;
  std::vector<Rule> rules;
  int start = 0;

  int find(std::string_view name) const;  // -1 when absent
  int intern(const std::string& name);    // adds the name when absent
  std::size_t size() const { return nonterminals.size(); }
  std::vector<std::vector<int>> rules_by_lhs() const;
  std::size_t degree() const;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Parses the grammar text format:
///
///     # comment
///     start: S
///     S -> -1 S 1 1 | eps ; T -> S S
///
/// Any identifier is a nonterminal; a nonterminal without rules is
/// unproductive.
Gvas parse_text(std::string_view source);

/// Canonical text form; parse_text(to_text(g)) reproduces g.
std::string to_text(const Gvas& g);
std::string symbol_text(const Gvas& g, const Symbol& s);
std::string rhs_text(const Gvas& g, const SymbolString& rhs);

struct EmptyLanguage {};

class NormalizedGvas {
public:
  /// Validates that g is already normalized and caches its analyses.
  /// Throws std::invalid_argument when an invariant fails.
  static NormalizedGvas from_normalized(Gvas g);

  const Gvas& grammar() const { return g_; }
  std::size_t size() const { return g_.size(); }
  std::size_t degree() const { return degree_; }
  const std::vector<int>& rules_of(int x) const { return by_lhs_[static_cast<std::size_t>(x)]; }
  const Rule& rule(int i) const { return g_.rules[static_cast<std::size_t>(i)]; }
  const std::string& name(int x) const { return g_.nonterminals[static_cast<std::size_t>(x)]; }

  /// True when y occurs in some sentential form derived (in >= 1 step) from x.
  bool derives(int x, int y) const { return derives_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
  /// derives(x, y) or x == y.
  bool in_closure(int x, int y) const { return x == y || derives(x, y); }
  /// Whether x is derivable from the string alpha.
  bool derivable_from(int x, const SymbolString& alpha) const;
  /// Nonterminals in the reflexive closure of x, in index order.
  std::vector<int> closure(int x) const;

  /// d^|V|, saturated at `cap`.
  Int elementary_bound(Int cap = Int{1} << 62) const;

  Int min_word_length(int x) const { return min_len_[static_cast<std::size_t>(x)]; }
  /// A shortest terminal word of x.
  Word witness_word(int x) const;

private:
  Gvas g_;
  std::size_t degree_ = 0;
  std::vector<std::vector<int>> by_lhs_;
  std::vector<std::vector<bool>> derives_;
  std::vector<Int> min_len_;
  std::vector<int> witness_rule_;
};

using NormalizeResult = std::variant<NormalizedGvas, EmptyLanguage>;

/// Removes unproductive nonterminals, decomposes terminals into {-1,0,1}
/// and pads with 0 until the degree is at least 2.
NormalizeResult normalize(const Gvas& g);

/// Convenience: parse and normalize, throwing when the start symbol is
/// unproductive.
NormalizedGvas normalized(std::string_view source);

struct StructuralReport {
  std::size_t degree = 0;
  std::vector<std::vector<int>> derivability;  // derives(x, .) per x
  bool is_thin = false;
  bool is_simple = false;
};

/// alpha is in A* V A*.
bool is_terminal_wrapped(const SymbolString& alpha);
/// alpha is in A V A.
bool is_ava(const SymbolString& alpha);

StructuralReport structural_report(const NormalizedGvas& g);

/// Productivity fixpoint over an arbitrary grammar.
std::vector<bool> productive_nonterminals(const Gvas& g);

}  // namespace gvas

#endif  // GVAS_GRAMMAR_HPP_

#ifndef GVAS_PRESBURGER_HPP_
#define GVAS_PRESBURGER_HPP_

// Linear integer arithmetic with quantifiers, decided by Cooper's
// quantifier elimination.  Variables range over Z; natural-number variables
// are expressed with explicit x >= 0 guards (see exists_nat / forall_nat).

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvas::pres {

using BigInt = boost::multiprecision::cpp_int;

/// A fresh variable id.  The name is only used for printing.
int fresh_var(const std::string& name = "");
std::string var_name(int v);

struct LinTerm {
  std::map<int, BigInt> coeffs;  // no zero entries
  BigInt constant = 0;

  LinTerm() = default;
  LinTerm(long long c) : constant(c) {}  // NOLINT implicit
  LinTerm(const BigInt& c) : constant(c) {}  // NOLINT implicit
  static LinTerm var(int v, const BigInt& coeff = 1);

  BigInt coeff(int v) const;
  bool is_constant() const { return coeffs.empty(); }
  LinTerm substitute(int v, const LinTerm& by) const;

  friend LinTerm operator+(LinTerm a, const LinTerm& b);
  friend LinTerm operator-(LinTerm a, const LinTerm& b);
  friend LinTerm operator-(LinTerm a);
  friend LinTerm operator*(const BigInt& k, LinTerm a);
  friend bool operator==(const LinTerm&, const LinTerm&) = default;
  friend bool operator<(const LinTerm& a, const LinTerm& b);
};

std::string to_string(const LinTerm& t);

struct Atom {
  // t <= 0, t = 0, t != 0, m | t, not m | t
  enum class Kind { Le, Eq, Ne, Dvd, NDvd };
  Kind kind = Kind::Le;
  LinTerm t;
  BigInt m = 0;  // modulus, >= 2 for Dvd/NDvd

  friend bool operator==(const Atom&, const Atom&) = default;
  friend bool operator<(const Atom& a, const Atom& b);
};

class Formula;

struct FormulaNode {
  enum class Kind { True, False, Atom, And, Or, Exists, Forall };
  Kind kind = Kind::True;
  Atom atom;
  std::vector<Formula> kids;  // And/Or: operands; quantifiers: the body
  std::vector<int> vars;      // bound variables
};

/// Immutable formula.  There is no negation node: negation is pushed to the
/// atoms (and dualises quantifiers) on construction.
class Formula {
public:
  Formula();  // true
  explicit Formula(std::shared_ptr<const FormulaNode> n) : n_(std::move(n)) {}

  const FormulaNode& node() const { return *n_; }
  FormulaNode::Kind kind() const { return n_->kind; }
  bool is_true() const { return kind() == FormulaNode::Kind::True; }
  bool is_false() const { return kind() == FormulaNode::Kind::False; }

private:
  std::shared_ptr<const FormulaNode> n_;
};

Formula truth(bool b);
Formula atom(Atom a);  // normalises; may fold to true/false
Formula le(const LinTerm& a, const LinTerm& b);
Formula lt(const LinTerm& a, const LinTerm& b);
Formula ge(const LinTerm& a, const LinTerm& b);
Formula gt(const LinTerm& a, const LinTerm& b);
Formula eq(const LinTerm& a, const LinTerm& b);
Formula ne(const LinTerm& a, const LinTerm& b);
Formula dvd(const BigInt& m, const LinTerm& t);
Formula mod_eq(const LinTerm& a, const LinTerm& b, const BigInt& m);  // a = b mod m
Formula and_(std::vector<Formula> fs);
Formula or_(std::vector<Formula> fs);
Formula and_(const Formula& a, const Formula& b);
Formula or_(const Formula& a, const Formula& b);
Formula not_(const Formula& f);
Formula implies(const Formula& a, const Formula& b);
Formula exists(std::vector<int> vars, const Formula& body);
Formula forall(std::vector<int> vars, const Formula& body);
/// Quantifiers over N: the guards x >= 0 are added to the body.
Formula exists_nat(const std::vector<int>& vars, const Formula& body);
Formula forall_nat(const std::vector<int>& vars, const Formula& body);

std::string to_string(const Formula& f);
std::vector<int> free_vars(const Formula& f);
std::size_t atom_count(const Formula& f);
Formula substitute(const Formula& f, int v, const LinTerm& by);

class PresburgerResourceExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  std::size_t max_atoms = 1'000'000;
};

using Assignment = std::map<int, BigInt>;

/// Equivalent quantifier-free formula (divisibility atoms may appear).
Formula eliminate(const Formula& f, const Limits& lim = {});
/// Truth of a quantifier-free formula; every free variable must be assigned.
bool evaluate(const Formula& f, const Assignment& env);
/// Universal / existential closure over the free variables.
bool is_valid(const Formula& f, const Limits& lim = {});
bool is_sat(const Formula& f, const Limits& lim = {});
/// A satisfying assignment for the outer existential block and the free
/// variables of f, or nullopt when unsatisfiable.
std::optional<Assignment> find_model(const Formula& f, const Limits& lim = {});

}  // namespace gvas::pres

#endif  // GVAS_PRESBURGER_HPP_

#ifndef GVAS_COVER_HPP_
#define GVAS_COVER_HPP_

// Coverability: flow-tree certificates, their checker and search, and the
// decision procedure built on ratios and summaries.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gvas/grammar.hpp"
#include "gvas/reduction.hpp"

namespace gvas {

struct CertNode {
  enum class Kind { Terminal, Epsilon, NonTerminal };

  Kind kind = Kind::NonTerminal;
  Int value = 0;  // terminal action, or nonterminal index
  Int in = 0;
  Int out = 0;
  std::optional<int> rule;  // set on internal nodes; an eps rule has no children
  std::vector<CertNode> children;

  std::size_t size() const;
  std::size_t height() const;
};

struct Certificate {
  CertNode root;
};

class MalformedCertificate : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Lazy ratio classification and memoized summaries of one grammar.
class Analyses {
public:
  explicit Analyses(const NormalizedGvas& g, vas2::AccelCaps caps = {});

  const NormalizedGvas& grammar() const { return g_; }
  bool finite_ratio(int x);
  RatioResult ratio(int x);
  /// sigma_x(n); requires a finite ratio.
  ExtValue sigma(int x, const ExtValue& n);

private:
  const NormalizedGvas& g_;
  vas2::AccelCaps caps_;
  std::unique_ptr<RatioAnalyzer> an_;
  std::map<int, RatioResult> ratio_;
  std::map<int, SummaryFn> summary_;
  std::map<std::pair<int, Int>, ExtValue> eval_;
};

/// Conditions (i)-(iii) with slack: internal nodes respect the first flow
/// condition, finite-ratio leaves stay below their summary, infinite-ratio
/// leaves have a proper ancestor with the same symbol and a smaller input.
/// Throws MalformedCertificate when the tree does not follow the rules.
bool check_certificate(Analyses& an, const Certificate& cert);
/// check_certificate plus root symbol s, in(root) <= c and out(root) >= d.
bool certifies(Analyses& an, const Certificate& cert, int s, Int c, Int d);

struct CoverBounds {
  int max_height = 8;
  Int max_value = Int{1} << 40;
  // Counter values explored by the least-fixpoint evaluation.
  Int fixpoint_cap = 4096;
};

/// A certificate with root s, in(root) <= c and out(root) >= d, or nullopt
/// when none exists within the bounds.  Deterministic.
std::optional<Certificate> find_certificate(Analyses& an, int s, Int c, Int d, const CoverBounds& bounds = {});

/// Whether some tree of height <= max_height has an unbounded output from
/// counter value c, with finite-ratio leaves and condition-(iii) leaves.
bool unbounded_from(Analyses& an, int s, Int c, int max_height);

/// sigma_s(c) as the least fixpoint of the rule equations over the counter
/// values it needs; nullopt when a value exceeds `cap`.
std::optional<ExtValue> fixpoint_summary(Analyses& an, int s, Int c, Int cap);

struct CoverVerdict {
  enum class Kind { Covered, NotCovered, Unknown };

  Kind kind = Kind::Unknown;
  std::optional<Certificate> certificate;
  std::optional<Word> word;
  std::string method;  // NotCovered: "summary" or "bounded-exhaustion"
  std::string detail;
  CoverBounds bound_used;
};

std::string to_string(CoverVerdict::Kind k);

/// Is some d' >= d reachable from some c' <= c through a word of L(s)?
CoverVerdict decide_cover(const Gvas& g, const std::string& s, Int c, Int d, const CoverBounds& bounds = {},
                          const vas2::AccelCaps& caps = {});

struct MaxCoverResult {
  std::optional<ExtValue> value;  // nullopt: unknown
  std::string method;
  std::string detail;
};

MaxCoverResult max_cover(const Gvas& g, const std::string& s, Int c, const CoverBounds& bounds = {},
                         const vas2::AccelCaps& caps = {});

/// Lowercase hex SHA-256 of the canonical text of g.
std::string grammar_hash(const NormalizedGvas& g);

std::string to_json(const NormalizedGvas& g, const Certificate& cert);
/// Throws std::invalid_argument when the grammar hash does not match.
Certificate certificate_from_json(const NormalizedGvas& g, const std::string& text);
std::string to_dot(const NormalizedGvas& g, const Certificate& cert);

}  // namespace gvas

#endif  // GVAS_COVER_HPP_

#ifndef GVAS_SUMMARY_HPP_
#define GVAS_SUMMARY_HPP_

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "gvas/displacement.hpp"
#include "gvas/ext_value.hpp"
#include "gvas/grammar.hpp"
#include "gvas/semilinear.hpp"

namespace gvas {

/// table[n] below the cutoff, n + delta from the cutoff on.
struct ClosedForm {
  Int cutoff = 0;
  std::vector<ExtValue> table;
  Int delta = 0;
};

/// sup{d : exists c <= n, (c, d) in relation}; d <= lambda * c + b holds on
/// the relation.
struct Relational {
  SemilinearSet relation;
  Int lambda_num = 1;
  Int lambda_den = 1;
  Int b = 0;
};

/// The constant -inf function.
struct EmptyLang {};

struct SummaryFn {
  std::variant<ClosedForm, Relational, EmptyLang> form;

  ExtValue operator()(const ExtValue& n) const;
};

ExtValue eval_summary(const SummaryFn& f, const ExtValue& n);

struct SummaryOptions {
  Int rounds = 0;         // 0: |V| * (d^|V| + 1)
  Int max_cutoff = 1 << 22;  // refuse larger d^|V|
};

/// sigma_Y for every Y with finite displacement (nullopt elsewhere).
std::vector<std::optional<ClosedForm>> finite_displacement_summaries(const NormalizedGvas& g,
                                                                     const DisplacementTable& dt,
                                                                     const SummaryOptions& opt = {});

/// sigma_x; requires delta(x) finite.
SummaryFn summary_finite_displacement(const NormalizedGvas& g, int x, const DisplacementTable& dt,
                                      const SummaryOptions& opt = {});

using SummaryLookup = std::function<SummaryFn(int)>;
using ValueMap = std::function<ExtValue(const ExtValue&)>;

/// sigma of a sentential form: the composition of the symbol summaries.
ValueMap word_summary(const SymbolString& w, const SummaryLookup& lookup);

}  // namespace gvas

#endif  // GVAS_SUMMARY_HPP_

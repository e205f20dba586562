#include "gvas/summary.hpp"

#include <stdexcept>

namespace gvas {

ExtValue SummaryFn::operator()(const ExtValue& n) const { return eval_summary(*this, n); }

ExtValue eval_summary(const SummaryFn& f, const ExtValue& n) {
  if (std::holds_alternative<EmptyLang>(f.form) || n.is_neg_inf()) return ExtValue::neg_inf();
  if (const auto* cf = std::get_if<ClosedForm>(&f.form)) {
    if (n.is_pos_inf()) return n;
    Int v = n.value();
    if (v < 0) return ExtValue::neg_inf();
    if (v >= cf->cutoff) return checked_add(v, cf->delta);
    return cf->table[static_cast<std::size_t>(v)];
  }
  const auto& rel = std::get<Relational>(f.form);
  if (n.is_pos_inf()) return rel.relation.is_empty() ? ExtValue::neg_inf() : ExtValue::pos_inf();
  if (n.value() < 0) return ExtValue::neg_inf();
  return max_second_given_first_leq(rel.relation, n.value());
}

std::vector<std::optional<ClosedForm>> finite_displacement_summaries(const NormalizedGvas& g,
                                                                     const DisplacementTable& dt,
                                                                     const SummaryOptions& opt) {
  const std::size_t nv = g.size();
  const Int cutoff = g.elementary_bound(opt.max_cutoff + 1);
  if (cutoff > opt.max_cutoff) throw std::invalid_argument("summary: d^|V| exceeds the configured maximum");
  const Int rounds = opt.rounds > 0 ? opt.rounds : checked_mul(static_cast<Int>(nv), cutoff + 1);
  const auto n = static_cast<std::size_t>(cutoff);

  std::vector<std::vector<ExtValue>> f(nv);
  for (std::size_t y = 0; y < nv; ++y)
    if (dt.finite(static_cast<int>(y))) f[y].assign(n, ExtValue::neg_inf());

  for (Int h = 0; h < rounds; ++h) {
    auto next = f;
    bool changed = false;
    for (const Rule& r : g.grammar().rules) {
      auto y = static_cast<std::size_t>(r.lhs);
      if (!dt.finite(r.lhs)) continue;
      for (std::size_t c = 0; c < n; ++c) {
        ExtValue v = static_cast<Int>(c);
        for (const Symbol& s : r.rhs) {
          if (s.is_terminal()) {
            v = v + ExtValue(s.action());
            if (v.is_finite() && v.value() < 0) v = ExtValue::neg_inf();
          } else if (v.value() >= cutoff) {
            v = v + dt[s.index()];
          } else {
            v = f[static_cast<std::size_t>(s.index())][static_cast<std::size_t>(v.value())];
          }
          if (v.is_neg_inf()) break;
        }
        if (v > next[y][c]) next[y][c] = v;
      }
    }
    // sigma is monotone: keep running maxima.
    for (std::size_t y = 0; y < nv; ++y)
      for (std::size_t c = 1; c < f[y].size(); ++c) next[y][c] = max(next[y][c], next[y][c - 1]);
    for (std::size_t y = 0; y < nv && !changed; ++y) changed = next[y] != f[y];
    f = std::move(next);
    if (!changed) break;
  }

  std::vector<std::optional<ClosedForm>> out(nv);
  for (std::size_t y = 0; y < nv; ++y)
    if (dt.finite(static_cast<int>(y))) out[y] = ClosedForm{cutoff, f[y], dt[static_cast<int>(y)].value()};
  return out;
}

SummaryFn summary_finite_displacement(const NormalizedGvas& g, int x, const DisplacementTable& dt,
                                      const SummaryOptions& opt) {
  if (!dt.finite(x)) throw std::invalid_argument("summary_finite_displacement: displacement is infinite");
  return {*finite_displacement_summaries(g, dt, opt)[static_cast<std::size_t>(x)]};
}

ValueMap word_summary(const SymbolString& w, const SummaryLookup& lookup) {
  std::vector<std::variant<Int, SummaryFn>> steps;
  for (const Symbol& s : w) {
    if (s.is_terminal()) steps.emplace_back(s.action());
    else steps.emplace_back(lookup(s.index()));
  }
  return [steps = std::move(steps)](const ExtValue& n) {
    ExtValue v = n;
    if (v.is_finite() && v.value() < 0) return ExtValue::neg_inf();
    for (const auto& st : steps) {
      if (v.is_neg_inf()) break;
      if (const Int* a = std::get_if<Int>(&st)) {
        v = v + ExtValue(*a);
        if (v.is_finite() && v.value() < 0) v = ExtValue::neg_inf();
      } else {
        v = eval_summary(std::get<SummaryFn>(st), v);
      }
    }
    return v;
  };
}

}  // namespace gvas

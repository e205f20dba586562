#include "gvas/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <unordered_set>

namespace gvas::oracle {

ExtValue run_word(Int c, const Word& w) {
  if (c < 0) return ExtValue::neg_inf();
  for (Int a : w) {
    c = checked_add(c, a);
    if (c < 0) return ExtValue::neg_inf();
  }
  return c;
}

namespace {

struct WordOrder {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

using WordSet = std::set<Word, WordOrder>;

}  // namespace

std::vector<Word> enumerate_words(const NormalizedGvas& g, int x, std::size_t max_len, std::size_t cap) {
  const auto& gr = g.grammar();
  std::vector<WordSet> sets(g.size());
  std::size_t total = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : gr.rules) {
      WordSet partial{Word{}};
      for (const Symbol& s : r.rhs) {
        WordSet next;
        for (const Word& p : partial) {
          if (s.is_terminal()) {
            if (p.size() + 1 > max_len) continue;
            Word w = p;
            w.push_back(s.action());
            next.insert(std::move(w));
          } else {
            for (const Word& q : sets[static_cast<std::size_t>(s.index())]) {
              if (p.size() + q.size() > max_len) break;  // ordered by length
              Word w = p;
              w.insert(w.end(), q.begin(), q.end());
              next.insert(std::move(w));
            }
          }
          if (next.size() > cap) throw OracleBudgetExceeded("enumerate_words: more than " + std::to_string(cap) + " words");
        }
        partial = std::move(next);
        if (partial.empty()) break;
      }
      auto& target = sets[static_cast<std::size_t>(r.lhs)];
      for (auto& w : partial) {
        if (target.insert(w).second) {
          changed = true;
          if (++total > cap) throw OracleBudgetExceeded("enumerate_words: more than " + std::to_string(cap) + " words");
        }
      }
    }
  }
  const auto& s = sets[static_cast<std::size_t>(x)];
  return {s.begin(), s.end()};
}

namespace {

constexpr std::uint16_t kNone = std::numeric_limits<std::uint16_t>::max();

// Min-length reachability tables T[y][c][d] over counters in [0, cap] and
// words of length <= max_len, computed by round-based (Jacobi) iteration.
class ReachTables {
public:
  ReachTables(const NormalizedGvas& g, Int cap, Int max_len)
      : g_(g), cap_(cap), max_len_(max_len), n_(static_cast<std::size_t>(cap + 1)) {
    len_.assign(g.size(), std::vector<std::uint16_t>(n_ * n_, kNone));
    round_.assign(g.size(), std::vector<std::uint16_t>(n_ * n_, kNone));
    solve();
  }

  std::uint16_t len(int y, Int c, Int d) const { return len_[static_cast<std::size_t>(y)][idx(c, d)]; }

  // Min lengths from c through `form`, per final counter value.
  std::vector<std::uint16_t> run_form(const SymbolString& form, Int c,
                                      const std::vector<std::vector<std::uint16_t>>& tables) const {
    std::vector<std::uint16_t> cur(n_, kNone), nxt(n_);
    cur[static_cast<std::size_t>(c)] = 0;
    for (const Symbol& s : form) {
      std::fill(nxt.begin(), nxt.end(), kNone);
      bool any = false;
      for (std::size_t v = 0; v < n_; ++v) {
        std::uint16_t lv = cur[v];
        if (lv == kNone) continue;
        if (s.is_terminal()) {
          Int w = static_cast<Int>(v) + s.action();
          if (w < 0 || w > cap_ || lv + 1 > max_len_) continue;
          auto& t = nxt[static_cast<std::size_t>(w)];
          if (lv + 1 < t) t = static_cast<std::uint16_t>(lv + 1), any = true;
        } else {
          const auto& tab = tables[static_cast<std::size_t>(s.index())];
          Int slack = max_len_ - lv;
          Int lo = std::max<Int>(0, static_cast<Int>(v) - slack);
          Int hi = std::min<Int>(cap_, static_cast<Int>(v) + slack);
          const std::uint16_t* row = &tab[v * n_];
          for (Int d = lo; d <= hi; ++d) {
            std::uint16_t ld = row[d];
            if (ld == kNone || ld > slack) continue;
            auto& t = nxt[static_cast<std::size_t>(d)];
            std::uint16_t tot = static_cast<std::uint16_t>(lv + ld);
            if (tot < t) t = tot, any = true;
          }
        }
      }
      cur.swap(nxt);
      if (!any) break;
    }
    return cur;
  }

  const std::vector<std::vector<std::uint16_t>>& tables() const { return len_; }

  Word witness(int y, Int c, Int d) const {
    Word out;
    append_witness(y, c, d, out);
    return out;
  }

  // Word for a form from c to d of total length `total`, children needing
  // rounds below `round_limit` (kNone: no restriction).
  bool split_form(const SymbolString& form, Int c, Int d, std::uint16_t total, std::uint16_t round_limit,
                  Word& out) const {
    std::vector<std::pair<Int, Int>> path;  // (value after symbol, length used)
    std::set<std::tuple<std::size_t, Int, Int>> dead;
    std::function<bool(std::size_t, Int, Int)> go = [&](std::size_t i, Int v, Int used) -> bool {
      if (i == form.size()) return v == d && used == total;
      if (dead.count({i, v, used})) return false;
      const Symbol& s = form[i];
      if (s.is_terminal()) {
        Int w = v + s.action();
        if (w >= 0 && w <= cap_ && used + 1 <= total) {
          path.emplace_back(w, 1);
          if (go(i + 1, w, used + 1)) return true;
          path.pop_back();
        }
      } else {
        const auto& lt = len_[static_cast<std::size_t>(s.index())];
        const auto& rt = round_[static_cast<std::size_t>(s.index())];
        for (Int w = 0; w <= cap_; ++w) {
          std::uint16_t l = lt[idx(v, w)];
          if (l == kNone || used + l > total) continue;
          if (round_limit != kNone && rt[idx(v, w)] >= round_limit) continue;
          path.emplace_back(w, l);
          if (go(i + 1, w, used + l)) return true;
          path.pop_back();
        }
      }
      dead.insert({i, v, used});
      return false;
    };
    if (!go(0, c, 0)) return false;
    Int v = c;
    for (std::size_t i = 0; i < form.size(); ++i) {
      const Symbol& s = form[i];
      if (s.is_terminal()) {
        out.push_back(s.action());
      } else {
        append_witness(s.index(), v, path[i].first, out);
      }
      v = path[i].first;
    }
    return true;
  }

private:
  std::size_t idx(Int c, Int d) const { return static_cast<std::size_t>(c) * n_ + static_cast<std::size_t>(d); }

  void append_witness(int y, Int c, Int d, Word& out) const {
    std::uint16_t total = len(y, c, d);
    std::uint16_t r = round_[static_cast<std::size_t>(y)][idx(c, d)];
    for (int ri : g_.rules_of(y)) {
      if (split_form(g_.rule(ri).rhs, c, d, total, r, out)) return;
    }
    throw std::logic_error("oracle: witness reconstruction failed");
  }

  void solve() {
    const auto& gr = g_.grammar();
    std::vector<bool> changed(g_.size(), true);
    std::uint16_t round = 0;
    for (bool first = true;; first = false) {
      ++round;
      auto next = len_;
      std::vector<bool> now_changed(g_.size(), false);
      for (const Rule& r : gr.rules) {
        bool dirty = first;
        for (const Symbol& s : r.rhs)
          if (s.is_nonterminal() && changed[static_cast<std::size_t>(s.index())]) dirty = true;
        if (!dirty) continue;
        auto& tab = next[static_cast<std::size_t>(r.lhs)];
        auto& rnd = round_[static_cast<std::size_t>(r.lhs)];
        for (Int c = 0; c <= cap_; ++c) {
          auto row = run_form(r.rhs, c, len_);
          for (std::size_t d = 0; d < n_; ++d) {
            if (row[d] < tab[idx(c, static_cast<Int>(d))]) {
              tab[idx(c, static_cast<Int>(d))] = row[d];
              rnd[idx(c, static_cast<Int>(d))] = round;
              now_changed[static_cast<std::size_t>(r.lhs)] = true;
            }
          }
        }
      }
      len_ = std::move(next);
      changed = now_changed;
      if (std::none_of(changed.begin(), changed.end(), [](bool b) { return b; })) break;
      if (round == kNone - 1) throw std::logic_error("oracle: too many rounds");
    }
  }

  const NormalizedGvas& g_;
  Int cap_;
  Int max_len_;
  std::size_t n_;
  std::vector<std::vector<std::uint16_t>> len_;
  std::vector<std::vector<std::uint16_t>> round_;
};

Int effective_cap(const NormalizedGvas& g, Int c_max, const OracleBudget& b) {
  Int cap = b.max_counter > 0 ? b.max_counter : 10 * (c_max + g.elementary_bound(1'000'000));
  cap = std::min(cap, c_max + b.max_word_len);
  cap = std::max(cap, c_max);
  // Respect the cell budget.
  while (cap > c_max && static_cast<double>(g.size()) * static_cast<double>(cap + 1) * static_cast<double>(cap + 1) >
                            static_cast<double>(b.max_states))
    --cap;
  return cap;
}

}  // namespace

std::vector<ReachPair> reach_pairs_form(const NormalizedGvas& g, const SymbolString& form, Int c_max,
                                        const OracleBudget& budget) {
  if (budget.max_word_len < 0 || budget.max_word_len >= kNone - 1)
    throw std::invalid_argument("oracle: max_word_len out of range");
  Int cap = effective_cap(g, c_max, budget);
  ReachTables tables(g, cap, budget.max_word_len);
  std::vector<ReachPair> out;
  for (Int c = 0; c <= c_max; ++c) {
    auto row = tables.run_form(form, c, tables.tables());
    for (Int d = 0; d <= cap; ++d) {
      std::uint16_t l = row[static_cast<std::size_t>(d)];
      if (l == kNone) continue;
      ReachPair p{c, d, {}};
      if (!tables.split_form(form, c, d, l, kNone, p.witness))
        throw std::logic_error("oracle: witness reconstruction failed");
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<ReachPair> reach_pairs(const NormalizedGvas& g, int x, Int c_max, const OracleBudget& budget) {
  return reach_pairs_form(g, SymbolString{Symbol::nt(x)}, c_max, budget);
}

ExtValue max_reached(const std::vector<ReachPair>& pairs, Int n) {
  ExtValue best = ExtValue::neg_inf();
  for (const auto& p : pairs)
    if (p.c <= n) best = max(best, ExtValue(p.d));
  return best;
}

}  // namespace gvas::oracle

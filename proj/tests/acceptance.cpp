// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.  Every bound and time limit is a named constant below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "gvas/cover.hpp"
#include "gvas/displacement.hpp"
#include "gvas/oracle.hpp"
#include "gvas/reduction.hpp"
#include "gvas/summary.hpp"
#include "gvas/thin.hpp"
#include "hilbert_oracle.hpp"
#include "presburger_oracle.hpp"
#include "vas2_oracle.hpp"

using namespace gvas;

namespace {

using Clock = std::chrono::steady_clock;
using Box = std::set<std::pair<Int, Int>>;

constexpr double kMulSummarySeconds = 5.0;
constexpr Int kMulSummaryMaxN = 50;
constexpr double kMulRelationSeconds = 10.0;
constexpr Int kRelationBox = 10;
constexpr Int kAckMaxN = 20;
constexpr Int kAckWordLen = 50;
constexpr Int kAckRatioMaxC = 200;
constexpr Int kAckCounterCap = 260;
constexpr int kFdGrammars = 200;
constexpr Int kFdTail = 10;
constexpr int kWordPairs = 500;
constexpr Int kWordPairMaxN = 8;
constexpr int kVasGraphs = 100;
constexpr int kVasCycles = 50;
constexpr Int kVasBox = 8;
constexpr double kVasSeconds = 60.0;
constexpr int kFormulas = 500;
constexpr int kHilbertSystems = 100;
constexpr double kCoverSeconds = 120.0;
constexpr Int kCoverWitnessLen = 30;
constexpr Int kRefuteLen = 40;
constexpr int kMinMutations = 1000;
constexpr double kMutationSoundRate = 0.99;
constexpr Int kMutantOracleLen = 60;
constexpr Int kCertOracleLen = 40;
constexpr int kReplayGrammars = 100;
constexpr Int kReplayMaxN = 5;
constexpr Int kReplayLen = 40;
constexpr Int kReplayRetryLen = 120;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class... Ts>
std::string cat(const Ts&... xs) {
  std::ostringstream os;
  (os << ... << xs);
  return os.str();
}

oracle::OracleBudget budget(Int len, Int counter = 0) { return {len, counter, 50'000'000}; }

Box box_of(const SemilinearSet& s, Int n) {
  Box out;
  for (const auto& p : points_in_box(s, n)) out.insert({p[0], p[1]});
  return out;
}

Box oracle_box(const NormalizedGvas& g, int x, Int n, Int max_len) {
  Box out;
  for (const auto& p : oracle::reach_pairs(g, x, n, budget(max_len)))
    if (p.d <= n) out.insert({p.c, p.d});
  return out;
}

std::optional<NormalizedGvas> try_normalized(const std::string& text) {
  auto r = normalize(parse_text(text));
  if (std::holds_alternative<EmptyLanguage>(r)) return std::nullopt;
  return std::get<NormalizedGvas>(std::move(r));
}

Outcome mul_summary() {
  auto t0 = Clock::now();
  auto g = normalized(corpus::kMul);
  auto rs = ratio_and_summary(g, 0);
  if (!rs.summary) return {false, "no summary"};
  for (Int n = 0; n <= kMulSummaryMaxN; ++n)
    if ((*rs.summary)(n) != ExtValue(2 * n)) return {false, cat("sigma(", n, ") = ", (*rs.summary)(n))};
  const double secs = since(t0);
  auto pairs = oracle::reach_pairs(g, 0, kRelationBox, budget(kRefuteLen));
  for (Int n = 0; n <= kRelationBox; ++n)
    if (oracle::max_reached(pairs, n) != ExtValue(2 * n)) return {false, cat("oracle disagrees at ", n)};
  return {secs < kMulSummarySeconds, cat("sigma(n) = 2n on [0,", kMulSummaryMaxN, "], ", secs, " s")};
}

Outcome mul_relation() {
  auto t0 = Clock::now();
  auto rel = thin::step_relation(thin::to_simple(normalized(corpus::kMul)), 0);
  const double secs = since(t0);
  Box want;
  for (Int c = 0; c <= kRelationBox; ++c)
    for (Int d = c; d <= std::min(kRelationBox, 2 * c); ++d) want.insert({c, d});
  if (box_of(rel, kRelationBox) != want) return {false, "relation differs from c <= d <= 2c"};
  return {secs < kMulRelationSeconds, cat("exact on [0,", kRelationBox, "]^2, ", secs, " s")};
}

Outcome mul_ratio() {
  auto g = normalized(corpus::kMul);
  auto dt = displacement_table(g);
  if (!dt[0].is_pos_inf()) return {false, cat("delta = ", dt[0])};
  RatioAnalyzer an(g);
  auto r = an.ratio(0);
  bool ok = r.finite && r.lambda_num == 2 && r.lambda_den == 1;
  return {ok, cat("delta = +inf, ratio ", to_string(r))};
}

Outcome ackermann() {
  auto g = normalized(corpus::kAck1);
  RatioAnalyzer an(g);
  for (const char* name : {"X0", "X1"}) {
    const int x = g.grammar().find(name);
    const Int offset = x == g.grammar().find("X0") ? 1 : 2;
    auto s = an.summary(x);
    if (!s) return {false, cat(name, ": no summary")};
    auto pairs = oracle::reach_pairs(g, x, kAckMaxN, budget(kAckWordLen));
    for (Int n = 0; n <= kAckMaxN; ++n) {
      if ((*s)(n) != ExtValue(n + offset)) return {false, cat(name, ": sigma(", n, ") = ", (*s)(n))};
      if (oracle::max_reached(pairs, n) != (*s)(n)) return {false, cat(name, ": oracle disagrees at ", n)};
    }
    auto r = an.ratio(x);
    if (!r.finite || r.lambda_num != 1 || r.lambda_den != 1) return {false, cat(name, ": ratio ", to_string(r))};
    // The bound d <= lambda c + b holds on every observed pair and is tight.
    for (const auto& p : oracle::reach_pairs(g, x, kAckRatioMaxC, budget(kAckWordLen, kAckCounterCap)))
      if (p.d * r.lambda_den > r.lambda_num * p.c + r.b * r.lambda_den)
        return {false, cat(name, ": pair (", p.c, ",", p.d, ") above the ratio bound")};
    for (Int n = 0; n <= kAckRatioMaxC; ++n)
      if ((*s)(n) != ExtValue(n + r.b)) return {false, cat(name, ": bound not tight at ", n)};
  }
  return {true, "sigma_X0 = n+1, sigma_X1 = n+2, ratios 1 and 1"};
}

Outcome finite_displacement() {
  std::mt19937_64 rng(11);
  int accepted = 0, attempts = 0;
  while (accepted < kFdGrammars && attempts < 100 * kFdGrammars) {
    ++attempts;
    auto text = corpus::random_grammar(rng, 1 + attempts % 3, 3, 3);
    auto g = try_normalized(text);
    if (!g) continue;
    const int s = g->grammar().start;
    auto dt = displacement_table(*g);
    if (!dt[s].is_finite()) continue;
    ++accepted;
    const Int big_d = g->elementary_bound();
    const Int delta = dt[s].value();
    auto f = summary_finite_displacement(*g, s, dt);
    for (Int n = big_d; n <= big_d + kFdTail; ++n)
      if (f(n) != ExtValue(n + delta)) return {false, cat("tail law fails for\n", text)};
    auto pairs = oracle::reach_pairs(*g, s, big_d + kFdTail, budget(kRefuteLen));
    for (Int n = 0; n <= big_d + kFdTail; ++n)
      if (oracle::max_reached(pairs, n) > f(n)) return {false, cat("oracle above sigma at ", n, " for\n", text)};
  }
  return {accepted == kFdGrammars, cat(accepted, " grammars, ", attempts, " drawn")};
}

Outcome composition() {
  std::mt19937_64 rng(12);
  struct Entry {
    NormalizedGvas g;
    std::unique_ptr<RatioAnalyzer> an;
    std::vector<Symbol> alphabet;
  };
  std::vector<Entry> entries;
  for (const auto& text : corpus::all()) {
    Entry e{normalized(text), nullptr, {Symbol::t(-1), Symbol::t(0), Symbol::t(1)}};
    e.an = std::make_unique<RatioAnalyzer>(e.g);
    for (int x = 0; x < static_cast<int>(e.g.size()); ++x)
      if (e.an->ratio(x).finite) e.alphabet.push_back(Symbol::nt(x));
    entries.push_back(std::move(e));
  }
  int checked = 0, oracle_exact = 0;
  for (int i = 0; i < kWordPairs; ++i) {
    auto& e = entries[static_cast<std::size_t>(i) % entries.size()];
    SummaryLookup look = [&](int x) { return *e.an->summary(x); };
    auto draw = [&] {
      SymbolString w(rng() % 4);
      for (auto& s : w) s = e.alphabet[rng() % e.alphabet.size()];
      return w;
    };
    SymbolString u = draw(), v = draw(), uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    auto fu = word_summary(u, look), fv = word_summary(v, look), fuv = word_summary(uv, look);
    auto pairs = oracle::reach_pairs_form(e.g, uv, kWordPairMaxN, budget(kCoverWitnessLen));
    for (Int n = 0; n <= kWordPairMaxN; ++n) {
      if (fuv(n) != fv(fu(n))) return {false, cat("composition fails at pair ", i, " n=", n)};
      auto seen = oracle::max_reached(pairs, n);
      if (seen > fuv(n)) return {false, cat("oracle above sigma at pair ", i, " n=", n)};
      oracle_exact += seen == fuv(n);
    }
    ++checked;
  }
  return {checked == kWordPairs, cat(checked, " pairs, oracle exact on ", oracle_exact, " points")};
}

Outcome vas2_saturation() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int stable = 0;
  for (int t = 0; t < kVasGraphs; ++t) {
    auto g = vas2_oracle::random_graph(rng, 4, 8);
    auto sol = vas2::reach_relations(g);
    if (!sol.stable) return {false, cat("graph ", t, " not stable: ", sol.diagnostics)};
    ++stable;
    auto brute = vas2_oracle::brute_reach(g, kVasBox, 40);
    for (int q = 0; q < g.states; ++q)
      if (vas2_oracle::as_set(points_in_box(sol.per_state[static_cast<std::size_t>(q)], kVasBox)) !=
          brute[static_cast<std::size_t>(q)])
        return {false, cat("graph ", t, " state ", q, " differs")};
  }
  const double secs = since(t0);
  for (int t = 0; t < kVasCycles; ++t) {
    std::vector<vas2::Action> w(1 + rng() % 4);
    for (auto& a : w) a = vas2_oracle::random_action(rng);
    if (vas2_oracle::as_set(points_in_box(vas2::cycle_star(w), kVasBox)) != vas2_oracle::brute_cycle(w, kVasBox, 8))
      return {false, cat("cycle ", t, " differs")};
  }
  return {secs < kVasSeconds, cat(stable, " graphs stable and exact, ", kVasCycles, " cycles, ", secs, " s")};
}

Outcome presburger_and_hilbert() {
  using namespace pres_oracle;
  std::mt19937_64 rng(2024);
  int frees[3] = {fresh_var("a"), fresh_var("b"), fresh_var("c")};
  for (int iter = 0; iter < kFormulas; ++iter) {
    const int nfree = 1 + iter % 3;
    Gen gen{rng, std::vector<int>(frees, frees + nfree), 6};
    Formula f = gen.gen(3, 2);
    Formula q = eliminate(f);
    Assignment env;
    for (long a = -3; a <= 3; a += 2)
      for (long b = -3; b <= 3; b += 3) {
        env[frees[0]] = a;
        env[frees[1]] = b;
        env[frees[2]] = a - b;
        if (evaluate(q, env) != eval_boxed(f, env, -6, 6)) return {false, cat("formula ", iter, ": ", to_string(f))};
      }
  }
  std::uniform_int_distribution<Int> coef(-3, 3);
  for (int iter = 0; iter < kHilbertSystems; ++iter) {
    const bool single = iter % 2 == 0;
    Matrix a(single ? 1 : 2, Vec(single ? 4 : 3));
    for (auto& row : a)
      for (auto& x : row) x = coef(rng);
    auto hb = hilbert_basis(a, std::vector<Rel>(a.size(), Rel::Eq));
    if (std::set<Vec>(hb.begin(), hb.end()) != hilbert_oracle::brute_hilbert(a))
      return {false, cat("Hilbert system ", iter, " differs")};
  }
  return {true, cat(kFormulas, " formulas, ", kHilbertSystems, " Hilbert systems")};
}

Outcome thin_completeness() {
  struct Case {
    NormalizedGvas g;
    Int max_len;
  };
  std::vector<Case> cases;
  for (const auto& c : corpus::thin()) cases.push_back({normalized(c.text), static_cast<Int>(c.max_len)});
  cases.push_back({thin::to_simple(normalized(corpus::kMul)), 60});
  cases.push_back({normalized(corpus::kIdent), 30});
  cases.push_back({reduce_to_thin(normalized(corpus::kAck1)).grammar, 30});
  int relations = 0;
  for (const auto& c : cases) {
    auto simple = thin::to_simple(c.g);
    thin::StepRelations rel(simple);
    for (int x = 0; x < static_cast<int>(c.g.size()); ++x) {
      if (box_of(rel.of(x), kRelationBox) != oracle_box(c.g, x, kRelationBox, c.max_len))
        return {false, cat("relation of ", c.g.name(x), " differs in\n", to_text(c.g.grammar()))};
      ++relations;
    }
  }
  return {true, cat(relations, " relations exact on [0,", kRelationBox, "]^2")};
}

struct Instance {
  const char* text;
  const char* x;
  Int c, d;
  bool covered;
};

const char* const kAB = "S -> A B\nA -> -1 A 1 1 | eps\nB -> -1 | 0";
const char* const kST = "S -> -1 T\nT -> 1 1 | -1 S 1";
const char* const kUp = "S -> 1 1 S | eps";
const char* const kSS = "S -> S S | -1 1 1 | 0";

const std::vector<Instance>& instances() {
  static const std::vector<Instance> v{
      {corpus::kMul, "S", 2, 4, true},       {corpus::kMul, "S", 3, 6, true},
      {corpus::kMul, "S", 1, 2, true},       {corpus::kMul, "S", 5, 10, true},
      {corpus::kExp, "T", 1, 1'000'000, true}, {corpus::kExp, "T", 1, 8, true},
      {corpus::kExp, "T", 2, 8, true},       {corpus::kExp, "T", 3, 12, true},
      {corpus::kAck1, "X1", 3, 5, true},     {corpus::kAck1, "X1", 0, 2, true},
      {corpus::kAck1, "X0", 4, 5, true},     {corpus::kAck2, "X2", 1, 5, true},
      {corpus::kAck2, "X2", 2, 7, true},     {corpus::kIdent, "S", 4, 4, true},
      {corpus::kTwoRules, "S", 2, 3, true},  {corpus::kDown, "S", 0, 1, true},
      {corpus::kDown, "S", 3, 4, true},      {kUp, "S", 0, 10, true},
      {kSS, "S", 1, 6, true},                {kAB, "S", 2, 3, true},

      {corpus::kMul, "S", 2, 5, false},      {corpus::kMul, "S", 0, 1, false},
      {corpus::kMul, "S", 3, 7, false},      {corpus::kMul, "S", 10, 21, false},
      {corpus::kAck1, "X1", 3, 6, false},    {corpus::kAck1, "X0", 4, 6, false},
      {corpus::kAck1, "X1", 0, 3, false},    {corpus::kAck2, "X2", 1, 6, false},
      {corpus::kAck2, "X2", 2, 8, false},    {corpus::kAck2, "X2", 0, 4, false},
      {corpus::kIdent, "S", 4, 5, false},    {corpus::kIdent, "S", 0, 1, false},
      {corpus::kTwoRules, "S", 1, 2, false}, {corpus::kTwoRules, "S", 2, 4, false},
      {corpus::kTwoRules, "S", 0, 1, false}, {corpus::kDown, "S", 0, 2, false},
      {corpus::kDown, "S", 3, 5, false},     {kAB, "S", 2, 5, false},
      {kST, "S", 0, 1, false},               {kST, "S", 3, 5, false}};
  return v;
}

Outcome cover_instances() {
  auto t0 = Clock::now();
  int covered = 0, refuted = 0, certs = 0;
  for (const auto& in : instances()) {
    auto where = cat(in.x, " ", in.c, " -> ", in.d, " in ", in.text);
    auto ng = normalized(in.text);
    const int x = ng.grammar().find(in.x);
    // Ground truth: a short oracle witness for covered instances (the
    // 10^6 target is far beyond any word budget), none for the others.
    auto pairs = oracle::reach_pairs(ng, x, in.c, budget(in.covered ? kCoverWitnessLen : kRefuteLen));
    const bool seen = oracle::max_reached(pairs, in.c) >= ExtValue(in.d);
    if (in.covered && in.d < 1000 && !seen) return {false, "no oracle witness: " + where};
    if (!in.covered && seen) return {false, "oracle refutes expectation: " + where};

    auto v = decide_cover(parse_text(in.text), in.x, in.c, in.d);
    const bool want = in.covered;
    if (v.kind != (want ? CoverVerdict::Kind::Covered : CoverVerdict::Kind::NotCovered))
      return {false, cat("verdict ", to_string(v.kind), ": ", where)};
    if (want) {
      ++covered;
      if (v.certificate) {
        Analyses an(ng);
        auto back = certificate_from_json(ng, to_json(ng, *v.certificate));
        if (!certifies(an, back, x, in.c, in.d)) return {false, "certificate rejected: " + where};
        ++certs;
      } else if (!v.word || oracle::run_word(in.c, *v.word) < ExtValue(in.d)) {
        return {false, "no valid evidence: " + where};
      }
    } else {
      ++refuted;
    }
  }
  const double secs = since(t0);
  return {secs < kCoverSeconds && covered == 20 && refuted == 20,
          cat(covered, " covered (", certs, " certificates), ", refuted, " not covered, ", secs, " s")};
}

bool has_infinite_leaf(Analyses& an, const CertNode& t) {
  if (t.kind == CertNode::Kind::NonTerminal && !t.rule && !an.finite_ratio(static_cast<int>(t.value))) return true;
  for (const auto& ch : t.children)
    if (has_infinite_leaf(an, ch)) return true;
  return false;
}

std::vector<CertNode*> all_nodes(CertNode& t) {
  std::vector<CertNode*> out{&t};
  for (auto& ch : t.children) {
    auto sub = all_nodes(ch);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

bool oracle_covers(const NormalizedGvas& g, int s, Int in, Int out, Int len) {
  return oracle::max_reached(oracle::reach_pairs(g, s, in, budget(len)), in) >= ExtValue(out);
}

Outcome certificates() {
  std::mt19937_64 rng(13);
  int certs = 0, plain = 0, mutations = 0, sound = 0;
  while (mutations < kMinMutations) {
    for (const auto& text : corpus::all()) {
      auto g = normalized(text);
      Analyses an(g);
      for (int x = 0; x < static_cast<int>(g.size()); ++x)
        for (Int c = 0; c <= 3; ++c)
          for (Int d : {1, 3, 6}) {
            auto cert = find_certificate(an, x, c, d);
            if (!cert) continue;
            ++certs;
            if (!check_certificate(an, *cert)) return {false, cat("certificate fails re-validation in ", text)};
            if (!has_infinite_leaf(an, cert->root)) {
              ++plain;
              if (!oracle_covers(g, x, cert->root.in, cert->root.out, kCertOracleLen))
                return {false, cat("no oracle witness for a summary-only certificate in ", text)};
            }
            for (int m = 0; m < 8; ++m) {
              ++mutations;
              Certificate mut = *cert;
              auto nodes = all_nodes(mut.root);
              CertNode* t = nodes[rng() % nodes.size()];
              switch (rng() % 4) {
                case 0: t->in += (rng() % 2) ? 1 : -1; break;
                case 1: t->out += (rng() % 2) ? 1 : -1; break;
                case 2:
                  if (t->kind == CertNode::Kind::NonTerminal) t->value = static_cast<Int>(rng() % g.size());
                  else t->value = -t->value;
                  break;
                default:
                  if (t->children.size() >= 2) std::swap(t->children.front(), t->children.back());
                  else t->out += 1;
              }
              bool ok = false;
              try {
                ok = check_certificate(an, mut);
              } catch (const MalformedCertificate&) {
              }
              if (!ok || mut.root.kind != CertNode::Kind::NonTerminal ||
                  oracle_covers(g, static_cast<int>(mut.root.value), mut.root.in, mut.root.out, kMutantOracleLen))
                ++sound;
            }
          }
    }
  }
  const double rate = static_cast<double>(sound) / mutations;
  return {rate >= kMutationSoundRate,
          cat(certs, " certificates (", plain, " summary-only), ", mutations, " mutations, ", rate * 100, "% sound")};
}

Outcome replay_log() {
  std::mt19937_64 rng(14);
  vas2::AccelCaps caps;
  caps.max_rounds = caps.max_scheme_len = 10;
  int grammars = 0, compared = 0, retried = 0;
  while (grammars < kReplayGrammars) {
    auto text = corpus::random_grammar(rng, 3, 3, 3);
    auto g = try_normalized(text);
    if (!g) continue;
    ++grammars;
    auto red = reduce_to_thin(*g);
    auto back = equivalence_log_from_json(to_json(red.log));
    auto rep = replay(*g, back);
    if (to_text(rep.grammar()) != to_text(red.grammar.grammar())) return {false, "replay differs for\n" + text};
    RatioAnalyzer before(*g, caps), after(rep, caps);
    for (int x = 0; x < static_cast<int>(g->size()); ++x) {
      const bool finite = before.ratio(x).finite;
      if (finite != after.ratio(x).finite) return {false, cat("ratio class of ", g->name(x), " changes in\n", text)};
      if (!finite) continue;
      auto agree = [&](Int len) {
        auto p = oracle::reach_pairs(*g, x, kReplayMaxN, budget(len));
        auto q = oracle::reach_pairs(rep, x, kReplayMaxN, budget(len));
        for (Int n = 0; n <= kReplayMaxN; ++n)
          if (oracle::max_reached(p, n) != oracle::max_reached(q, n)) return false;
        return true;
      };
      if (!agree(kReplayLen)) {
        ++retried;
        if (!agree(kReplayRetryLen)) return {false, cat("summaries of ", g->name(x), " differ in\n", text)};
      }
      ++compared;
    }
  }
  return {true, cat(grammars, " grammars, ", compared, " summaries compared, ", retried, " retried")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"multiplication summary", mul_summary},
      {"multiplication step relation", mul_relation},
      {"multiplication displacement and ratio", mul_ratio},
      {"Ackermann levels 0 and 1", ackermann},
      {"finite-displacement tail law", finite_displacement},
      {"word summary composition", composition},
      {"2-VASS saturation", vas2_saturation},
      {"Presburger elimination and Hilbert bases", presburger_and_hilbert},
      {"thin step relations", thin_completeness},
      {"cover decisions", cover_instances},
      {"certificate soundness", certificates},
      {"reduction log replay", replay_log},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %-42s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}

// gvasc: command-line front end.  Exit status 0 on a completed analysis
// (NOT COVERED included), 1 when a bound or cap was exhausted, 2 on usage or
// input errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gvas/cover.hpp"
#include "gvas/displacement.hpp"
#include "gvas/oracle.hpp"
#include "gvas/reduction.hpp"
#include "json.hpp"

using namespace gvas;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kExhausted = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string path;
  std::string start;
  std::string nonterminal;
  Int from = 0;
  Int to = 0;
  Int input = 0;
  int accel_cap = 6;
  int cert_height = 8;
  Int cert_value = Int{1} << 40;
  Int fixpoint_cap = 4096;
  Int max_len = 40;
  Int cmax = 5;
  Int upto = 5;
  bool json = false;
  std::string dot;
  // oracle
  bool pairs = false;
  bool words = false;
  // cert check / member
  std::string cert_path;
  std::string relation_path;
  bool has_from = false;
  bool has_to = false;
};

// GVASC_CAPS="accel=8,height=10,value=1000000,fixpoint=4096,max-len=60,cmax=5"
void apply_env(Config& cfg) {
  const char* env = std::getenv("GVASC_CAPS");
  if (!env) return;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("GVASC_CAPS: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    Int v = 0;
    try {
      v = std::stoll(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("GVASC_CAPS: bad number in '" + item + "'");
    }
    if (v <= 0) throw UsageError("GVASC_CAPS: " + key + " must be positive");
    if (key == "accel") cfg.accel_cap = static_cast<int>(v);
    else if (key == "height") cfg.cert_height = static_cast<int>(v);
    else if (key == "value") cfg.cert_value = v;
    else if (key == "fixpoint") cfg.fixpoint_cap = v;
    else if (key == "max-len") cfg.max_len = v;
    else if (key == "cmax") cfg.cmax = v;
    else throw UsageError("GVASC_CAPS: unknown key '" + key + "'");
  }
}

std::string read_all(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

Gvas load(const Config& cfg) {
  Gvas g = parse_text(read_all(cfg.path));
  if (!cfg.start.empty()) {
    int s = g.find(cfg.start);
    if (s < 0) throw UsageError("unknown start nonterminal " + cfg.start);
    g.start = s;
  }
  return g;
}

NormalizedGvas load_normalized(const Config& cfg) {
  auto r = normalize(load(cfg));
  if (std::holds_alternative<EmptyLanguage>(r)) throw UsageError("the start nonterminal generates no word");
  return std::get<NormalizedGvas>(std::move(r));
}

std::string target(const Config& cfg, const Gvas& g) {
  return cfg.nonterminal.empty() ? g.nonterminals[static_cast<std::size_t>(g.start)] : cfg.nonterminal;
}

int target_index(const Config& cfg, const NormalizedGvas& g) {
  const std::string name = target(cfg, g.grammar());
  int x = g.grammar().find(name);
  if (x < 0) throw UsageError("unknown or unproductive nonterminal " + name);
  return x;
}

vas2::AccelCaps accel(const Config& cfg) {
  vas2::AccelCaps caps;
  caps.max_scheme_len = cfg.accel_cap;
  caps.max_rounds = cfg.accel_cap;
  return caps;
}

CoverBounds bounds(const Config& cfg) { return {cfg.cert_height, cfg.cert_value, cfg.fixpoint_cap}; }

json ext_json(const ExtValue& v) { return v.is_finite() ? json(v.value()) : json(v.to_string()); }

json ratio_json(const RatioResult& r) {
  if (!r.finite) return {{"finite", false}};
  return {{"finite", true},
          {"lambda", std::to_string(r.lambda_num) + "/" + std::to_string(r.lambda_den)},
          {"b", r.b}};
}

std::string word_text(const Word& w) {
  if (w.empty()) return "eps";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::to_string(w[i]);
  return s;
}

void write_dot(const Config& cfg, const NormalizedGvas& g, const Certificate& cert) {
  if (cfg.dot.empty()) return;
  std::ofstream out(cfg.dot);
  if (!out) throw UsageError("cannot write " + cfg.dot);
  out << to_dot(g, cert);
}

void print_tree(const NormalizedGvas& g, const CertNode& t, int depth) {
  std::cout << std::string(static_cast<std::size_t>(2 * depth), ' ');
  switch (t.kind) {
    case CertNode::Kind::Terminal: std::cout << t.value; break;
    case CertNode::Kind::Epsilon: std::cout << "eps"; break;
    case CertNode::Kind::NonTerminal: std::cout << g.name(static_cast<int>(t.value)); break;
  }
  std::cout << " (" << t.in << " -> " << t.out << ")";
  if (t.kind == CertNode::Kind::NonTerminal && !t.rule) std::cout << " leaf";
  std::cout << '\n';
  for (const auto& ch : t.children) print_tree(g, ch, depth + 1);
}

int cmd_check(const Config& cfg) {
  Gvas raw = load(cfg);
  auto r = normalize(raw);
  if (std::holds_alternative<EmptyLanguage>(r)) {
    if (cfg.json)
      std::cout << json{{"empty", true}}.dump(2) << '\n';
    else
      std::cout << "empty language\n";
    return kOk;
  }
  const auto& g = std::get<NormalizedGvas>(r);
  auto rep = structural_report(g);
  if (cfg.json) {
    json j{{"empty", false},
           {"start", g.name(g.grammar().start)},
           {"nonterminals", g.grammar().nonterminals},
           {"rules", g.grammar().rules.size()},
           {"degree", rep.degree},
           {"thin", rep.is_thin},
           {"simple", rep.is_simple},
           {"normalized", to_text(g.grammar())}};
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "start: " << g.name(g.grammar().start) << '\n'
            << "nonterminals: " << g.size() << '\n'
            << "rules: " << g.grammar().rules.size() << '\n'
            << "degree: " << rep.degree << '\n'
            << "thin: " << (rep.is_thin ? "yes" : "no") << '\n'
            << "simple: " << (rep.is_simple ? "yes" : "no") << '\n'
            << to_text(g.grammar());
  return kOk;
}

int cmd_analyze(const Config& cfg) {
  auto g = load_normalized(cfg);
  auto dt = displacement_table(g);
  RatioAnalyzer an(g, accel(cfg));
  int status = kOk;
  json j;
  for (int x = 0; x < static_cast<int>(g.size()); ++x) {
    json e{{"displacement", ext_json(dt[x])}};
    std::string ratio_text, sigma_text;
    try {
      RatioResult r = an.ratio(x);
      e["ratio"] = ratio_json(r);
      ratio_text = to_string(r);
      if (r.finite) {
        auto s = *an.summary(x);
        json sig = json::array();
        for (Int n = 0; n <= cfg.upto; ++n) {
          sig.push_back(ext_json(s(n)));
          sigma_text += (n ? " " : "") + s(n).to_string();
        }
        e["sigma"] = sig;
      }
    } catch (const thin::KernelCapExhausted& ex) {
      e["ratio"] = "unknown";
      ratio_text = std::string("unknown (") + ex.what() + ")";
      status = kExhausted;
    }
    if (cfg.json) {
      j[g.name(x)] = e;
    } else {
      std::cout << g.name(x) << "  delta=" << dt[x].to_string() << "  ratio=" << ratio_text;
      if (!sigma_text.empty()) std::cout << "  sigma(0.." << cfg.upto << ")=" << sigma_text;
      std::cout << '\n';
    }
  }
  if (cfg.json) std::cout << j.dump(2) << '\n';
  return status;
}

int cmd_cover(const Config& cfg) {
  Gvas raw = load(cfg);
  const std::string s = target(cfg, raw);
  auto v = decide_cover(raw, s, cfg.from, cfg.to, bounds(cfg), accel(cfg));
  const char* verdict = v.kind == CoverVerdict::Kind::Covered      ? "COVERED"
                        : v.kind == CoverVerdict::Kind::NotCovered ? "NOT COVERED"
                                                                   : "UNKNOWN";
  std::optional<NormalizedGvas> ng;
  if (v.certificate) ng = load_normalized(cfg);
  if (cfg.json) {
    json j{{"verdict", to_string(v.kind)}, {"method", v.method}, {"detail", v.detail}};
    j["certificate"] = v.certificate ? json::parse(to_json(*ng, *v.certificate)) : json(nullptr);
    j["word"] = v.word ? json(*v.word) : json(nullptr);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << verdict << '\n';
    if (!v.method.empty()) std::cerr << "method: " << v.method << '\n';
    if (!v.detail.empty()) std::cerr << v.detail << '\n';
  }
  if (v.certificate) write_dot(cfg, *ng, *v.certificate);
  return v.kind == CoverVerdict::Kind::Unknown ? kExhausted : kOk;
}

int cmd_summary(const Config& cfg) {
  Gvas raw = load(cfg);
  const std::string s = target(cfg, raw);
  auto r = max_cover(raw, s, cfg.input, bounds(cfg), accel(cfg));
  if (cfg.json) {
    json j{{"nonterminal", s}, {"input", cfg.input}};
    j["value"] = r.value ? ext_json(*r.value) : json("unknown");
    j["method"] = r.method;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << (r.value ? r.value->to_string() : "unknown") << '\n';
    if (!r.detail.empty()) std::cerr << r.detail << '\n';
  }
  return r.value ? kOk : kExhausted;
}

int cmd_relation(const Config& cfg) {
  auto g = load_normalized(cfg);
  RatioAnalyzer an(g, accel(cfg));
  const auto& rel = an.relation(target_index(cfg, g));
  if (cfg.json) {
    std::cout << to_json(rel) << '\n';
    return kOk;
  }
  for (const auto& c : rel.components) {
    std::cout << "(" << c.base[0] << "," << c.base[1] << ")";
    for (const auto& p : c.periods) std::cout << " + N(" << p[0] << "," << p[1] << ")";
    std::cout << '\n';
  }
  return kOk;
}

int cmd_member(const Config& cfg) {
  auto rel = semilinear_from_json(read_all(cfg.relation_path));
  bool in = member(rel, Vec{cfg.from, cfg.to});
  if (cfg.json)
    std::cout << json{{"member", in}}.dump(2) << '\n';
  else
    std::cout << (in ? "yes" : "no") << '\n';
  return kOk;
}

int cmd_oracle(const Config& cfg) {
  auto g = load_normalized(cfg);
  const int x = target_index(cfg, g);
  if (cfg.words) {
    auto ws = oracle::enumerate_words(g, x, static_cast<std::size_t>(cfg.max_len));
    if (cfg.json) {
      std::cout << json(ws).dump() << '\n';
    } else {
      for (const auto& w : ws) std::cout << word_text(w) << '\n';
    }
    return kOk;
  }
  auto pairs = oracle::reach_pairs(g, x, cfg.cmax, {cfg.max_len, 0, 20'000'000});
  if (cfg.json) {
    json j = json::array();
    for (const auto& p : pairs) j.push_back({{"c", p.c}, {"d", p.d}, {"witness", p.witness}});
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) std::cout << (i ? " " : "") << "(" << pairs[i].c << "," << pairs[i].d << ")";
  std::cout << '\n';
  return kOk;
}

int cmd_cert_find(const Config& cfg) {
  auto g = load_normalized(cfg);
  const int x = target_index(cfg, g);
  Analyses an(g, accel(cfg));
  auto cert = find_certificate(an, x, cfg.from, cfg.to, bounds(cfg));
  if (!cert) {
    std::cerr << "no certificate of height <= " << cfg.cert_height << '\n';
    return kExhausted;
  }
  if (cfg.json)
    std::cout << to_json(g, *cert) << '\n';
  else
    print_tree(g, cert->root, 0);
  write_dot(cfg, g, *cert);
  return kOk;
}

int cmd_cert_check(const Config& cfg) {
  auto g = load_normalized(cfg);
  Certificate cert = certificate_from_json(g, read_all(cfg.cert_path));
  Analyses an(g, accel(cfg));
  bool ok = false;
  std::string why;
  try {
    ok = check_certificate(an, cert);
    if (!ok) why = "flow conditions fail";
  } catch (const MalformedCertificate& e) {
    why = std::string("malformed: ") + e.what();
  }
  if (ok && (cfg.has_from || cfg.has_to || !cfg.nonterminal.empty())) {
    const int x = target_index(cfg, g);
    const Int c = cfg.has_from ? cfg.from : cert.root.in;
    const Int d = cfg.has_to ? cfg.to : cert.root.out;
    ok = certifies(an, cert, x, c, d);
    if (!ok) why = "root does not certify the requested instance";
  }
  if (cfg.json)
    std::cout << json{{"valid", ok}, {"reason", why}}.dump(2) << '\n';
  else
    std::cout << (ok ? "VALID" : "INVALID: " + why) << '\n';
  write_dot(cfg, g, cert);
  return ok ? kOk : kExhausted;
}

int cmd_reduce(const Config& cfg) {
  auto g = load_normalized(cfg);
  auto red = reduce_to_thin(g);
  if (cfg.json) {
    json j{{"grammar", to_text(red.grammar.grammar())}, {"log", json::parse(to_json(red.log))}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << to_text(red.grammar.grammar());
    for (const auto& e : red.log.entries) std::cerr << e.kind << " " << e.target << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverability and summaries for one-counter grammar-controlled VAS"};
  app.require_subcommand(1);
  Config cfg;
  int (*run)(const Config&) = nullptr;

  auto grammar_arg = [&](CLI::App* sub) { sub->add_option("grammar", cfg.path, "grammar file, - for stdin")->required(); };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--start", cfg.start, "override the start nonterminal");
    sub->add_flag("--json", cfg.json, "JSON output");
  };
  auto caps = [&](CLI::App* sub) {
    sub->add_option("--accel-cap", cfg.accel_cap, "2-VAS acceleration rounds and scheme length")
        ->check(CLI::PositiveNumber);
  };
  auto target_opt = [&](CLI::App* sub) { sub->add_option("-X,--nonterminal", cfg.nonterminal, "nonterminal (default: start)"); };
  auto cert_opts = [&](CLI::App* sub) {
    sub->add_option("--cert-height", cfg.cert_height, "certificate height bound")->check(CLI::PositiveNumber);
    sub->add_option("--cert-value", cfg.cert_value, "certificate counter bound")->check(CLI::PositiveNumber);
    sub->add_option("--dot", cfg.dot, "write the certificate as DOT");
  };
  auto from_to = [&](CLI::App* sub, bool required) {
    auto* f = sub->add_option("--from", cfg.from, "counter value c")->check(CLI::NonNegativeNumber);
    auto* t = sub->add_option("--to", cfg.to, "target value d")->check(CLI::NonNegativeNumber);
    if (required) {
      f->required();
      t->required();
    }
  };

  auto* check = app.add_subcommand("check", "parse, normalize and report structure");
  grammar_arg(check);
  common(check);
  check->callback([&] { run = cmd_check; });

  auto* analyze = app.add_subcommand("analyze", "displacement, ratio and summary table");
  grammar_arg(analyze);
  common(analyze);
  caps(analyze);
  analyze->add_option("--upto", cfg.upto, "summary values sigma(0..n)")->check(CLI::NonNegativeNumber);
  analyze->callback([&] { run = cmd_analyze; });

  auto* cover = app.add_subcommand("cover", "decide whether the start covers --to from --from");
  grammar_arg(cover);
  common(cover);
  caps(cover);
  target_opt(cover);
  cert_opts(cover);
  from_to(cover, true);
  cover->callback([&] { run = cmd_cover; });

  auto* summary = app.add_subcommand("summary", "sigma_X(n)");
  grammar_arg(summary);
  common(summary);
  caps(summary);
  target_opt(summary);
  cert_opts(summary);
  summary->add_option("--input", cfg.input, "n")->required()->check(CLI::NonNegativeNumber);
  summary->callback([&] { run = cmd_summary; });

  auto* relation = app.add_subcommand("relation", "step relation of X in the thin equivalent");
  grammar_arg(relation);
  common(relation);
  caps(relation);
  target_opt(relation);
  relation->callback([&] { run = cmd_relation; });

  auto* mem = app.add_subcommand("member", "membership of (--from, --to) in an exported relation");
  mem->add_option("relation", cfg.relation_path, "relation JSON, - for stdin")->required();
  mem->add_flag("--json", cfg.json, "JSON output");
  from_to(mem, true);
  mem->callback([&] { run = cmd_member; });

  auto* orc = app.add_subcommand("oracle", "brute-force words or reachable pairs");
  grammar_arg(orc);
  common(orc);
  target_opt(orc);
  orc->add_flag("--pairs", cfg.pairs, "pairs (c,d) with c <= --cmax (default)");
  orc->add_flag("--words", cfg.words, "words of length <= --max-len");
  orc->add_option("--max-len", cfg.max_len, "word length bound")->check(CLI::PositiveNumber);
  orc->add_option("--cmax", cfg.cmax, "largest start value")->check(CLI::NonNegativeNumber);
  orc->callback([&] { run = cmd_oracle; });

  auto* cert = app.add_subcommand("cert", "certificates");
  cert->require_subcommand(1);
  auto* find = cert->add_subcommand("find", "search a certificate");
  grammar_arg(find);
  common(find);
  caps(find);
  target_opt(find);
  cert_opts(find);
  from_to(find, true);
  find->callback([&] { run = cmd_cert_find; });
  auto* chk = cert->add_subcommand("check", "validate a certificate");
  grammar_arg(chk);
  chk->add_option("certificate", cfg.cert_path, "certificate JSON, - for stdin")->required();
  common(chk);
  caps(chk);
  target_opt(chk);
  chk->add_option("--dot", cfg.dot, "write the certificate as DOT");
  auto* cf = chk->add_option("--from", cfg.from, "require in(root) <= c");
  auto* ct = chk->add_option("--to", cfg.to, "require out(root) >= d");
  chk->callback([&] {
    cfg.has_from = cf->count() > 0;
    cfg.has_to = ct->count() > 0;
    run = cmd_cert_check;
  });

  auto* reduce = app.add_subcommand("reduce", "thin equivalent and transformation log");
  grammar_arg(reduce);
  common(reduce);
  reduce->callback([&] { run = cmd_reduce; });

  try {
    apply_env(cfg);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    return run(cfg);
  } catch (const ParseError& e) {
    std::cerr << "gvasc: " << cfg.path << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kUsage;
  } catch (const thin::KernelCapExhausted& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kExhausted;
  } catch (const ExpansionTooLarge& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kExhausted;
  } catch (const oracle::OracleBudgetExceeded& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kExhausted;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gvasc: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "gvasc: bad JSON: " << e.what() << '\n';
    return kUsage;
  }
}

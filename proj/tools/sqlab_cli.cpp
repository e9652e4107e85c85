#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

#include "sqlab/io.hpp"

using namespace sqlab;

namespace {

struct Config {
  std::string gen, instance, config;
  std::optional<double> tau, delta, alpha, beta, eps, theta;
  std::string oracle = "stat";
  std::vector<std::string> params;
  std::size_t trials = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> p, n, k;
  std::string kappa = "k1";
  std::vector<std::string> inputs;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Params {
 public:
  explicit Params(const std::vector<std::string>& kv) {
    for (const auto& s : kv) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw Usage("--param expects key=value, got '" + s + "'");
      map_[s.substr(0, eq)] = s.substr(eq + 1);
    }
  }
  std::string str(const std::string& key, const std::string& def) const {
    auto it = map_.find(key);
    return it == map_.end() ? def : it->second;
  }
  double num(const std::string& key, double def) const {
    auto it = map_.find(key);
    if (it == map_.end()) return def;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw Usage("--param " + key + " must be numeric");
    }
  }
  std::size_t count(const std::string& key, std::size_t def) const {
    double v = num(key, static_cast<double>(def));
    if (v < 0 || v != std::floor(v)) throw Usage("--param " + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

 private:
  std::map<std::string, std::string> map_;
};

void add_common(CLI::App* sub, Config& c) {
  auto* src = sub->add_option("--gen", c.gen, "generator: biclique | line | random");
  sub->add_option("--instance", c.instance, "problem JSON path")->excludes(src);
  sub->add_option("--tau", c.tau, "tolerance");
  sub->add_option("--delta", c.delta, "failure probability");
  sub->add_option("--alpha", c.alpha, "success probability for randomized search");
  sub->add_option("--beta", c.beta, "average-case success level");
  sub->add_option("--eps", c.eps, "accuracy");
  sub->add_option("--theta", c.theta, "verification threshold");
  sub->add_option("--oracle", c.oracle, "stat | vstat | vroot | onestat")
      ->check(CLI::IsMember({"stat", "vstat", "vroot", "onestat"}));
  sub->add_option("--param", c.params, "extra key=value settings");
  sub->add_option("--trials", c.trials, "Monte-Carlo trials");
  sub->add_option("--seed", c.seed, "base seed");
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--p", c.p, "Line_p prime");
  sub->add_option("--n", c.n, "bi-clique dimension");
  sub->add_option("--k", c.k, "bi-clique planted size");
  sub->add_option("--kappa", c.kappa, "k1 | kv")->check(CLI::IsMember({"k1", "kv"}));
  sub->add_option("--config", c.config, "JSON file with the same keys");
}

// keys set on the command line win over the config file
void apply_config(CLI::App* sub, Config& c) {
  if (c.config.empty()) return;
  json j;
  try {
    j = json::parse(read_file(c.config));
  } catch (const json::exception& e) {
    throw Usage("config " + c.config + ": " + e.what());
  }
  if (!j.is_object()) throw Usage("config must be a JSON object");
  auto unset = [&](const std::string& key) { return sub->get_option("--" + key)->count() == 0; };
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      const auto& v = it.value();
      if (key == "command") continue;
      if (key == "config" || !sub->get_option_no_throw("--" + key)) throw Usage("unknown config key '" + key + "'");
      if (!unset(key)) continue;
      if (key == "gen") c.gen = v.get<std::string>();
      else if (key == "instance") c.instance = v.get<std::string>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "eps") c.eps = v.get<double>();
      else if (key == "theta") c.theta = v.get<double>();
      else if (key == "oracle") c.oracle = v.get<std::string>();
      else if (key == "param") c.params = v.get<std::vector<std::string>>();
      else if (key == "trials") c.trials = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "p") c.p = v.get<std::size_t>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "kappa") c.kappa = v.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Usage(std::string("config value has the wrong type: ") + e.what());
  }
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw Usage(std::string("missing required ") + flag);
  return *v;
}

void emit(const Config& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
}

Kappa kappa_of(const Config& c) { return c.kappa == "kv" ? Kappa::KV : Kappa::K1; }

ProblemSpec random_decision(std::size_t x, std::size_t m, std::uint64_t seed) {
  auto dom = FiniteDomain::indexed(x);
  Rng rng(seed);
  ProblemSpec p;
  p.kind = ProblemKind::Decision;
  p.name = "random_x" + std::to_string(x) + "_m" + std::to_string(m) + "_s" + std::to_string(seed);
  p.domain = dom;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> w(x);
    double s = 0;
    for (auto& v : w) s += (v = uniform01(rng) + 1e-3);
    for (auto& v : w) v /= s;
    p.dists.emplace_back(dom, std::move(w));
  }
  p.reference = Distribution::uniform(dom);
  p.solutions = {"alternative", "reference"};
  p.validity = {std::vector<bool>(m, true), std::vector<bool>(m, false)};
  return p;
}

ProblemSpec load_problem(const Config& c, const Params& prm) {
  if (!c.instance.empty()) {
    try {
      return problem_from_json(json::parse(read_file(c.instance)));
    } catch (const json::exception& e) {
      throw Usage(c.instance + ": " + e.what());
    }
  }
  if (c.gen == "biclique") {
    auto fam = biclique_family(c.n.value_or(8), c.k.value_or(2));
    auto part = prm.str("part", "search");
    if (part == "search") return fam.search;
    if (part == "decision") return fam.decision;
    if (part == "verifiable") return fam.verifiable;
    throw Usage("biclique part must be search | decision | verifiable");
  }
  if (c.gen == "line") {
    auto m = prm.str("marginal", "uniform");
    if (m != "uniform" && m != "skewed") throw Usage("line marginal must be uniform | skewed");
    return line_family(c.p.value_or(5), m == "skewed" ? Marginal::Skewed : Marginal::Uniform, c.eps.value_or(0.1));
  }
  if (c.gen == "random") return random_decision(prm.count("x", 6), prm.count("m", 5), c.seed.value_or(0));
  if (c.gen.empty()) throw Usage("need --gen or --instance");
  throw Usage("unknown generator '" + c.gen + "'");
}

Limits limits_of(const Params& prm) {
  Limits lim;
  lim.max_lp_calls = prm.count("lp_calls", std::size_t{1} << 16);
  return lim;
}

int cmd_gen(const Config& c, const Params& prm) {
  emit(c, problem_to_json(load_problem(c, prm)).dump(2) + "\n");
  return 0;
}

int cmd_dims(const Config& c, const Params& prm) {
  auto p = load_problem(c, prm);
  const double tau = need(c.tau, "--tau");
  const auto lim = limits_of(prm);
  const auto kappa = kappa_of(c);
  auto quantity = prm.str("quantity", "rsd");
  DimensionReport r;
  if (p.kind == ProblemKind::Decision) {
    if (!p.reference) throw Usage("decision instance lacks a reference");
    if (quantity == "rsd") r = rsd_decision(p.dists, *p.reference, tau, kappa, lim);
    else if (quantity == "sd") r = sd_decision(p.dists, *p.reference, tau, kappa, lim);
    else if (quantity == "det") r = det_cover(p.dists, *p.reference, tau, prm.str("cover", "exact") == "greedy" ? CoverMode::Greedy : CoverMode::Exact, lim);
    else if (quantity == "crsd") r = crsd(p.dists, *p.reference, kappa, lim);
    else throw Usage("decision quantity must be rsd | sd | det | crsd");
  } else {
    if (kappa != Kappa::K1) throw Usage("search dimensions are computed for k1 only");
    auto cands = reference_candidates(p);
    if (p.kind == ProblemKind::Verifiable) {
      r = rsd_verifiable(p, c.theta.value_or(p.threshold.value_or(0)), tau, cands, lim);
    } else if (p.kind == ProblemKind::Optimizing) {
      std::vector<double> grid;
      for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
      r = rsd_optimizing(p, c.eps.value_or(p.eps.value_or(0)), tau, grid, cands, lim);
    } else {
      r = rsd_search(p, tau, c.alpha.value_or(1.0), cands, lim);
    }
  }
  auto j = tag_report(to_json(r), "dims", p.name);
  j["tau"] = tau;
  j["kappa"] = kappa_name(kappa);
  emit(c, j.dump(2) + "\n");
  return 0;
}

int cmd_audit(const Config& c, const Params& prm) {
  if (c.gen == "line") {
    auto a = line_audit(c.p.value_or(5));
    emit(c, tag_report(to_json(a), "audit", "line_p" + std::to_string(a.p)).dump(2) + "\n");
    return a.passes() ? 0 : 2;
  }
  auto p = load_problem(c, prm);
  if (p.kind != ProblemKind::Decision || !p.reference) throw Usage("audit needs --gen line or a decision instance");
  auto a = combined_relation_audit(p.dists, *p.reference, limits_of(prm));
  emit(c, tag_report(to_json(a), "combined_audit", p.name).dump(2) + "\n");
  return a.all_hold() ? 0 : 2;
}

AnswerStrategy strategy_of(const std::string& s, double tol, const ProblemSpec& p) {
  auto ref = p.reference ? *p.reference : Distribution::uniform(p.domain);
  if (s == "exact") return AnswerStrategy::exact();
  if (s == "sampled")
    return AnswerStrategy::sampled(static_cast<std::size_t>(std::ceil(8.0 * std::log(200.0) / (tol * tol))));
  if (s == "reference") return AnswerStrategy::reference_of(ref);
  if (s == "edge-up") return AnswerStrategy::edge(EdgeDirection::Up);
  if (s == "edge-down") return AnswerStrategy::edge(EdgeDirection::Down);
  if (s == "edge-toward") return AnswerStrategy::edge(EdgeDirection::TowardReference, ref);
  if (s == "edge-away") return AnswerStrategy::edge(EdgeDirection::AwayFromReference, ref);
  throw Usage("strategy must be exact | sampled | reference | edge-up | edge-down | edge-toward | edge-away");
}

struct Trial {
  std::size_t input = 0;
  bool success = false;
  bool violation = false;
  std::size_t queries = 0, updates = 0, budget = 0;
  double valid_fraction = 1;
  json detail;
};

int cmd_solve(const Config& c, const Params& prm) {
  auto p = load_problem(c, prm);
  const double tau = need(c.tau, "--tau");
  if (c.trials > 1 && !c.seed) throw Usage("--seed is required when --trials > 1");
  if (c.trials == 0) throw Usage("--trials must be positive");
  const std::uint64_t seed = c.seed.value_or(0);
  const double delta = c.delta.value_or(0.1);
  const auto strategy = prm.str("strategy", "sampled");
  const auto solver = prm.str("solver", "mw");
  SolverOptions opt;
  opt.delta = delta;
  opt.project_to_hull = prm.str("hull", "off") == "on";
  // verifiable instances start from their reference by default
  const auto start = prm.str("start", p.kind == ProblemKind::Verifiable && p.reference ? "reference" : "mixture");
  if (start == "reference") {
    if (!p.reference) throw Usage("start=reference needs an instance reference");
    if (opt.project_to_hull) throw Usage("start=reference cannot be combined with hull=on");
    opt.start = *p.reference;
  } else if (start == "uniform") {
    opt.start = Distribution::uniform(p.domain);
  } else if (start != "mixture") {
    throw Usage("start must be mixture | uniform | reference");
  }
  auto mode = prm.str("mode", "det");
  if (mode != "det" && mode != "rand") throw Usage("mode must be det | rand");
  opt.mode = mode == "det" ? SolverMode::Deterministic : SolverMode::Randomized;
  if (c.oracle == "vroot") opt.kappa = Kappa::KV;
  else if (c.oracle != "stat") throw Usage("solvers need --oracle stat or vroot");

  std::optional<CoverOracle> oracle;
  std::optional<DimensionReport> dcover;
  if (p.kind == ProblemKind::Search || p.kind == ProblemKind::Pac) oracle = greedy_cover_oracle(p, tau, opt.kappa);
  if (p.kind == ProblemKind::Decision) {
    if (!p.reference) throw Usage("decision instance lacks a reference");
    dcover = rsd_decision(p.dists, *p.reference, tau, Kappa::K1, limits_of(prm));
    if (!std::isfinite(dcover->value)) throw Usage("decision instance has no cover at this tau");
  }
  if (opt.kappa == Kappa::KV && !oracle) throw Usage("vroot solving is available for search instances");

  std::vector<Trial> rows;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const std::uint64_t ts = derived_rng(seed, t)();
    Trial tr;
    opt.seed = ts;
    if (p.kind == ProblemKind::Decision) {
      const std::size_t m = p.dists.size();
      bool alt = t % 2 == 0;
      tr.input = alt ? (t / 2) % m : m;
      const auto& input = alt ? p.dists[tr.input] : *p.reference;
      OracleSession s(OracleSpec::stat(tau / 2), strategy_of(strategy, tau / 2, p), input, ts);
      std::vector<QueryFn> w;
      for (const auto& q : dcover->queries) w.emplace_back(p.domain, q);
      Rng rng = derived_rng(ts, 7);
      auto r = solve_decision_sampled(w, dcover->query_weights, dcover->value, tau, delta, *p.reference, s, rng);
      tr.success = r.alternative == alt;
      tr.queries = r.queries;
      tr.valid_fraction = s.transcript().valid_fraction();
      tr.detail = {{"alternative", r.alternative}, {"queries", r.queries}, {"samples", r.samples}};
    } else if (solver == "stream") {
      if (!oracle) throw Usage("streaming needs a search instance");
      tr.input = t % p.dists.size();
      auto r = stream_solve(p, *oracle, tau, delta, iid_stream(p.dists[tr.input], ts), ts);
      tr.success = r.solution && p.valid(*r.solution, tr.input);
      tr.updates = r.updates;
      tr.queries = r.ledger.samples;
      tr.detail = {{"outcome", r.outcome}, {"solution", r.solution ? json(*r.solution) : json(nullptr)},
                   {"ledger", to_json(r.ledger)}};
      tr.violation = !r.ledger.within_bound;
    } else {
      tr.input = t % p.dists.size();
      RunReport r;
      double tol = tau / 3;
      if (p.kind == ProblemKind::Optimizing) tol = tau / 4;
      OracleSpec os = opt.kappa == Kappa::KV ? OracleSpec::vroot(tol) : OracleSpec::stat(tol);
      OracleSession s(os, strategy_of(strategy, tol, p), p.dists[tr.input], ts);
      if (oracle) {
        r = solve_search_universal(p, *oracle, tau, s, opt);
        tr.success = r.solution && p.valid(*r.solution, tr.input);
      } else if (p.kind == ProblemKind::Verifiable) {
        double theta = c.theta.value_or(p.threshold.value_or(0));
        r = solve_verifiable(p, theta, tau, s, opt);
        tr.success = r.solution && expectation(p.dists[tr.input], *p.verify[*r.solution]) <= theta + tau + 1e-12;
      } else {
        r = solve_optimizing(p, tau, s, opt);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : p.verify) best = std::min(best, expectation(p.dists[tr.input], *q));
        tr.success = r.solution &&
                     expectation(p.dists[tr.input], *p.verify[*r.solution]) <= best + c.eps.value_or(0) + tau + 1e-12;
      }
      tr.violation = r.theorem_violation;
      tr.queries = r.queries;
      tr.updates = r.updates;
      tr.budget = r.update_budget;
      tr.valid_fraction = r.valid_answer_fraction;
      tr.detail = to_json(r);
    }
    rows.push_back(std::move(tr));
  }

  std::size_t ok = 0, viol = 0, max_updates = 0, max_budget = 0;
  double q = 0, vf = 0;
  json runs = json::array();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& r = rows[t];
    ok += r.success;
    viol += r.violation;
    max_updates = std::max(max_updates, r.updates);
    max_budget = std::max(max_budget, r.budget);
    q += static_cast<double>(r.queries);
    vf += r.valid_fraction;
    json d = r.detail;
    d["trial"] = t;
    d["input"] = r.input;
    d["success"] = r.success;
    runs.push_back(d);
  }
  const double n = static_cast<double>(rows.size());
  json j = tag_report(json::object(), "solve", p.name);
  j["trials"] = rows.size();
  j["successes"] = ok;
  j["success_rate"] = static_cast<double>(ok) / n;
  j["mean_queries"] = q / n;
  j["mean_valid_answer_fraction"] = vf / n;
  j["max_updates"] = max_updates;
  j["update_budget"] = max_budget;
  j["violations"] = viol;
  j["seed"] = seed;
  j["tau"] = tau;
  j["oracle"] = c.oracle;
  j["strategy"] = strategy;
  j["solver"] = p.kind == ProblemKind::Decision ? "sampled_decision" : solver;
  j["runs"] = runs;
  emit(c, j.dump(2) + "\n");

  auto csv = prm.str("csv", "");
  if (!csv.empty()) {
    std::string text = "trial,input,success,queries,updates,valid_answer_fraction\r\n";
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto& r = rows[t];
      text += std::to_string(t) + "," + std::to_string(r.input) + "," + (r.success ? "true" : "false") + "," +
              std::to_string(r.queries) + "," + std::to_string(r.updates) + "," + csv_double(r.valid_fraction) + "\r\n";
    }
    write_file(csv, text);
  }
  return viol ? 2 : 0;
}

int cmd_merge(const Config& c) {
  emit(c, report_merge_files(c.inputs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistical query dimension lab"};
  app.require_subcommand(1);
  Config cfg;
  std::map<std::string, CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"gen", "write a problem instance as JSON"},
      {"dims", "compute a statistical dimension"},
      {"audit", "Line_p correlation audit or combined-dimension audit"},
      {"solve", "run solver trials and report success rates"}};
  for (const auto& [name, help] : commands) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, cfg);
    subs[name] = s;
  }
  auto* merge = app.add_subcommand("merge", "merge reports into one CSV");
  merge->add_option("reports", cfg.inputs, "report JSON files");
  merge->add_option("--out", cfg.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (merge->parsed()) return cmd_merge(cfg);
    for (auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      apply_config(sub, cfg);
      Params prm(cfg.params);
      if (name == "gen") return cmd_gen(cfg, prm);
      if (name == "dims") return cmd_dims(cfg, prm);
      if (name == "audit") return cmd_audit(cfg, prm);
      return cmd_solve(cfg, prm);
    }
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

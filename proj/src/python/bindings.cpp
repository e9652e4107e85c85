// pybind11 surface; structured results cross the boundary as JSON text
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "sqlab/dimension.hpp"
#include "sqlab/io.hpp"
#include "sqlab/norms.hpp"
#include "sqlab/solvers.hpp"
#include "sqlab/streaming.hpp"

namespace py = pybind11;
using namespace sqlab;

namespace {

using Rows = std::vector<std::vector<double>>;

Kappa kappa_of(const std::string& s) {
  if (s == "k1") return Kappa::K1;
  if (s == "kv") return Kappa::KV;
  throw Error(ErrorKind::InvalidArgument, "kappa must be k1 or kv");
}

struct Instance {
  std::vector<Distribution> dists;
  Distribution d0;
};

Instance instance(const Rows& dists, const std::vector<double>& d0) {
  auto dom = FiniteDomain::indexed(d0.size());
  Instance in{{}, Distribution(dom, d0)};
  for (const auto& w : dists) in.dists.emplace_back(dom, w);
  return in;
}

Measure measure(const std::optional<std::vector<double>>& mu, std::size_t m) {
  return mu ? Measure(*mu) : Measure::uniform(m);
}

ProblemSpec load(const std::string& text) { return problem_from_json(json::parse(text)); }

std::string generate(const std::string& name, std::size_t n, std::size_t k, std::size_t p, const std::string& part,
                     const std::string& marginal, double eps) {
  if (name == "biclique") {
    auto fam = biclique_family(n, k);
    if (part == "search") return problem_to_json(fam.search).dump();
    if (part == "decision") return problem_to_json(fam.decision).dump();
    if (part == "verifiable") return problem_to_json(fam.verifiable).dump();
    throw Error(ErrorKind::InvalidArgument, "part must be search, decision or verifiable");
  }
  if (name == "line") {
    if (marginal != "uniform" && marginal != "skewed")
      throw Error(ErrorKind::InvalidArgument, "marginal must be uniform or skewed");
    return problem_to_json(line_family(p, marginal == "skewed" ? Marginal::Skewed : Marginal::Uniform, eps)).dump();
  }
  throw Error(ErrorKind::InvalidArgument, "unknown generator " + name);
}

std::string norm(const std::string& which, const Rows& dists, const std::vector<double>& d0,
                 const std::optional<std::vector<double>>& mu) {
  auto in = instance(dists, d0);
  auto m = measure(mu, in.dists.size());
  if (which == "kbar1") return to_json(kbar1(m, in.dists, in.d0)).dump();
  if (which == "kbar2") return to_json(kbar2(m, in.dists, in.d0)).dump();
  if (which == "kbar2_spectral") return to_json(kbar2_spectral(m, in.dists, in.d0)).dump();
  if (which == "kbarv") return to_json(kbarv(m, in.dists, in.d0)).dump();
  throw Error(ErrorKind::InvalidArgument, "unknown norm " + which);
}

AnswerStrategy strategy_of(const std::string& s, const ProblemSpec& p) {
  if (s == "exact") return AnswerStrategy::exact();
  if (s == "toward_reference" || s == "away") {
    auto d0 = p.reference ? *p.reference : reference_candidates(p)[1];
    return AnswerStrategy::edge(s == "away" ? EdgeDirection::AwayFromReference : EdgeDirection::TowardReference, d0);
  }
  throw Error(ErrorKind::InvalidArgument, "answers must be exact, toward_reference or away");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "statistical query dimensions, solvers and audits";

  py::register_exception<Error>(m, "SqlabError", PyExc_ValueError);

  m.def("generate", &generate, py::arg("name"), py::arg("n") = 8, py::arg("k") = 2, py::arg("p") = 5,
        py::arg("part") = "search", py::arg("marginal") = "uniform", py::arg("eps") = 0.1);

  m.def(
      "rsd_decision",
      [](const Rows& dists, const std::vector<double>& d0, double tau, const std::string& kappa) {
        auto in = instance(dists, d0);
        return to_json(rsd_decision(in.dists, in.d0, tau, kappa_of(kappa))).dump();
      },
      py::arg("dists"), py::arg("d0"), py::arg("tau"), py::arg("kappa") = "k1");
  m.def(
      "sd_decision",
      [](const Rows& dists, const std::vector<double>& d0, double tau, const std::string& kappa) {
        auto in = instance(dists, d0);
        return to_json(sd_decision(in.dists, in.d0, tau, kappa_of(kappa))).dump();
      },
      py::arg("dists"), py::arg("d0"), py::arg("tau"), py::arg("kappa") = "k1");
  m.def(
      "crsd",
      [](const Rows& dists, const std::vector<double>& d0, const std::string& kappa) {
        auto in = instance(dists, d0);
        return to_json(crsd(in.dists, in.d0, kappa_of(kappa))).dump();
      },
      py::arg("dists"), py::arg("d0"), py::arg("kappa") = "k1");
  m.def(
      "combined_audit",
      [](const Rows& dists, const std::vector<double>& d0) {
        auto in = instance(dists, d0);
        return to_json(combined_relation_audit(in.dists, in.d0)).dump();
      },
      py::arg("dists"), py::arg("d0"));
  m.def(
      "rsd_search",
      [](const std::string& problem, double tau, double alpha) {
        auto p = load(problem);
        return to_json(rsd_search(p, tau, alpha, reference_candidates(p))).dump();
      },
      py::arg("problem"), py::arg("tau"), py::arg("alpha") = 1.0);

  m.def("norm", &norm, py::arg("which"), py::arg("dists"), py::arg("d0"), py::arg("mu") = std::nullopt);
  m.def(
      "rho",
      [](const Rows& dists, const std::vector<double>& d0) {
        auto in = instance(dists, d0);
        return rho(in.dists, in.d0);
      },
      py::arg("dists"), py::arg("d0"));
  m.def("line_audit", [](std::size_t p) { return to_json(line_audit(p)).dump(); }, py::arg("p"));

  m.def(
      "solve",
      [](const std::string& problem, std::size_t input, double tau, std::uint64_t seed, const std::string& answers) {
        auto p = load(problem);
        if (input >= p.dists.size()) throw Error(ErrorKind::InvalidArgument, "input index out of range");
        OracleSession s(OracleSpec::stat(tau / 3), strategy_of(answers, p), p.dists[input], seed);
        SolverOptions opt;
        opt.seed = seed;
        auto r = solve_search_universal(p, greedy_cover_oracle(p, tau, Kappa::K1), tau, s, opt);
        auto j = to_json(r);
        j["valid"] = r.solution && p.valid(*r.solution, input);
        return j.dump();
      },
      py::arg("problem"), py::arg("input"), py::arg("tau"), py::arg("seed") = 0, py::arg("answers") = "exact");
  m.def(
      "stream_solve",
      [](const std::string& problem, std::size_t input, double tau, double delta, std::uint64_t seed) {
        auto p = load(problem);
        if (input >= p.dists.size()) throw Error(ErrorKind::InvalidArgument, "input index out of range");
        auto r = stream_solve(p, greedy_cover_oracle(p, tau, Kappa::K1), tau, delta, iid_stream(p.dists[input], seed),
                              seed);
        json j = {{"outcome", r.outcome},
                  {"updates", r.updates},
                  {"valid", r.solution.has_value() && p.valid(*r.solution, input)},
                  {"ledger", to_json(r.ledger)}};
        if (r.solution) j["solution"] = p.solutions[*r.solution];
        return j.dump();
      },
      py::arg("problem"), py::arg("input"), py::arg("tau"), py::arg("delta") = 0.1, py::arg("seed") = 0);

  m.def(
      "mw_run",
      [](std::vector<double> w1, double gamma, const Rows& losses) {
        auto mw = mw_run(std::move(w1), gamma, [&](std::size_t t) { return losses.at(t); }, losses.size());
        return py::make_tuple(mw.weights(), mw.best_expert_regret());
      },
      py::arg("w1"), py::arg("gamma"), py::arg("losses"));
  m.def(
      "bridge",
      [](const std::string& direction, double param, double v) {
        if (direction == "vstat_to_vroot") return bridge(OracleSpec::vstat(param), OracleSpec::vroot(1 / std::sqrt(param)), v);
        if (direction == "vroot_to_vstat")
          return bridge(OracleSpec::vroot(param), OracleSpec::vstat(1 / (9 * param * param)), v);
        throw Error(ErrorKind::InvalidArgument, "direction must be vstat_to_vroot or vroot_to_vstat");
      },
      py::arg("direction"), py::arg("param"), py::arg("v"));
}

#include "sqlab/streaming.hpp"

#include <algorithm>
#include <cmath>

namespace sqlab {

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < n) ++b;
  return b;
}

std::vector<double> mw_step(std::vector<double> w, const QueryFn& psi, double gamma) {
  double s = 0;
  for (std::size_t x = 0; x < w.size(); ++x) s += (w[x] *= 1 - gamma * psi(x));
  for (double& v : w) v /= s;
  return w;
}

}  // namespace

SampleStream iid_stream(const Distribution& d, std::uint64_t seed, std::optional<std::size_t> limit) {
  auto cdf = std::make_shared<std::vector<double>>(cumulative(d.weights()));
  auto rng = std::make_shared<Rng>(seed);
  auto used = std::make_shared<std::size_t>(0);
  return [cdf, rng, used, limit]() -> std::optional<std::size_t> {
    if (limit && *used >= *limit) return std::nullopt;
    ++*used;
    return sample_index(*cdf, *rng);
  };
}

SampleStream vector_stream(std::vector<std::size_t> samples) {
  auto data = std::make_shared<std::vector<std::size_t>>(std::move(samples));
  auto pos = std::make_shared<std::size_t>(0);
  return [data, pos]() -> std::optional<std::size_t> {
    if (*pos >= data->size()) return std::nullopt;
    return (*data)[(*pos)++];
  };
}

StreamPlan stream_plan(const ProblemSpec& p, double tau, double delta) {
  if (!(tau > 0 && tau <= 1) || !(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "tau, delta out of range");
  StreamPlan s;
  auto start = uniform_mixture(p.dists);
  for (const auto& d : p.dists) s.kl_bound = std::max(s.kl_bound, kl_divergence(d, start));
  s.max_updates = update_budget(s.kl_bound, tau, Kappa::K1);
  s.max_queries = p.dists.size();
  double denom = 36.0 * s.kl_bound * static_cast<double>(s.max_queries);
  s.delta_estimate = denom > 0 ? delta * tau * tau / denom : delta / static_cast<double>(s.max_queries);
  s.delta_estimate = std::min(s.delta_estimate, delta);
  s.samples_per_estimate = static_cast<std::size_t>(std::ceil(18.0 * std::log(2.0 / s.delta_estimate) / (tau * tau)));
  s.counter_width = ceil_log2(s.samples_per_estimate + 1);
  s.index_bits = ceil_log2(s.max_queries) + 1;
  return s;
}

Distribution replay_reference(const ProblemSpec& p, const CoverOracle& oracle, double tau,
                              const std::vector<std::pair<std::size_t, int>>& history) {
  const double gamma = tau / 3.0;
  auto w = uniform_mixture(p.dists).weights();
  for (const auto& [i, sign] : history) {
    auto resp = oracle(Distribution(p.domain, w));
    if (i >= resp.queries.size()) throw Error(ErrorKind::InvalidArgument, "history index outside the cover");
    w = mw_step(std::move(w), sign > 0 ? resp.queries[i] : resp.queries[i].negated(), gamma);
  }
  return Distribution(p.domain, std::move(w));
}

StreamResult stream_solve(const ProblemSpec& p, const CoverOracle& oracle, double tau, double delta,
                          const SampleStream& stream, std::uint64_t seed) {
  const auto plan = stream_plan(p, tau, delta);
  const double gamma = tau / 3.0;
  const std::size_t m = plan.samples_per_estimate;
  Rng rng = derived_rng(seed, 3);
  StreamResult r;
  auto& led = r.ledger;
  led.bound = plan.max_updates * plan.index_bits + plan.counter_width;
  led.sample_bound = (plan.max_updates + 1) * plan.max_queries * m;
  const std::size_t scratch = ceil_log2(plan.max_queries) + plan.counter_width + ceil_log2(p.domain->size());

  // naive running copy; must agree bitwise with the replayed reference
  auto running = uniform_mixture(p.dists).weights();
  for (;;) {
    auto cur = replay_reference(p, oracle, tau, r.history);
    if (cur.weights() != running) throw Error(ErrorKind::VerificationFailed, "replayed reference diverged");
    auto resp = oracle(cur);
    if (resp.queries.size() > plan.max_queries) throw Error(ErrorKind::GuardExceeded, "cover larger than |dists|");
    led.persistent_bits = r.history.size() * plan.index_bits + plan.counter_width;
    led.peak_bits = std::max(led.peak_bits, led.persistent_bits + scratch);
    bool moved = false;
    for (std::size_t i = 0; i < resp.queries.size() && !moved; ++i) {
      const auto& phi = resp.queries[i];
      std::size_t count = 0;
      for (std::size_t j = 0; j < m; ++j) {
        auto x = stream();
        if (!x) throw Error(ErrorKind::StreamExhausted, "sample stream exhausted after " + std::to_string(led.samples));
        ++led.samples;
        double v = phi(*x);
        if (uniform01(rng) < (1 + v) / 2) ++count;
      }
      double est = 2.0 * static_cast<double>(count) / static_cast<double>(m) - 1.0;
      double e = expectation(cur, phi);
      if (std::fabs(e - est) > 2.0 * tau / 3.0) {
        int sign = e > est ? 1 : -1;
        r.history.emplace_back(i, sign);
        running = mw_step(std::move(running), sign > 0 ? phi : phi.negated(), gamma);
        moved = true;
      }
    }
    if (!moved) {
      r.outcome = "solution";
      r.solution = resp.solution;
      break;
    }
    if (r.history.size() > plan.max_updates) {
      r.outcome = "budget_exceeded";
      break;
    }
  }
  r.updates = r.history.size();
  r.final_reference = running;
  led.within_bound = led.persistent_bits <= led.bound && led.samples <= led.sample_bound;
  return r;
}

}  // namespace sqlab

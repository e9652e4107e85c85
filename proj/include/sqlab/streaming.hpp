#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqlab/solvers.hpp"

namespace sqlab {

// returns the next sample index, or nullopt once the stream is exhausted
using SampleStream = std::function<std::optional<std::size_t>()>;

SampleStream iid_stream(const Distribution& d, std::uint64_t seed, std::optional<std::size_t> limit = std::nullopt);
SampleStream vector_stream(std::vector<std::size_t> samples);

struct BitLedger {
  std::size_t persistent_bits = 0;  // history + one counter
  std::size_t peak_bits = 0;        // plus loop index, in-estimate counter, current sample
  std::size_t samples = 0;
  std::size_t bound = 0;         // ceil(36 R/tau^2) (ceil(log2 q) + 1) + counter width
  std::size_t sample_bound = 0;  // (T_max + 1) q m
  bool within_bound = true;
};

struct StreamPlan {
  double kl_bound = 0;
  std::size_t max_updates = 0;
  std::size_t max_queries = 0;  // q
  double delta_estimate = 0;    // per-estimate confidence
  std::size_t samples_per_estimate = 0;
  std::size_t counter_width = 0;
  std::size_t index_bits = 0;  // ceil(log2 q) + 1 per recorded update
};

StreamPlan stream_plan(const ProblemSpec& p, double tau, double delta);

struct StreamResult {
  std::string outcome;  // "solution" or "budget_exceeded"
  std::optional<std::size_t> solution;
  std::size_t updates = 0;
  std::vector<std::pair<std::size_t, int>> history;
  std::vector<double> final_reference;
  BitLedger ledger;
};

// MW over the domain simplex from the uniform mixture; every estimate reuses a single
// counter over m randomized-rounded samples, and D_t is rebuilt from the history each step.
// Throws StreamExhausted if the stream runs dry.
StreamResult stream_solve(const ProblemSpec& p, const CoverOracle& oracle, double tau, double delta,
                          const SampleStream& stream, std::uint64_t seed);

// D_t regenerated from the start point by re-running the oracle on each recorded (index, sign)
Distribution replay_reference(const ProblemSpec& p, const CoverOracle& oracle, double tau,
                              const std::vector<std::pair<std::size_t, int>>& history);

}  // namespace sqlab

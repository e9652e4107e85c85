#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqlab/core.hpp"

namespace sqlab {

enum class OracleKind { Stat, Vstat, Vroot, OneStat };

const char* oracle_kind_name(OracleKind k);
std::optional<OracleKind> parse_oracle_kind(const std::string& s);

struct OracleSpec {
  OracleKind kind = OracleKind::Stat;
  double tau = 0.1;      // STAT and VROOT tolerance
  double n = 100;        // VSTAT sample-size parameter
  unsigned bits = 1;     // 1-STAT output width
  bool strict_vstat = false;  // use p(1-p) in place of p

  static OracleSpec stat(double tau) { return {OracleKind::Stat, tau, 0, 0, false}; }
  static OracleSpec vstat(double n, bool strict = false) { return {OracleKind::Vstat, 0, n, 0, strict}; }
  static OracleSpec vroot(double tau) { return {OracleKind::Vroot, tau, 0, 0, false}; }
  static OracleSpec one_stat(unsigned b) { return {OracleKind::OneStat, 0, 0, b, false}; }

  double param() const;
  void check() const;
};

enum class AnswerMode { Exact, Sampled, Reference, Edge };

enum class EdgeDirection { Up, Down, TowardReference, AwayFromReference };

struct AnswerStrategy {
  AnswerMode mode = AnswerMode::Exact;
  std::size_t samples = 0;             // Sampled
  std::optional<Distribution> reference;  // Reference, and Edge toward/away
  EdgeDirection direction = EdgeDirection::Up;

  static AnswerStrategy exact() { return {}; }
  static AnswerStrategy sampled(std::size_t k) { return {AnswerMode::Sampled, k, std::nullopt, EdgeDirection::Up}; }
  static AnswerStrategy reference_of(Distribution d0) {
    return {AnswerMode::Reference, 0, std::move(d0), EdgeDirection::Up};
  }
  static AnswerStrategy edge(EdgeDirection dir, std::optional<Distribution> d0 = std::nullopt) {
    return {AnswerMode::Edge, 0, std::move(d0), dir};
  }
};

// half-width of the admissible answer interval around p, in value space
// (for VROOT the interval is |sqrt v - sqrt p| <= tau, reported via validate)
double vstat_tolerance(const OracleSpec& spec, double p);
bool validate(const OracleSpec& spec, double p, double v);

struct TranscriptEntry {
  std::size_t index = 0;
  OracleKind kind = OracleKind::Stat;
  double param = 0;
  double value = 0;
  bool valid = true;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::size_t samples_drawn = 0;

  std::size_t size() const { return entries.size(); }
  double valid_fraction() const;
  bool all_valid() const;
  std::string to_json_lines() const;
};

// One answer for a statistical query with exact expectation p.
double answer(const OracleSpec& spec, const AnswerStrategy& strategy, const Distribution& d, const QueryFn& phi,
              Rng& rng, std::size_t* samples_used = nullptr);

// Converts an answer between VSTAT(n) and vSTAT(tau).
// VSTAT(n) answers serve vSTAT(tau) when n >= 1/tau^2; vSTAT(tau) answers
// serve VSTAT(n) when tau <= 1/(3 sqrt n).
double bridge(const OracleSpec& from, const OracleSpec& to, double v);

// b-bit query for 1-STAT: phi[x] in [0, 2^b)
struct BitQuery {
  DomainPtr domain;
  std::vector<std::uint64_t> values;
  unsigned bits = 1;
  BitQuery(DomainPtr d, std::vector<std::uint64_t> v, unsigned b);
};

// Oracle bound to a fixed unknown input distribution; records a transcript.
class OracleSession {
 public:
  OracleSession(OracleSpec spec, AnswerStrategy strategy, Distribution input, std::uint64_t seed);

  double ask(const QueryFn& phi);
  std::uint64_t ask_bits(const BitQuery& phi);

  const OracleSpec& spec() const { return spec_; }
  const AnswerStrategy& strategy() const { return strategy_; }
  const Distribution& input() const { return input_; }
  const Transcript& transcript() const { return transcript_; }
  std::size_t queries() const { return transcript_.size(); }

 private:
  OracleSpec spec_;
  AnswerStrategy strategy_;
  Distribution input_;
  std::vector<double> cdf_;
  Rng rng_;
  Transcript transcript_;
};

}  // namespace sqlab

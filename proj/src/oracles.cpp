#include "sqlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace sqlab {

namespace {
constexpr double kAnswerSlack = 1e-12;
}

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::Stat: return "stat";
    case OracleKind::Vstat: return "vstat";
    case OracleKind::Vroot: return "vroot";
    case OracleKind::OneStat: return "onestat";
  }
  return "?";
}

std::optional<OracleKind> parse_oracle_kind(const std::string& s) {
  if (s == "stat") return OracleKind::Stat;
  if (s == "vstat") return OracleKind::Vstat;
  if (s == "vroot") return OracleKind::Vroot;
  if (s == "onestat") return OracleKind::OneStat;
  return std::nullopt;
}

double OracleSpec::param() const {
  switch (kind) {
    case OracleKind::Stat:
    case OracleKind::Vroot: return tau;
    case OracleKind::Vstat: return n;
    case OracleKind::OneStat: return bits;
  }
  return 0;
}

void OracleSpec::check() const {
  switch (kind) {
    case OracleKind::Stat:
    case OracleKind::Vroot:
      if (!(tau > 0 && tau <= 1)) throw Error(ErrorKind::InvalidArgument, "oracle tolerance must lie in (0,1]");
      break;
    case OracleKind::Vstat:
      if (!(n >= 1)) throw Error(ErrorKind::InvalidArgument, "VSTAT parameter must be at least 1");
      break;
    case OracleKind::OneStat:
      if (bits == 0 || bits > 63) throw Error(ErrorKind::InvalidArgument, "1-STAT width must be in [1,63]");
      break;
  }
}

double vstat_tolerance(const OracleSpec& spec, double p) {
  double var = spec.strict_vstat ? p * (1 - p) : p;
  return std::max(1.0 / spec.n, std::sqrt(std::max(var, 0.0) / spec.n));
}

bool validate(const OracleSpec& spec, double p, double v) {
  if (!std::isfinite(v)) return false;
  switch (spec.kind) {
    case OracleKind::Stat: return std::fabs(v - p) <= spec.tau + kAnswerSlack;
    case OracleKind::Vstat: return std::fabs(v - p) <= vstat_tolerance(spec, p) + kAnswerSlack;
    case OracleKind::Vroot:
      if (v < -kAnswerSlack) return false;
      return std::fabs(std::sqrt(std::max(v, 0.0)) - std::sqrt(std::max(p, 0.0))) <= spec.tau + kAnswerSlack;
    case OracleKind::OneStat: return true;
  }
  return false;
}

double Transcript::valid_fraction() const {
  if (entries.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& e : entries) ok += e.valid ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(entries.size());
}

bool Transcript::all_valid() const {
  return std::all_of(entries.begin(), entries.end(), [](const TranscriptEntry& e) { return e.valid; });
}

std::string Transcript::to_json_lines() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    nlohmann::json j{{"index", e.index}, {"kind", oracle_kind_name(e.kind)}, {"param", e.param},
                     {"value", e.value}, {"valid", e.valid}};
    out << j.dump() << '\n';
  }
  return out.str();
}

static void check_range(const OracleSpec& spec, const QueryFn& phi) {
  if ((spec.kind == OracleKind::Vstat || spec.kind == OracleKind::Vroot) && phi.range() != QueryRange::Unit)
    throw Error(ErrorKind::RangeMismatch, "VSTAT and vSTAT queries must map into [0,1]");
}

double answer(const OracleSpec& spec, const AnswerStrategy& strategy, const Distribution& d, const QueryFn& phi,
              Rng& rng, std::size_t* samples_used) {
  spec.check();
  if (spec.kind == OracleKind::OneStat) throw Error(ErrorKind::InvalidArgument, "use ask_bits for 1-STAT");
  check_range(spec, phi);
  require_same_domain(d.domain(), phi.domain(), "oracle answer");
  double p = expectation(d, phi);
  switch (strategy.mode) {
    case AnswerMode::Exact: return p;
    case AnswerMode::Sampled: {
      if (strategy.samples == 0) throw Error(ErrorKind::InvalidArgument, "sampled answers need k >= 1");
      auto cdf = cumulative(d.span());
      double s = 0;
      for (std::size_t i = 0; i < strategy.samples; ++i) s += phi(sample_index(cdf, rng));
      if (samples_used) *samples_used += strategy.samples;
      return s / static_cast<double>(strategy.samples);
    }
    case AnswerMode::Reference:
      if (!strategy.reference) throw Error(ErrorKind::InvalidArgument, "reference strategy without D0");
      return expectation(*strategy.reference, phi);
    case AnswerMode::Edge: {
      double sign = 1.0;
      switch (strategy.direction) {
        case EdgeDirection::Up: sign = 1; break;
        case EdgeDirection::Down: sign = -1; break;
        case EdgeDirection::TowardReference:
        case EdgeDirection::AwayFromReference: {
          if (!strategy.reference) throw Error(ErrorKind::InvalidArgument, "edge toward reference without D0");
          double r = expectation(*strategy.reference, phi);
          sign = r >= p ? 1.0 : -1.0;
          if (strategy.direction == EdgeDirection::AwayFromReference) sign = -sign;
          break;
        }
      }
      switch (spec.kind) {
        case OracleKind::Stat: return p + sign * spec.tau;
        case OracleKind::Vstat: return p + sign * vstat_tolerance(spec, p);
        case OracleKind::Vroot: {
          double r = std::sqrt(std::max(p, 0.0)) + sign * spec.tau;
          return r <= 0 ? 0.0 : r * r;
        }
        case OracleKind::OneStat: break;
      }
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown answer strategy");
}

double bridge(const OracleSpec& from, const OracleSpec& to, double v) {
  constexpr double rel = 1e-12;
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  if (from.kind == OracleKind::Vstat && to.kind == OracleKind::Vroot) {
    if (from.n * to.tau * to.tau >= 1.0 - rel) return clamp01(v);
    throw Error(ErrorKind::UnsupportedPair, "VSTAT(n) serves vSTAT(tau) only when n >= 1/tau^2");
  }
  if (from.kind == OracleKind::Vroot && to.kind == OracleKind::Vstat) {
    if (from.tau * 3.0 * std::sqrt(to.n) <= 1.0 + rel) return clamp01(v);
    throw Error(ErrorKind::UnsupportedPair, "vSTAT(tau) serves VSTAT(n) only when tau <= 1/(3 sqrt n)");
  }
  if (from.kind == to.kind) {
    bool ok = false;
    if (from.kind == OracleKind::Stat || from.kind == OracleKind::Vroot) ok = from.tau <= to.tau * (1 + rel);
    if (from.kind == OracleKind::Vstat) ok = from.n >= to.n * (1 - rel) && (!to.strict_vstat || from.strict_vstat);
    if (ok) return v;
  }
  throw Error(ErrorKind::UnsupportedPair, std::string(oracle_kind_name(from.kind)) + " -> " + oracle_kind_name(to.kind));
}

BitQuery::BitQuery(DomainPtr d, std::vector<std::uint64_t> v, unsigned b)
    : domain(std::move(d)), values(std::move(v)), bits(b) {
  if (!domain || values.size() != domain->size()) throw Error(ErrorKind::DomainMismatch, "bit query table length");
  if (b == 0 || b > 63) throw Error(ErrorKind::InvalidArgument, "1-STAT width must be in [1,63]");
  for (auto x : values)
    if (x >> b) throw Error(ErrorKind::RangeMismatch, "bit query value does not fit in b bits");
}

OracleSession::OracleSession(OracleSpec spec, AnswerStrategy strategy, Distribution input, std::uint64_t seed)
    : spec_(spec), strategy_(std::move(strategy)), input_(std::move(input)), rng_(derived_rng(seed, 0)) {
  spec_.check();
  cdf_ = cumulative(input_.span());
}

double OracleSession::ask(const QueryFn& phi) {
  std::size_t used = 0;
  double v = answer(spec_, strategy_, input_, phi, rng_, &used);
  transcript_.samples_drawn += used;
  double p = expectation(input_, phi);
  transcript_.entries.push_back({transcript_.size(), spec_.kind, spec_.param(), v, validate(spec_, p, v)});
  return v;
}

std::uint64_t OracleSession::ask_bits(const BitQuery& phi) {
  if (spec_.kind != OracleKind::OneStat) throw Error(ErrorKind::InvalidArgument, "ask_bits needs a 1-STAT oracle");
  if (phi.bits != spec_.bits) throw Error(ErrorKind::RangeMismatch, "bit query width differs from oracle width");
  require_same_domain(input_.domain(), phi.domain, "1-STAT");
  std::size_t x;
  if (strategy_.mode == AnswerMode::Reference && strategy_.reference) {
    auto cdf = cumulative(strategy_.reference->span());
    x = sample_index(cdf, rng_);
  } else {
    x = sample_index(cdf_, rng_);
  }
  transcript_.samples_drawn += 1;
  std::uint64_t v = phi.values[x];
  transcript_.entries.push_back({transcript_.size(), spec_.kind, spec_.param(), static_cast<double>(v), true});
  return v;
}

}  // namespace sqlab

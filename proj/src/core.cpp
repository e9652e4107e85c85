#include "sqlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sqlab {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DomainMismatch: return "domain mismatch";
    case ErrorKind::SupportViolation: return "support violation";
    case ErrorKind::RangeMismatch: return "range mismatch";
    case ErrorKind::GuardExceeded: return "instance guard exceeded";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Unbounded: return "unbounded";
    case ErrorKind::Uncoverable: return "uncoverable";
    case ErrorKind::UnsupportedPair: return "unsupported pair";
    case ErrorKind::StreamExhausted: return "stream exhausted";
    case ErrorKind::VerificationFailed: return "verification failed";
  }
  return "error";
}

FiniteDomain::FiniteDomain(std::vector<std::string> ids, std::size_t labeled_base)
    : ids_(std::move(ids)), labeled_base_(labeled_base) {
  if (ids_.empty()) throw Error(ErrorKind::InvalidArgument, "empty domain");
  if (labeled_base_ && ids_.size() != 2 * labeled_base_)
    throw Error(ErrorKind::InvalidArgument, "labeled domain must have 2|Z| elements");
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (!lookup_.emplace(ids_[i], i).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate domain id " + ids_[i]);
}

std::shared_ptr<const FiniteDomain> FiniteDomain::make(std::vector<std::string> ids) {
  return std::make_shared<const FiniteDomain>(std::move(ids));
}

std::shared_ptr<const FiniteDomain> FiniteDomain::indexed(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return make(std::move(ids));
}

std::shared_ptr<const FiniteDomain> FiniteDomain::labeled(const std::vector<std::string>& base) {
  std::vector<std::string> ids;
  ids.reserve(2 * base.size());
  for (const auto& z : base) {
    ids.push_back(z + "|-1");
    ids.push_back(z + "|+1");
  }
  return std::make_shared<const FiniteDomain>(std::move(ids), base.size());
}

std::optional<std::size_t> FiniteDomain::index_of(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool same_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void require_same_domain(const DomainPtr& a, const DomainPtr& b, const char* where) {
  if (!same_domain(a, b)) throw Error(ErrorKind::DomainMismatch, where);
}

Distribution::Distribution(DomainPtr domain, std::vector<double> weights)
    : domain_(std::move(domain)), w_(std::move(weights)) {
  if (!domain_) throw Error(ErrorKind::InvalidArgument, "distribution without domain");
  if (w_.size() != domain_->size()) throw Error(ErrorKind::DomainMismatch, "weight vector length");
  double s = 0;
  for (double x : w_) {
    if (!(x >= 0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "negative or non-finite weight");
    s += x;
  }
  if (std::fabs(s - 1.0) > kNormTol) throw Error(ErrorKind::InvalidArgument, "weights do not sum to 1");
}

Distribution Distribution::uniform(DomainPtr domain) {
  std::size_t n = domain->size();
  return Distribution(std::move(domain), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point(DomainPtr domain, std::size_t i) {
  std::vector<double> w(domain->size(), 0.0);
  w.at(i) = 1.0;
  return Distribution(std::move(domain), std::move(w));
}

QueryFn::QueryFn(DomainPtr domain, std::vector<double> values, QueryRange range)
    : domain_(std::move(domain)), v_(std::move(values)), range_(range) {
  if (!domain_) throw Error(ErrorKind::InvalidArgument, "query without domain");
  if (v_.size() != domain_->size()) throw Error(ErrorKind::DomainMismatch, "query table length");
  double lo = range_ == QueryRange::Signed ? -1.0 : 0.0;
  for (double x : v_)
    if (!(x >= lo - kNormTol && x <= 1.0 + kNormTol))
      throw Error(ErrorKind::RangeMismatch, "query value outside its range");
}

QueryFn QueryFn::negated() const {
  std::vector<double> v(v_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -v_[i];
  return QueryFn(domain_, std::move(v), QueryRange::Signed);
}

Measure::Measure(std::vector<double> w) : w_(std::move(w)) {
  double s = 0;
  for (double x : w_) {
    if (!(x >= 0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "negative measure weight");
    s += x;
  }
  if (w_.empty() || std::fabs(s - 1.0) > kNormTol) throw Error(ErrorKind::InvalidArgument, "measure does not sum to 1");
}

Measure Measure::uniform(std::size_t n) {
  return Measure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Measure Measure::point(std::size_t n, std::size_t i) {
  std::vector<double> w(n, 0.0);
  w.at(i) = 1.0;
  return Measure(std::move(w));
}

Measure Measure::uniform_on(std::size_t n, const std::vector<std::size_t>& support) {
  if (support.empty()) throw Error(ErrorKind::InvalidArgument, "empty support");
  std::vector<double> w(n, 0.0);
  for (auto i : support) w.at(i) = 1.0 / static_cast<double>(support.size());
  return Measure(std::move(w));
}

std::vector<std::size_t> Measure::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] > 0) s.push_back(i);
  return s;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> c(w.size());
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (s += w[i]);
  return c;
}

std::size_t sample_index(std::span<const double> cdf, Rng& rng) {
  double u = uniform01(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i >= cdf.size()) i = cdf.size() - 1;
  return i;
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double expectation(std::span<const double> d, std::span<const double> phi) {
  if (d.size() != phi.size()) throw Error(ErrorKind::DomainMismatch, "expectation");
  return dot(d, phi);
}

double expectation(const Distribution& d, const QueryFn& phi) {
  require_same_domain(d.domain(), phi.domain(), "expectation");
  return dot(d.span(), phi.span());
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::DomainMismatch, "kl_divergence");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    if (q[i] <= 0) throw Error(ErrorKind::SupportViolation, "KL divergence is infinite");
    s += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(s, 0.0);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  require_same_domain(p.domain(), q.domain(), "kl_divergence");
  return kl_divergence(p.span(), q.span());
}

Distribution uniform_mixture(const std::vector<Distribution>& dists) {
  if (dists.empty()) throw Error(ErrorKind::InvalidArgument, "mixture of no distributions");
  std::vector<double> m(dists[0].size(), 0.0);
  for (const auto& d : dists) {
    require_same_domain(d.domain(), dists[0].domain(), "uniform_mixture");
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += d[i];
  }
  double s = 0;
  for (double& x : m) s += (x /= static_cast<double>(dists.size()));
  for (double& x : m) x /= s;
  return Distribution(dists[0].domain(), std::move(m));
}

KlRadius kl_radius_upper(const std::vector<Distribution>& dists, const std::vector<Distribution>& extra_centers) {
  std::vector<Distribution> centers{uniform_mixture(dists)};
  centers.insert(centers.end(), extra_centers.begin(), extra_centers.end());
  KlRadius best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) {
    double r = 0;
    std::size_t arg = 0;
    bool finite = true;
    for (std::size_t j = 0; j < dists.size(); ++j) {
      double v;
      try {
        v = kl_divergence(dists[j], c);
      } catch (const Error&) {
        finite = false;
        break;
      }
      if (v > r) r = v, arg = j;
    }
    if (finite && r < best.value) best = KlRadius{r, c.weights(), arg};
  }
  return best;
}

std::vector<double> likelihood_hat(std::span<const double> d, std::span<const double> d0) {
  if (d.size() != d0.size()) throw Error(ErrorKind::DomainMismatch, "likelihood_hat");
  std::vector<double> h(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d0[i] > 0) {
      h[i] = d[i] / d0[i] - 1.0;
    } else {
      if (d[i] > 0) throw Error(ErrorKind::SupportViolation, "support of D not inside support of D0");
      h[i] = -1.0;
    }
  }
  return h;
}

std::vector<double> likelihood_hat(const Distribution& d, const Distribution& d0) {
  require_same_domain(d.domain(), d0.domain(), "likelihood_hat");
  return likelihood_hat(d.span(), d0.span());
}

double bayes_error(const Distribution& d) {
  const auto& dom = *d.domain();
  if (!dom.is_labeled()) throw Error(ErrorKind::InvalidArgument, "bayes_error needs a labeled domain");
  double s = 0;
  for (std::size_t z = 0; z < dom.base_size(); ++z) s += std::min(d[2 * z], d[2 * z + 1]);
  return s;
}

Distribution pac_lift(const Distribution& marginal, const std::vector<int>& labels, DomainPtr labeled) {
  if (!labeled->is_labeled() || labeled->base_size() != marginal.size() || labels.size() != marginal.size())
    throw Error(ErrorKind::DomainMismatch, "pac_lift");
  std::vector<double> w(labeled->size(), 0.0);
  for (std::size_t z = 0; z < marginal.size(); ++z) {
    if (labels[z] != 1 && labels[z] != -1) throw Error(ErrorKind::InvalidArgument, "labels must be +-1");
    w[FiniteDomain::labeled_index(z, labels[z])] = marginal[z];
  }
  return Distribution(std::move(labeled), std::move(w));
}

double classification_error(const Distribution& d, const std::vector<int>& h) {
  const auto& dom = *d.domain();
  if (!dom.is_labeled() || h.size() != dom.base_size()) throw Error(ErrorKind::DomainMismatch, "classification_error");
  double s = 0;
  for (std::size_t z = 0; z < h.size(); ++z) s += d[FiniteDomain::labeled_index(z, -h[z])];
  return s;
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

}  // namespace sqlab

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sqlab {

inline constexpr double kNormTol = 1e-12;
// strict "> tau" comparisons are realized as margin >= tau + kStrictSlack
inline constexpr double kStrictSlack = 1e-9;

enum class ErrorKind {
  InvalidArgument,
  DomainMismatch,
  SupportViolation,
  RangeMismatch,
  GuardExceeded,
  Infeasible,
  Unbounded,
  Uncoverable,
  UnsupportedPair,
  StreamExhausted,
  VerificationFailed,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Ordered finite domain. A labeled domain is Z x {-1,+1} with element (z,b)
// stored at index 2z + (b > 0).
class FiniteDomain {
 public:
  explicit FiniteDomain(std::vector<std::string> ids, std::size_t labeled_base = 0);

  static std::shared_ptr<const FiniteDomain> make(std::vector<std::string> ids);
  static std::shared_ptr<const FiniteDomain> indexed(std::size_t n);
  static std::shared_ptr<const FiniteDomain> labeled(const std::vector<std::string>& base);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> index_of(const std::string& id) const;

  bool is_labeled() const { return labeled_base_ > 0; }
  std::size_t base_size() const { return labeled_base_; }
  static std::size_t labeled_index(std::size_t z, int label) { return 2 * z + (label > 0 ? 1 : 0); }

  bool operator==(const FiniteDomain& o) const { return ids_ == o.ids_ && labeled_base_ == o.labeled_base_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::size_t labeled_base_ = 0;
};

using DomainPtr = std::shared_ptr<const FiniteDomain>;

bool same_domain(const DomainPtr& a, const DomainPtr& b);
void require_same_domain(const DomainPtr& a, const DomainPtr& b, const char* where);

class Distribution {
 public:
  Distribution() = default;
  Distribution(DomainPtr domain, std::vector<double> weights);

  static Distribution uniform(DomainPtr domain);
  static Distribution point(DomainPtr domain, std::size_t i);

  const DomainPtr& domain() const { return domain_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  std::span<const double> span() const { return w_; }
  bool operator==(const Distribution& o) const { return w_ == o.w_ && same_domain(domain_, o.domain_); }

 private:
  DomainPtr domain_;
  std::vector<double> w_;
};

enum class QueryRange { Signed, Unit };  // [-1,1] or [0,1]

class QueryFn {
 public:
  QueryFn() = default;
  QueryFn(DomainPtr domain, std::vector<double> values, QueryRange range = QueryRange::Signed);

  const DomainPtr& domain() const { return domain_; }
  QueryRange range() const { return range_; }
  std::size_t size() const { return v_.size(); }
  double operator()(std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  std::span<const double> span() const { return v_; }
  QueryFn negated() const;  // -phi, always Signed

 private:
  DomainPtr domain_;
  std::vector<double> v_;
  QueryRange range_ = QueryRange::Signed;
};

// Probability measure over an indexed collection (distributions, solutions, queries).
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<double> w);
  static Measure uniform(std::size_t n);
  static Measure point(std::size_t n, std::size_t i);
  static Measure uniform_on(std::size_t n, const std::vector<std::size_t>& support);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<std::size_t> support() const;

 private:
  std::vector<double> w_;
};

using Rng = std::mt19937_64;

// uniform double in [0,1) from the top 53 bits; stable across standard libraries
double uniform01(Rng& rng);
std::size_t sample_index(std::span<const double> cdf, Rng& rng);
std::vector<double> cumulative(std::span<const double> w);
Rng derived_rng(std::uint64_t seed, std::uint64_t stream);

double dot(std::span<const double> a, std::span<const double> b);
double expectation(const Distribution& d, const QueryFn& phi);
double expectation(std::span<const double> d, std::span<const double> phi);

// KL(p || q) in nats; throws SupportViolation if supp p is not inside supp q
double kl_divergence(const Distribution& p, const Distribution& q);
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct KlRadius {
  double value = 0;
  std::vector<double> center;
  std::size_t arg_max = 0;
};
Distribution uniform_mixture(const std::vector<Distribution>& dists);
// max_D KL(D || c), minimized over the uniform mixture and any extra centers
KlRadius kl_radius_upper(const std::vector<Distribution>& dists,
                         const std::vector<Distribution>& extra_centers = {});

// D/D0 - 1; points outside supp D0 map to -1
std::vector<double> likelihood_hat(const Distribution& d, const Distribution& d0);
std::vector<double> likelihood_hat(std::span<const double> d, std::span<const double> d0);

// labeled-domain helpers
double bayes_error(const Distribution& d);
Distribution pac_lift(const Distribution& marginal, const std::vector<int>& labels, DomainPtr labeled);
// Pr_D[h(z) != b] for a +-1 hypothesis over the base domain
double classification_error(const Distribution& d, const std::vector<int>& h);

std::vector<double> difference(std::span<const double> a, std::span<const double> b);
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace sqlab

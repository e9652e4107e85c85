#include "sqlab/problem_spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sqlab {

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::Decision: return "DECISION";
    case ProblemKind::Search: return "SEARCH";
    case ProblemKind::Verifiable: return "VERIFIABLE";
    case ProblemKind::Optimizing: return "OPTIMIZING";
    case ProblemKind::Pac: return "PAC";
  }
  return "?";
}

std::optional<ProblemKind> parse_problem_kind(const std::string& s) {
  for (auto k : {ProblemKind::Decision, ProblemKind::Search, ProblemKind::Verifiable, ProblemKind::Optimizing,
                 ProblemKind::Pac})
    if (s == problem_kind_name(k)) return k;
  return std::nullopt;
}

std::vector<std::size_t> ProblemSpec::solved_by(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < dists.size(); ++d)
    if (validity.at(f)[d]) out.push_back(d);
  return out;
}

std::vector<std::size_t> ProblemSpec::valid_solutions(std::size_t d) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < solutions.size(); ++f)
    if (validity[f].at(d)) out.push_back(f);
  return out;
}

bool ProblemSpec::in_unsolved_region(const Distribution& d0, double theta) const {
  for (const auto& q : verify) {
    if (!q) throw Error(ErrorKind::InvalidArgument, "solution without verification query");
    if (!(expectation(d0, *q) > theta)) return false;
  }
  return true;
}

void ProblemSpec::derive_validity() {
  validity.assign(solutions.size(), std::vector<bool>(dists.size(), false));
  if (kind == ProblemKind::Optimizing) {
    if (!eps) throw Error(ErrorKind::InvalidArgument, "optimizing problem needs eps");
    for (std::size_t d = 0; d < dists.size(); ++d) {
      double best = std::numeric_limits<double>::infinity();
      std::vector<double> v(solutions.size());
      for (std::size_t f = 0; f < solutions.size(); ++f) best = std::min(best, v[f] = expectation(dists[d], *verify.at(f)));
      for (std::size_t f = 0; f < solutions.size(); ++f) validity[f][d] = v[f] <= best + *eps + kNormTol;
    }
    return;
  }
  if (!threshold) throw Error(ErrorKind::InvalidArgument, "verifiable problem needs a threshold");
  for (std::size_t f = 0; f < solutions.size(); ++f)
    for (std::size_t d = 0; d < dists.size(); ++d)
      validity[f][d] = expectation(dists[d], *verify.at(f)) <= *threshold + kNormTol;
}

void ProblemSpec::validate() const {
  if (!domain) throw Error(ErrorKind::InvalidArgument, "problem without domain");
  if (dists.empty()) throw Error(ErrorKind::InvalidArgument, "problem without distributions");
  for (const auto& d : dists) require_same_domain(d.domain(), domain, "problem distribution");
  if (reference) require_same_domain(reference->domain(), domain, "problem reference");
  if (validity.size() != solutions.size()) throw Error(ErrorKind::InvalidArgument, "validity rows != solutions");
  for (const auto& row : validity)
    if (row.size() != dists.size()) throw Error(ErrorKind::InvalidArgument, "validity columns != dists");
  switch (kind) {
    case ProblemKind::Decision:
      if (!reference) throw Error(ErrorKind::InvalidArgument, "decision problem needs a reference");
      for (const auto& d : dists)
        if (d.weights() == reference->weights())
          throw Error(ErrorKind::InvalidArgument, "decision reference is one of the alternatives");
      break;
    case ProblemKind::Search:
      for (std::size_t d = 0; d < dists.size(); ++d)
        if (valid_solutions(d).empty())
          throw Error(ErrorKind::InvalidArgument, "distribution " + std::to_string(d) + " has no valid solution");
      break;
    case ProblemKind::Verifiable:
    case ProblemKind::Optimizing:
    case ProblemKind::Pac: {
      if (verify.size() != solutions.size()) throw Error(ErrorKind::InvalidArgument, "verification queries != solutions");
      for (const auto& q : verify) {
        if (!q) throw Error(ErrorKind::InvalidArgument, "solution without verification query");
        require_same_domain(q->domain(), domain, "verification query");
        if (q->range() != QueryRange::Unit) throw Error(ErrorKind::RangeMismatch, "verification queries map into [0,1]");
      }
      ProblemSpec copy = *this;
      copy.derive_validity();
      if (copy.validity != validity) throw Error(ErrorKind::InvalidArgument, "validity disagrees with verification queries");
      break;
    }
  }
}

ProblemSpec decision_as_search(const std::vector<Distribution>& dists, const Distribution& d0, std::string name) {
  ProblemSpec p;
  p.kind = ProblemKind::Search;
  p.name = std::move(name);
  p.domain = d0.domain();
  p.dists = dists;
  p.dists.push_back(d0);
  p.reference = d0;
  p.solutions = {"alternative", "reference"};
  p.validity.assign(2, std::vector<bool>(p.dists.size(), false));
  for (std::size_t d = 0; d < dists.size(); ++d) p.validity[0][d] = true;
  p.validity[1][dists.size()] = true;
  return p;
}

}  // namespace sqlab

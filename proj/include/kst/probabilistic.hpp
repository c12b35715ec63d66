#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "kst/family.hpp"
#include "kst/projection.hpp"

namespace kst {

inline constexpr double kSumTolerance = 1e-9;

/// Probabilities aligned with the canonical state order of a structure.
class StateDistribution {
 public:
  StateDistribution() = default;

  StateDistribution(KnowledgeStructure structure, std::vector<double> probs)
      : structure_(std::move(structure)), probs_(std::move(probs)) {
    if (probs_.size() != structure_.size())
      fail(ErrorCode::InvalidProbability, std::to_string(probs_.size()) + " probabilities for " +
                                              std::to_string(structure_.size()) + " states");
    double sum = 0;
    for (double p : probs_) {
      if (!(p >= 0) || !std::isfinite(p)) fail(ErrorCode::InvalidProbability, "negative or non-finite probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      fail(ErrorCode::InvalidProbability, "probabilities sum to " + std::to_string(sum));
  }

  /// Scales non-negative weights to sum one.
  static StateDistribution normalized(KnowledgeStructure structure, std::vector<double> weights) {
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0)) fail(ErrorCode::InvalidProbability, "weights have no mass");
    for (auto& w : weights) w /= sum;
    return StateDistribution(std::move(structure), std::move(weights));
  }

  const KnowledgeStructure& structure() const { return structure_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_.at(i); }
  double prob(const State& s) const {
    auto i = structure_.index_of(s);
    return i ? probs_[*i] : 0.0;
  }

  /// Total mass of the states containing item q.
  double item_mass(std::size_t q) const {
    double m = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i)
      if (structure_.state(i).test(q)) m += probs_[i];
    return m;
  }

  double max_prob() const {
    double m = 0;
    for (double p : probs_) m = std::max(m, p);
    return m;
  }

  /// Shannon entropy in bits.
  double entropy() const {
    double h = 0;
    for (double p : probs_)
      if (p > 0) h -= p * std::log2(p);
    return h;
  }

  bool is_positive() const {
    for (double p : probs_)
      if (!(p > 0)) return false;
    return true;
  }

 private:
  KnowledgeStructure structure_;
  std::vector<double> probs_;
};

/// Careless-error and lucky-guess probabilities per item.
struct ResponseParams {
  std::vector<double> beta;
  std::vector<double> eta;

  static ResponseParams uniform(std::size_t n, double beta = 0, double eta = 0) {
    ResponseParams p{std::vector<double>(n, beta), std::vector<double>(n, eta)};
    p.validate(n);
    return p;
  }

  void validate(std::size_t n) const {
    if (beta.size() != n || eta.size() != n)
      fail(ErrorCode::InvalidProbability, "response parameters do not match the domain size");
    for (double v : beta)
      if (!(v >= 0 && v <= 1)) fail(ErrorCode::InvalidProbability, "careless probability outside [0,1]");
    for (double v : eta)
      if (!(v >= 0 && v <= 1)) fail(ErrorCode::InvalidProbability, "lucky-guess probability outside [0,1]");
  }
};

inline StateDistribution uniform_distribution(const KnowledgeStructure& structure) {
  return StateDistribution(structure, std::vector<double>(structure.size(), 1.0 / static_cast<double>(structure.size())));
}

namespace detail {

inline std::vector<double> project_probs(const ProjectionResult& proj, const std::vector<double>& p) {
  std::vector<double> out(proj.structure.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) out[proj.trace_of[i]] += p[i];
  return out;
}

/// Each trace's mass spread evenly over the states having that trace.
inline std::vector<double> extend_probs(const ProjectionResult& proj, const std::vector<double>& p_prime) {
  std::vector<std::size_t> class_size(proj.structure.size(), 0);
  for (auto t : proj.trace_of) ++class_size[t];
  std::vector<double> out(proj.trace_of.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto t = proj.trace_of[i];
    out[i] = p_prime[t] / static_cast<double>(class_size[t]);
  }
  return out;
}

inline void renormalize(std::vector<double>& p) {
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= sum;
}

}  // namespace detail

/// p'(K') = sum of p(K) over the states with trace K'.
inline StateDistribution project_distribution(const StateDistribution& dist, const State& sub) {
  auto proj = project(dist.structure(), sub);
  auto p = detail::project_probs(proj, dist.probs());
  detail::renormalize(p);
  return StateDistribution(proj.structure, std::move(p));
}

inline StateDistribution project_distribution(const StateDistribution& dist, const std::vector<std::string>& sub) {
  return project_distribution(dist, dist.structure().domain().make_state(sub));
}

/// p+(K) = p'(K ∩ Q') / |{L : L ∩ Q' = K ∩ Q'}|.
inline StateDistribution extend_distribution(const KnowledgeStructure& structure, const State& sub,
                                             const StateDistribution& p_prime) {
  auto proj = project(structure, sub);
  const auto& given = p_prime.structure();
  if (given.domain() != proj.structure.domain())
    fail(ErrorCode::TraceMismatch, "distribution is not over the sub-domain " + structure.domain().format(sub));
  for (const auto& s : given)
    if (!proj.structure.contains(s))
      fail(ErrorCode::TraceMismatch, given.domain().format(s) + " is not a trace on the sub-domain");
  if (given.size() != proj.structure.size())
    fail(ErrorCode::TraceMismatch, "distribution misses some traces");
  auto p = detail::extend_probs(proj, p_prime.probs());
  detail::renormalize(p);
  return StateDistribution(structure, std::move(p));
}

}  // namespace kst

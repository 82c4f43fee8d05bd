#pragma once

#include <set>
#include <string>
#include <vector>

#include "mdg/distribution.hpp"
#include "mdg/state_space.hpp"

namespace mdg {

/// Guidance configuration: which class to steer toward and how strongly.
/// w = -1 recovers the unconditional dynamics, w = 0 the conditional ones.
struct GuidanceConfig {
  int class_index = 0;
  double w = 0.0;

  GuidanceConfig(int class_index_, double w_) : class_index(class_index_), w(w_) {
    if (w < -1.0) throw ConfigError("GuidanceConfig: w must be >= -1");
  }
};

/// Mixture of class-conditional distributions with positive weights summing
/// to 1. Conditionals must carry zero mass on every mask-containing state.
class MixtureModel {
 public:
  MixtureModel(StateSpace space, std::vector<std::string> labels, std::vector<double> weights,
               std::vector<DenseDistribution> conditionals);

  const StateSpace& space() const { return space_; }
  int num_classes() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  double weight(int k) const { return weights_[k]; }
  const DenseDistribution& conditional(int k) const { return conditionals_[k]; }
  int class_by_label(const std::string& label) const;

 private:
  StateSpace space_;
  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::vector<DenseDistribution> conditionals_;
};

/// Support of a distribution together with its per-dimension projections.
struct SupportSet {
  StateSpace space;
  std::set<Index> members;                     // flat indices, non-mask states
  std::vector<std::set<int>> marginal_supports;  // tokens per dimension
};

/// p(x) = sum_k a_k p(x|z_k).
DenseDistribution full_distribution(const MixtureModel& m);

/// Unnormalized tilt logs: log( p(x)^{-w} p(x|z)^{1+w} ) per non-mask state,
/// -inf wherever the conditional vanishes (support convention: a zero
/// conditional factor wins regardless of exponent signs). Mask states -inf.
std::vector<double> tilt_log_weights(const MixtureModel& m, const GuidanceConfig& g);

/// p^{z,w}(x) proportional to p(x)^{-w} p(x|z)^{1+w} over non-mask states.
DenseDistribution tilted_distribution(const MixtureModel& m, const GuidanceConfig& g);

/// log Z^{z,w} = log sum_x p(x)^{-w} p(x|z)^{1+w}; safe for very large w.
double log_normalizer_Z(const MixtureModel& m, const GuidanceConfig& g);
double normalizer_Z(const MixtureModel& m, const GuidanceConfig& g);

/// Renyi-type alpha-divergence D_alpha(mu1 | mu2) for alpha in (0,inf)\{1}.
double alpha_divergence(const DenseDistribution& mu1, const DenseDistribution& mu2, double alpha);

/// States with mass above tau, plus the per-dimension marginal supports.
SupportSet support_of(const DenseDistribution& d, double tau = 1e-12);

}  // namespace mdg

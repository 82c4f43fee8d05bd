#include "mdg/mixture.hpp"

#include <cmath>

#include "mdg/numeric.hpp"

namespace mdg {

MixtureModel::MixtureModel(StateSpace space, std::vector<std::string> labels,
                           std::vector<double> weights, std::vector<DenseDistribution> conditionals)
    : space_(space),
      labels_(std::move(labels)),
      weights_(std::move(weights)),
      conditionals_(std::move(conditionals)) {
  const size_t M = labels_.size();
  if (M == 0 || weights_.size() != M || conditionals_.size() != M) {
    throw ConfigError("MixtureModel: labels, weights and conditionals must align");
  }
  double wsum = 0.0;
  for (double a : weights_) {
    if (a <= 0.0) throw ConfigError("MixtureModel: every class weight must be > 0");
    wsum += a;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw ConfigError("MixtureModel: class weights sum to " + std::to_string(wsum));
  }
  for (const auto& c : conditionals_) {
    if (c.space() != space_) throw SpaceMismatch("MixtureModel: conditional on a different space");
    if (c.masked_mass() != 0.0) {
      throw ConfigError("MixtureModel: conditional assigns mass to a mask-containing state");
    }
  }
}

int MixtureModel::class_by_label(const std::string& label) const {
  for (size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == label) return static_cast<int>(k);
  }
  throw ConfigError("MixtureModel: unknown class label '" + label + "'");
}

DenseDistribution full_distribution(const MixtureModel& m) {
  Vector p = Vector::Zero(m.space().size());
  for (int k = 0; k < m.num_classes(); ++k) {
    p += m.weight(k) * m.conditional(k).probs();
  }
  return DenseDistribution(m.space(), std::move(p));
}

std::vector<double> tilt_log_weights(const MixtureModel& m, const GuidanceConfig& g) {
  if (g.class_index < 0 || g.class_index >= m.num_classes()) {
    throw ConfigError("tilt_log_weights: class index out of range");
  }
  const StateSpace& space = m.space();
  const DenseDistribution p = full_distribution(m);
  const DenseDistribution& cond = m.conditional(g.class_index);
  std::vector<double> logs(space.size(), kNegInf);
  for (Index i = 0; i < space.size(); ++i) {
    if (space.masked_count(i) > 0) continue;
    const double q = cond(i);
    if (q <= 0.0) continue;  // zero conditional factor forces the product to 0
    // q > 0 implies p(i) >= a_z * q > 0, so both logs are finite.
    logs[i] = -g.w * std::log(p(i)) + (1.0 + g.w) * std::log(q);
  }
  return logs;
}

DenseDistribution tilted_distribution(const MixtureModel& m, const GuidanceConfig& g) {
  const std::vector<double> logs = tilt_log_weights(m, g);
  const double log_z = log_sum_exp(logs);
  if (log_z == kNegInf) throw UnnormalizableTilt("tilted_distribution: empty conditional support");
  Vector v = Vector::Zero(m.space().size());
  for (Index i = 0; i < v.size(); ++i) v[i] = exp_or_zero(logs[i] - log_z);
  v /= v.sum();  // absorb rounding from the exp pass
  return DenseDistribution(m.space(), std::move(v));
}

double log_normalizer_Z(const MixtureModel& m, const GuidanceConfig& g) {
  const double log_z = log_sum_exp(tilt_log_weights(m, g));
  if (log_z == kNegInf) throw UnnormalizableTilt("log_normalizer_Z: empty conditional support");
  return log_z;
}

double normalizer_Z(const MixtureModel& m, const GuidanceConfig& g) {
  return std::exp(log_normalizer_Z(m, g));
}

double alpha_divergence(const DenseDistribution& mu1, const DenseDistribution& mu2, double alpha) {
  if (mu1.space() != mu2.space()) throw SpaceMismatch("alpha_divergence: different state spaces");
  if (alpha <= 0.0 || alpha == 1.0) {
    throw ConfigError("alpha_divergence: alpha must lie in (0, inf) excluding 1");
  }
  std::vector<double> terms;
  terms.reserve(mu1.space().size());
  for (Index i = 0; i < mu1.space().size(); ++i) {
    const double a = mu1(i);
    if (a == 0.0) continue;
    const double b = mu2(i);
    if (b == 0.0) {
      throw SupportViolation("alpha_divergence: mu1 has mass outside the support of mu2");
    }
    terms.push_back(alpha * std::log(a) - (alpha - 1.0) * std::log(b));
  }
  return log_sum_exp(terms) / (alpha - 1.0);
}

SupportSet support_of(const DenseDistribution& d, double tau) {
  if (tau < 0.0) throw ConfigError("support_of: tau must be >= 0");
  const StateSpace& space = d.space();
  SupportSet s{space, {}, std::vector<std::set<int>>(space.dims())};
  for (Index i = 0; i < space.size(); ++i) {
    if (space.masked_count(i) > 0 || d(i) <= tau) continue;
    s.members.insert(i);
    const State x = space.state_of(i);
    for (int dd = 0; dd < space.dims(); ++dd) s.marginal_supports[dd].insert(x[dd]);
  }
  return s;
}

}  // namespace mdg

#include "mdg/distribution.hpp"

#include <cmath>
#include <string>

namespace mdg {

DenseDistribution::DenseDistribution(StateSpace space, Vector probs)
    : space_(space), probs_(std::move(probs)) {
  if (probs_.size() != space_.size()) {
    throw SpaceMismatch("DenseDistribution: vector length " + std::to_string(probs_.size()) +
                        " does not match state count " + std::to_string(space_.size()));
  }
  for (Index i = 0; i < probs_.size(); ++i) {
    if (probs_[i] < 0.0) {
      if (probs_[i] > -1e-12) {
        probs_[i] = 0.0;
        ++clamped_entries_;
      } else {
        throw ConfigError("DenseDistribution: negative entry " + std::to_string(probs_[i]) +
                          " at index " + std::to_string(i));
      }
    }
  }
  const double sum = probs_.sum();
  if (std::abs(sum - 1.0) > 1e-10) {
    throw ConfigError("DenseDistribution: entries sum to " + std::to_string(sum));
  }
}

DenseDistribution DenseDistribution::delta(const StateSpace& space, Index at) {
  Vector v = Vector::Zero(space.size());
  v[at] = 1.0;
  return DenseDistribution(space, std::move(v));
}

DenseDistribution DenseDistribution::delta(const StateSpace& space, const State& at) {
  return delta(space, space.index_of(at));
}

DenseDistribution DenseDistribution::uniform_non_mask(const StateSpace& space) {
  Vector v = Vector::Zero(space.size());
  Index count = 0;
  for (Index i = 0; i < space.size(); ++i) {
    if (space.masked_count(i) == 0) ++count;
  }
  for (Index i = 0; i < space.size(); ++i) {
    if (space.masked_count(i) == 0) v[i] = 1.0 / static_cast<double>(count);
  }
  return DenseDistribution(space, std::move(v));
}

double DenseDistribution::masked_mass() const {
  double mass = 0.0;
  for (Index i = 0; i < probs_.size(); ++i) {
    if (space_.masked_count(i) > 0) mass += probs_[i];
  }
  return mass;
}

}  // namespace mdg

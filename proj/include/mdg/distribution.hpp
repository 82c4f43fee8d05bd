#pragma once

#include <Eigen/Dense>

#include "mdg/state_space.hpp"

namespace mdg {

/// Dense probability vector over the full N^D grid. Entries are clamped to 0
/// when arithmetic produces values in (-1e-12, 0); construction rejects
/// anything more negative or a total mass off 1 by more than 1e-10.
class DenseDistribution {
 public:
  DenseDistribution(StateSpace space, Vector probs);

  static DenseDistribution delta(const StateSpace& space, Index at);
  static DenseDistribution delta(const StateSpace& space, const State& at);
  /// Uniform over states containing no mask coordinate.
  static DenseDistribution uniform_non_mask(const StateSpace& space);

  const StateSpace& space() const { return space_; }
  const Vector& probs() const { return probs_; }
  double operator()(Index idx) const { return probs_[idx]; }
  double operator()(const State& x) const { return probs_[space_.index_of(x)]; }

  /// Total mass on states with at least one masked coordinate.
  double masked_mass() const;

  int clamped_entries() const { return clamped_entries_; }

 private:
  StateSpace space_;
  Vector probs_;
  int clamped_entries_ = 0;
};

}  // namespace mdg

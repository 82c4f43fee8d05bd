#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>

#include "mdg/distribution.hpp"
#include "mdg/mixture.hpp"

namespace mdg {

enum class GeneratorKind { Unguided, Conditional, Guided };

/// Reverse-time generator in factorized form: the full rate matrix at time t
/// is time_factor(t) * base, where base is time-independent and sparse (one
/// entry per single-coordinate unmasking, plus diagonals). Columns index the
/// source state and sum to zero; fully unmasked states are absorbing.
class ReverseGenerator {
 public:
  using Sparse = Eigen::SparseMatrix<double>;

  ReverseGenerator(StateSpace space, Sparse base, GeneratorKind kind, double w,
                   Index zeroed_columns);

  const StateSpace& space() const { return space_; }
  const Sparse& base() const { return base_; }
  GeneratorKind kind() const { return kind_; }
  double guidance_w() const { return w_; }

  /// Scalar time factor e^{-t} / (1 - e^{-t}) of the full rate at time t.
  static double time_factor(double t) { return std::exp(-t) / -std::expm1(-t); }

  /// Columns whose source state is unreachable (zero partial marginal);
  /// their rates were zeroed rather than left 0/0.
  Index zeroed_columns() const { return zeroed_columns_; }

  /// Largest exit rate max_x -base(x,x); uniformization constant.
  double max_exit_rate() const;
  /// Smallest nonzero exit rate among states that have one.
  double min_exit_rate() const;

 private:
  StateSpace space_;
  Sparse base_;
  GeneratorKind kind_;
  double w_;
  Index zeroed_columns_;
};

/// Reverse generator of the forward process started at mu: each unmasking
/// rate is the partial-marginal ratio of mu given the unmasked coordinates
/// of the source state (mu must be a data distribution on non-mask states).
ReverseGenerator unguided_reverse(const DenseDistribution& mu);

/// Guided generator: entrywise base_unguided^{-w} * base_conditional^{1+w}
/// off the diagonal, diagonals rebuilt to zero column sums. The scalar time
/// factor of the two power terms collapses to a single e^{-t}/(1-e^{-t}).
ReverseGenerator guided_reverse(const MixtureModel& m, const GuidanceConfig& g);

/// Triplet-list dump (row col value per line) of the base matrix.
void write_triplets(std::ostream& os, const ReverseGenerator& gen);

}  // namespace mdg

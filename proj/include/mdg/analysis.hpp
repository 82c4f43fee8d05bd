#pragma once

#include <array>
#include <map>
#include <vector>

#include "mdg/closed_form.hpp"
#include "mdg/distribution.hpp"
#include "mdg/mixture.hpp"

namespace mdg {

/// Total variation distance, half the L1 distance; in [0, 1].
double tv(const DenseDistribution& p, const DenseDistribution& q);

/// TV along the reverse dynamics on a time grid. log_values stays finite in
/// the double-exponential regime where values underflows to 0.
struct TVCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> log_values;
  double w = 0.0;
};

/// 1D: TV(q_t^{z,w}, p^{z,w}) = r(t)^Z, computed directly.
TVCurve tv_curve_1d_closed(const MixtureModel& m, const GuidanceConfig& g, double T,
                           const std::vector<double>& times);

/// 2D: TV(q_t^{z,w}, q_T^{z,w}) from the closed-form densities, with a
/// log-space evaluation of the per-state differences for large w.
TVCurve tv_curve_2d(const MixtureModel& m, const GuidanceConfig& g, double T,
                    const std::vector<double>& times);

struct DecayFit {
  double slope;
  double intercept;
  double max_residual;
  int points_used;
};

/// Least-squares fit of ln(-ln TV(t0)) against w across curves sharing a
/// time grid; t0 is picked by index. Degenerate points (TV exactly 0 or 1)
/// are dropped from the fit.
DecayFit decay_exponent_fit(const std::vector<TVCurve>& curves, std::size_t t0_index);

/// The 1D terminal law assembled from the support case analysis (disjoint
/// supports return the guided conditional; overlapping supports the
/// piecewise tilt). An independent re-expression of tilted_distribution.
DenseDistribution sampled_distribution_1d_cases(const MixtureModel& m, const GuidanceConfig& g);

enum class Region { R1, R2_1, R2_2, R3, R4 };

/// Partition of the guided class's support by how states and marginals are
/// shared with other classes, with per-state guidance weights and their
/// w -> infinity limits.
struct RegionDecomposition {
  StateSpace space;
  int guided_class;
  double w;
  std::map<Index, Region> region_of;           // over the guided support X_1
  std::map<Index, double> weight;              // A^{z,w}(x), unnormalized
  std::map<Index, double> limit_weight;        // A^{z,inf}(x)
  std::array<std::set<Index>, 5> regions;      // indexed by Region
  std::set<Index> support;                     // X_1
  std::vector<std::set<int>> marginal_support; // X_{1,d}
  std::vector<std::set<int>> shared_marginal;  // S_{1,d}
};

RegionDecomposition region_decomposition_2d(const MixtureModel& m, int guided_class, double w,
                                            double tau = 1e-12);

/// q^{z1,inf} proportional to A^{z1,inf}(x) p(x|z_1); zero on the overlap.
DenseDistribution limit_distribution_2d(const RegionDecomposition& rd, const MixtureModel& m);

/// Local mean and covariance of d restricted to the states in A.
struct LocalMoments {
  Vector mean;
  Eigen::MatrixXd covariance;
};
LocalMoments local_moments(const DenseDistribution& d, const std::set<Index>& A);

}  // namespace mdg

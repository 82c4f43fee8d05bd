#pragma once

#include "mdg/distribution.hpp"
#include "mdg/mixture.hpp"

namespace mdg {

/// Reverse-time progress variable r(t) = (1 - e^{-(T-t)}) / (1 - e^{-T}),
/// strictly decreasing from r(0) = 1 to r(T) = 0.
struct TimeRatio {
  double T;
  double t;
  double r;

  TimeRatio(double T_, double t_) : T(T_), t(t_) {
    if (T <= 0.0) throw ConfigError("TimeRatio: horizon must be > 0");
    if (t < 0.0 || t > T) throw ConfigError("TimeRatio: t must lie in [0, T]");
    r = std::expm1(-(T - t)) / std::expm1(-T);
  }
};

/// Per-token amplification factors of the two-dimensional guided dynamics:
/// c[l], d[l] for l in {1..N} (index l-1), the normalizer Z (kept in logs),
/// and the slowest eigenvalue lambda_NN = -Z(1/c_N + 1/d_N).
struct Coefficients2D {
  Vector log_c;        // size N; +inf marks undefined-and-unused rows
  Vector log_d;
  double log_Z;
  double lambda_NN;    // <= -2 for w >= 0
  std::vector<bool> c_defined;
  std::vector<bool> d_defined;

  double c(int token) const { return std::exp(log_c[token - 1]); }
  double d(int token) const { return std::exp(log_d[token - 1]); }
  double Z() const { return std::exp(log_Z); }
};

/// q_t(x) = (1 - r(t)) p(x) for x < N, q_t(N) = r(t). D = 1 only.
DenseDistribution solve_1d_unguided(const DenseDistribution& p, double T, double t);

/// q_t(x) = (1 - r(t)^Z) p^{z,w}(x) for x < N, q_t(N) = r(t)^Z, with
/// Z the tilt normalizer. r^Z underflows to exact 0 for very large Z.
DenseDistribution solve_1d_guided(const MixtureModel& m, const GuidanceConfig& g, double T,
                                  double t);

/// Row/column amplification factors and slowest eigenvalue. D = 2 only.
Coefficients2D coefficients_2d(const MixtureModel& m, const GuidanceConfig& g);

/// The time profile alpha_t(x) of the 2D guided solution, covering all four
/// masking patterns of x. Near-collision of lambda_NN with -c or -d is
/// resolved by the analytic limit of the divided difference.
double alpha_coefficient(const Coefficients2D& coef, const State& x, const TimeRatio& tr);

/// Full 2D guided density at time t, assembled from alpha_coefficient.
DenseDistribution solve_2d_guided(const MixtureModel& m, const GuidanceConfig& g, double T,
                                  double t);

/// Terminal law of the 2D guided dynamics:
/// q_T(x) = ((1/c_{x1} + 1/d_{x2}) / (1/c_N + 1/d_N)) p^{z,w}(x).
/// Evaluated in log space so very large w stays finite.
DenseDistribution sampled_distribution_2d(const MixtureModel& m, const GuidanceConfig& g);

/// True when the last alpha_coefficient evaluation on this thread used the
/// eigenvalue-collision limit.
bool last_alpha_used_collision_limit();

}  // namespace mdg

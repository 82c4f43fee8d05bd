#pragma once

#include <vector>

#include "mdg/distribution.hpp"
#include "mdg/rates.hpp"

namespace mdg {

enum class OracleMethod { MatrixExponential, Ode };

struct OracleSolution {
  std::vector<double> times;
  std::vector<DenseDistribution> densities;
  OracleMethod method;
  double tolerance;
};

/// exp(s * base) * v by uniformization: a Poisson mixture of powers of the
/// stochastic matrix I + base / rate_bound. Iterates stay in the simplex, so
/// the truncation error is controlled by the Poisson tail (kept < 1e-13).
Vector expm_action(const ReverseGenerator::Sparse& base, double s, Vector v);

/// Exact densities along the reverse dynamics: q_t = exp(ln(1/r(t)) * base) q0.
/// The singular time change is handled analytically; t = T is serviced by the
/// exact jump-chain absorption law (one topological sweep, no truncation).
OracleSolution evolve_exact(const ReverseGenerator& gen, double T, const std::vector<double>& times,
                            const DenseDistribution& q0);

/// Second-opinion fixed-step RK4 integration of dq/dt = time_factor(T-t) base q.
/// Requested times must stay at least one step away from T.
OracleSolution evolve_ode(const ReverseGenerator& gen, double T, const std::vector<double>& times,
                          const DenseDistribution& q0, double step);

}  // namespace mdg

#include "mdg/oracle.hpp"

#include <cmath>

#include "mdg/numeric.hpp"

namespace mdg {

namespace {

// s = ln(1/r(t)), the integral of the time factor over [0, t].
double time_change(double T, double t) {
  return std::log(std::expm1(-T) / std::expm1(-(T - t)));
}

Vector normalized_clamped(Vector v) {
  for (Index i = 0; i < v.size(); ++i) v[i] = std::max(v[i], 0.0);
  return v / v.sum();
}

// Exact t = T limit: every jump strictly reduces the masked count, so one
// sweep in decreasing masked count pushes all transient mass to the
// absorbing states with the embedded jump-chain probabilities.
Vector absorb_all_mass(const ReverseGenerator& gen, Vector mass) {
  const StateSpace& space = gen.space();
  const auto& base = gen.base();
  std::vector<std::vector<Index>> by_masked(static_cast<std::size_t>(space.dims()) + 1);
  for (Index x = 0; x < space.size(); ++x) {
    by_masked[static_cast<std::size_t>(space.masked_count(x))].push_back(x);
  }
  for (int u = space.dims(); u >= 1; --u) {
    for (Index x : by_masked[static_cast<std::size_t>(u)]) {
      const double m = mass[x];
      if (m <= 0.0) continue;
      const double exit = -base.coeff(x, x);
      if (exit <= 0.0) continue;  // unreachable zeroed column; keep its (zero) mass
      for (ReverseGenerator::Sparse::InnerIterator it(base, x); it; ++it) {
        if (it.row() == x) continue;
        mass[it.row()] += m * it.value() / exit;
      }
      mass[x] = 0.0;
    }
  }
  return mass;
}

}  // namespace

Vector expm_action(const ReverseGenerator::Sparse& base, double s, Vector v) {
  if (s <= 0.0) return v;
  double rate_bound = 0.0;
  for (Index i = 0; i < base.outerSize(); ++i) {
    rate_bound = std::max(rate_bound, -base.coeff(i, i));
  }
  if (rate_bound == 0.0) return v;
  const double mean = s * rate_bound;
  // P = I + base / rate_bound is column-stochastic with nonnegative entries.
  Vector acc = Vector::Zero(v.size());
  Vector power = v;
  double log_mean = std::log(mean);
  double cumulative = 0.0;
  const Index max_terms =
      static_cast<Index>(mean + 12.0 * std::sqrt(mean + 1.0) + 60.0);
  for (Index k = 0; k <= max_terms; ++k) {
    const double log_weight = -mean + k * log_mean - std::lgamma(static_cast<double>(k) + 1.0);
    const double weight = exp_or_zero(log_weight);
    if (weight > 0.0) {
      acc += weight * power;
      cumulative += weight;
      if (1.0 - cumulative < 1e-13) break;
    }
    power += (base * power) / rate_bound;  // power <- P * power
  }
  // Assign the Poisson tail (< 1e-13) to the last computed power so the
  // result stays exactly on the simplex.
  acc += (1.0 - cumulative) * power;
  return acc;
}

OracleSolution evolve_exact(const ReverseGenerator& gen, double T, const std::vector<double>& times,
                            const DenseDistribution& q0) {
  if (q0.space() != gen.space()) throw SpaceMismatch("evolve_exact: q0 on a different space");
  OracleSolution sol{times, {}, OracleMethod::MatrixExponential, 1e-13};
  for (double t : times) {
    if (t < 0.0 || t > T) throw ConfigError("evolve_exact: time outside [0, T]");
    if (t >= T) {
      // Infinite time change: the exact limit is the jump-chain absorption law.
      sol.densities.emplace_back(gen.space(), normalized_clamped(absorb_all_mass(gen, q0.probs())));
      continue;
    }
    const double s = time_change(T, t);
    sol.densities.emplace_back(gen.space(), normalized_clamped(expm_action(gen.base(), s, q0.probs())));
  }
  return sol;
}

OracleSolution evolve_ode(const ReverseGenerator& gen, double T, const std::vector<double>& times,
                          const DenseDistribution& q0, double step) {
  if (step <= 0.0) throw ConfigError("evolve_ode: step must be > 0");
  if (q0.space() != gen.space()) throw SpaceMismatch("evolve_ode: q0 on a different space");
  for (double t : times) {
    if (t < 0.0 || t > T - step) {
      throw ConfigError("evolve_ode: times must stay at least one step away from T");
    }
  }
  const auto& base = gen.base();
  const auto rhs = [&](double t, const Vector& q) -> Vector {
    return ReverseGenerator::time_factor(T - t) * (base * q);
  };
  OracleSolution sol{times, {}, OracleMethod::Ode, 0.0};
  Vector q = q0.probs();
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw ConfigError("evolve_ode: times must be nondecreasing");
    while (t < target - 1e-15) {
      const double h = std::min(step, target - t);
      const Vector k1 = rhs(t, q);
      const Vector k2 = rhs(t + 0.5 * h, q + 0.5 * h * k1);
      const Vector k3 = rhs(t + 0.5 * h, q + 0.5 * h * k2);
      const Vector k4 = rhs(t + h, q + h * k3);
      q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
    if (q.minCoeff() < -1e-8) {
      throw StepTooCoarse("evolve_ode: negativity beyond tolerance; reduce the step");
    }
    sol.densities.emplace_back(gen.space(), normalized_clamped(q));
  }
  return sol;
}

}  // namespace mdg

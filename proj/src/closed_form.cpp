#include "mdg/closed_form.hpp"

#include <cmath>

#include "mdg/numeric.hpp"

namespace mdg {

namespace {

constexpr double kCollisionTol = 1e-9;
thread_local bool g_collision_limit_used = false;

// r^a * ln r with the a > 0 limit value 0 at r = 0.
double pow_ratio_log(double r, double a) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 0.0;
  const double p = pow_ratio(r, a);
  return p == 0.0 ? 0.0 : p * std::log(r);
}

// G(a) = (1 - r^a) / a.
double profile_g(double r, double a) { return (1.0 - pow_ratio(r, a)) / a; }

// -(G(a) - G(B)) / (a - B), with the confluent limit -G'(a) when a ~ B.
double divided_difference_g(double r, double a, double big) {
  if (std::abs(a - big) < kCollisionTol) {
    g_collision_limit_used = true;
    return (a * pow_ratio_log(r, a) + 1.0 - pow_ratio(r, a)) / (a * a);
  }
  return -(profile_g(r, a) - profile_g(r, big)) / (a - big);
}

// -(r^a - r^B) / (a - B), with the confluent limit -r^a ln r.
double divided_difference_pow(double r, double a, double big) {
  if (std::abs(a - big) < kCollisionTol) {
    g_collision_limit_used = true;
    return -pow_ratio_log(r, a);
  }
  return -(pow_ratio(r, a) - pow_ratio(r, big)) / (a - big);
}

void require_dims(const StateSpace& space, int dims, const char* where) {
  if (space.dims() != dims) {
    throw DimensionMismatch(std::string(where) + ": needs D = " + std::to_string(dims));
  }
}

}  // namespace

bool last_alpha_used_collision_limit() { return g_collision_limit_used; }

DenseDistribution solve_1d_unguided(const DenseDistribution& p, double T, double t) {
  require_dims(p.space(), 1, "solve_1d_unguided");
  const TimeRatio tr(T, t);
  const int N = p.space().alphabet();
  Vector q(N);
  for (int x = 0; x < N - 1; ++x) q[x] = (1.0 - tr.r) * p(x);
  q[N - 1] = tr.r;
  return DenseDistribution(p.space(), std::move(q));
}

DenseDistribution solve_1d_guided(const MixtureModel& m, const GuidanceConfig& g, double T,
                                  double t) {
  require_dims(m.space(), 1, "solve_1d_guided");
  const TimeRatio tr(T, t);
  const double z = std::exp(log_normalizer_Z(m, g));
  const double mask_mass = pow_ratio(tr.r, z);
  const DenseDistribution tilt = tilted_distribution(m, g);
  const int N = m.space().alphabet();
  Vector q(N);
  for (int x = 0; x < N - 1; ++x) q[x] = (1.0 - mask_mass) * tilt(x);
  q[N - 1] = mask_mass;
  return DenseDistribution(m.space(), std::move(q));
}

Coefficients2D coefficients_2d(const MixtureModel& m, const GuidanceConfig& g) {
  require_dims(m.space(), 2, "coefficients_2d");
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const std::vector<double> lu = tilt_log_weights(m, g);  // log of Z * p^{z,w}
  const DenseDistribution p = full_distribution(m);
  const DenseDistribution& cond = m.conditional(g.class_index);

  // Marginals of the full and conditional distributions along each axis.
  Vector p1 = Vector::Zero(N), p2 = Vector::Zero(N), c1 = Vector::Zero(N), c2 = Vector::Zero(N);
  for (int i = 0; i < N - 1; ++i) {
    for (int j = 0; j < N - 1; ++j) {
      const Index idx = static_cast<Index>(i) * N + j;
      p1[i] += p(idx);
      p2[j] += p(idx);
      c1[i] += cond(idx);
      c2[j] += cond(idx);
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  Coefficients2D coef;
  coef.log_c = Vector::Constant(N, inf);
  coef.log_d = Vector::Constant(N, inf);
  coef.c_defined.assign(N, false);
  coef.d_defined.assign(N, false);

  std::vector<double> row_tilt(N - 1, kNegInf), col_tilt(N - 1, kNegInf);
  std::vector<double> marg1_tilt, marg2_tilt;
  for (int i = 0; i < N - 1; ++i) {
    std::vector<double> row;
    for (int j = 0; j < N - 1; ++j) row.push_back(lu[static_cast<Index>(i) * N + j]);
    row_tilt[i] = log_sum_exp(row);
    if (c1[i] > 0.0) marg1_tilt.push_back(-g.w * std::log(p1[i]) + (1.0 + g.w) * std::log(c1[i]));
  }
  for (int j = 0; j < N - 1; ++j) {
    std::vector<double> col;
    for (int i = 0; i < N - 1; ++i) col.push_back(lu[static_cast<Index>(i) * N + j]);
    col_tilt[j] = log_sum_exp(col);
    if (c2[j] > 0.0) marg2_tilt.push_back(-g.w * std::log(p2[j]) + (1.0 + g.w) * std::log(c2[j]));
  }

  std::vector<double> all;
  for (double v : lu) {
    if (v != kNegInf) all.push_back(v);
  }
  coef.log_Z = log_sum_exp(all);
  if (coef.log_Z == kNegInf) throw UnnormalizableTilt("coefficients_2d: empty conditional support");

  for (int i = 0; i < N - 1; ++i) {
    if (c1[i] <= 0.0) continue;  // outside the conditional's marginal support
    coef.log_c[i] = row_tilt[i] - (-g.w * std::log(p1[i]) + (1.0 + g.w) * std::log(c1[i]));
    coef.c_defined[i] = true;
  }
  for (int j = 0; j < N - 1; ++j) {
    if (c2[j] <= 0.0) continue;
    coef.log_d[j] = col_tilt[j] - (-g.w * std::log(p2[j]) + (1.0 + g.w) * std::log(c2[j]));
    coef.d_defined[j] = true;
  }
  const double log_marg1 = log_sum_exp(marg1_tilt);  // log(Z / c_N)
  const double log_marg2 = log_sum_exp(marg2_tilt);  // log(Z / d_N)
  coef.log_c[N - 1] = coef.log_Z - log_marg1;
  coef.log_d[N - 1] = coef.log_Z - log_marg2;
  coef.c_defined[N - 1] = coef.d_defined[N - 1] = true;
  coef.lambda_NN = -(std::exp(log_marg1) + std::exp(log_marg2));
  return coef;
}

double alpha_coefficient(const Coefficients2D& coef, const State& x, const TimeRatio& tr) {
  if (x.size() != 2) throw DimensionMismatch("alpha_coefficient: needs a 2D state");
  g_collision_limit_used = false;
  const int N = static_cast<int>(coef.log_c.size());
  const double big = -coef.lambda_NN;
  const bool m1 = x[0] == N;
  const bool m2 = x[1] == N;
  const double r = tr.r;
  if (m1 && m2) return pow_ratio(r, big);
  if (!m1 && !m2) {
    return divided_difference_g(r, coef.c(x[0]), big) + divided_difference_g(r, coef.d(x[1]), big);
  }
  if (!m1) {
    const double c = coef.c(x[0]);
    return divided_difference_pow(r, c, big) / c;
  }
  const double d = coef.d(x[1]);
  return divided_difference_pow(r, d, big) / d;
}

DenseDistribution solve_2d_guided(const MixtureModel& m, const GuidanceConfig& g, double T,
                                  double t) {
  require_dims(m.space(), 2, "solve_2d_guided");
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const TimeRatio tr(T, t);
  const Coefficients2D coef = coefficients_2d(m, g);
  const std::vector<double> lu = tilt_log_weights(m, g);  // log of Z * p^{z,w}

  Vector row_u = Vector::Zero(N - 1), col_u = Vector::Zero(N - 1);
  for (int i = 0; i < N - 1; ++i) {
    for (int j = 0; j < N - 1; ++j) {
      const double u = exp_or_zero(lu[static_cast<Index>(i) * N + j]);
      row_u[i] += u;
      col_u[j] += u;
    }
  }

  Vector q = Vector::Zero(space.size());
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      const Index idx = static_cast<Index>(i - 1) * N + (j - 1);
      const bool mi = i == N, mj = j == N;
      double weight;
      if (mi && mj) {
        weight = 1.0;
      } else if (!mi && !mj) {
        weight = exp_or_zero(lu[idx]);
        if (weight == 0.0) continue;
      } else {
        weight = mi ? col_u[j - 1] : row_u[i - 1];
        if (weight == 0.0) continue;
      }
      q[idx] = alpha_coefficient(coef, {i, j}, tr) * weight;
    }
  }
  const double sum = q.sum();
  if (std::abs(sum - 1.0) > 1e-10) {
    throw NormalizationDrift("solve_2d_guided: assembled density sums to " + std::to_string(sum));
  }
  q /= sum;
  return DenseDistribution(space, std::move(q));
}

DenseDistribution sampled_distribution_2d(const MixtureModel& m, const GuidanceConfig& g) {
  require_dims(m.space(), 2, "sampled_distribution_2d");
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const Coefficients2D coef = coefficients_2d(m, g);
  const std::vector<double> lu = tilt_log_weights(m, g);
  // log(1/c_N + 1/d_N)
  const double log_corner = log_sum_exp({-coef.log_c[N - 1], -coef.log_d[N - 1]});

  Vector q = Vector::Zero(space.size());
  for (int i = 1; i < N; ++i) {
    for (int j = 1; j < N; ++j) {
      const Index idx = static_cast<Index>(i - 1) * N + (j - 1);
      if (lu[idx] == kNegInf) continue;
      const double log_pair = log_sum_exp({-coef.log_c[i - 1], -coef.log_d[j - 1]});
      q[idx] = exp_or_zero(log_pair - log_corner + lu[idx] - coef.log_Z);
    }
  }
  const double sum = q.sum();
  if (std::abs(sum - 1.0) > 1e-8) {
    throw NormalizationDrift("sampled_distribution_2d: weights sum to " + std::to_string(sum));
  }
  q /= sum;
  return DenseDistribution(space, std::move(q));
}

}  // namespace mdg

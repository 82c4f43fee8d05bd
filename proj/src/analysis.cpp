#include "mdg/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "mdg/numeric.hpp"

namespace mdg {

namespace {

// Collision threshold on log|a - B|; matches the closed-form module's 1e-9.
const double kLogCollisionTol = std::log(1e-9);

void require_dims(const StateSpace& space, int dims, const char* where) {
  if (space.dims() != dims) {
    throw DimensionMismatch(std::string(where) + ": needs D = " + std::to_string(dims));
  }
}

// a * ln r evaluated from log a, saturating to -inf when a overflows
// (only used with ln r < 0).
double scale_log_r(double log_a, double lr) {
  const double a = std::exp(log_a);
  return a * lr;
}

// E(a) = (r^a/a - r^B/B) / (a - B), the gap between the time profile and its
// terminal value, carried in signed log space. log_a, log_B are ln a, ln B.
LogSigned profile_gap(double lr, double log_a, double log_B) {
  const LogSigned fa = LogSigned::from_log(scale_log_r(log_a, lr) - log_a);
  const LogSigned fB = LogSigned::from_log(scale_log_r(log_B, lr) - log_B);
  const LogSigned denom = LogSigned::from_log(log_a) - LogSigned::from_log(log_B);
  if (denom.sign == 0 || denom.log_abs < kLogCollisionTol) {
    // limit a -> B: r^B (B ln r - 1) / B^2
    const double B_lr = scale_log_r(log_B, lr);
    return LogSigned::from_log(B_lr) * LogSigned::from_value(B_lr - 1.0) /
           LogSigned::from_log(2.0 * log_B);
  }
  return (fa - fB) / denom;
}

// beta for a one-masked state: (r^B - r^a) / (a (a - B)), in signed log space.
LogSigned one_masked_profile(double lr, double log_a, double log_B) {
  const LogSigned fa = LogSigned::from_log(scale_log_r(log_a, lr));
  const LogSigned fB = LogSigned::from_log(scale_log_r(log_B, lr));
  const LogSigned inv_a = LogSigned::from_log(-log_a);
  const LogSigned denom = LogSigned::from_log(log_a) - LogSigned::from_log(log_B);
  if (denom.sign == 0 || denom.log_abs < kLogCollisionTol) {
    // limit a -> B: -r^a ln r / a
    return fa * LogSigned::from_value(-lr) * inv_a;
  }
  return (fB - fa) / denom * inv_a;
}

}  // namespace

double tv(const DenseDistribution& p, const DenseDistribution& q) {
  if (p.space() != q.space()) throw SpaceMismatch("tv: distributions on different state spaces");
  return 0.5 * (p.probs() - q.probs()).lpNorm<1>();
}

TVCurve tv_curve_1d_closed(const MixtureModel& m, const GuidanceConfig& g, double T,
                           const std::vector<double>& times) {
  require_dims(m.space(), 1, "tv_curve_1d_closed");
  const double z = normalizer_Z(m, g);
  TVCurve curve;
  curve.times = times;
  curve.w = g.w;
  for (double t : times) {
    const TimeRatio tr(T, t);
    curve.values.push_back(pow_ratio(tr.r, z));
    curve.log_values.push_back(tr.r > 0.0 ? z * std::log(tr.r) : kNegInf);
  }
  return curve;
}

TVCurve tv_curve_2d(const MixtureModel& m, const GuidanceConfig& g, double T,
                    const std::vector<double>& times) {
  require_dims(m.space(), 2, "tv_curve_2d");
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const Coefficients2D coef = coefficients_2d(m, g);
  const std::vector<double> lu = tilt_log_weights(m, g);  // log of Z * p^{z,w}
  const double log_B =
      log_sum_exp({coef.log_Z - coef.log_c[N - 1], coef.log_Z - coef.log_d[N - 1]});

  std::vector<double> log_row(N - 1, kNegInf), log_col(N - 1, kNegInf);
  for (int i = 0; i < N - 1; ++i) {
    std::vector<double> row;
    for (int j = 0; j < N - 1; ++j) row.push_back(lu[static_cast<Index>(i) * N + j]);
    log_row[i] = log_sum_exp(row);
  }
  for (int j = 0; j < N - 1; ++j) {
    std::vector<double> col;
    for (int i = 0; i < N - 1; ++i) col.push_back(lu[static_cast<Index>(i) * N + j]);
    log_col[j] = log_sum_exp(col);
  }

  TVCurve curve;
  curve.times = times;
  curve.w = g.w;
  for (double t : times) {
    const TimeRatio tr(T, t);
    if (tr.r <= 0.0) {  // t = T: the two densities coincide by definition
      curve.values.push_back(0.0);
      curve.log_values.push_back(kNegInf);
      continue;
    }
    if (tr.r >= 1.0) {  // t = 0: point mass at the all-mask state vs none there
      curve.values.push_back(1.0);
      curve.log_values.push_back(0.0);
      continue;
    }
    const double lr = std::log(tr.r);
    // Per-state differences q_t(x) - q_T(x), accumulated as log|.|.
    std::vector<double> log_abs_diff;
    for (int i = 0; i < N - 1; ++i) {
      for (int j = 0; j < N - 1; ++j) {
        const double luv = lu[static_cast<Index>(i) * N + j];
        if (luv == kNegInf) continue;
        const LogSigned gap =
            profile_gap(lr, coef.log_c[i], log_B) + profile_gap(lr, coef.log_d[j], log_B);
        if (gap.sign != 0) log_abs_diff.push_back(luv + gap.log_abs);
      }
    }
    for (int i = 0; i < N - 1; ++i) {
      if (log_row[i] == kNegInf) continue;
      const LogSigned beta = one_masked_profile(lr, coef.log_c[i], log_B);
      if (beta.sign != 0) log_abs_diff.push_back(log_row[i] + beta.log_abs);
    }
    for (int j = 0; j < N - 1; ++j) {
      if (log_col[j] == kNegInf) continue;
      const LogSigned beta = one_masked_profile(lr, coef.log_d[j], log_B);
      if (beta.sign != 0) log_abs_diff.push_back(log_col[j] + beta.log_abs);
    }
    log_abs_diff.push_back(scale_log_r(log_B, lr));  // the all-mask corner, r^B - 0
    const double log_tv = log_sum_exp(log_abs_diff) - std::log(2.0);
    curve.log_values.push_back(log_tv);
    curve.values.push_back(std::min(1.0, exp_or_zero(log_tv)));
  }
  return curve;
}

DecayFit decay_exponent_fit(const std::vector<TVCurve>& curves, std::size_t t0_index) {
  std::vector<double> xs, ys;
  for (const TVCurve& c : curves) {
    if (t0_index >= c.log_values.size()) {
      throw DegenerateInput("decay_exponent_fit: t0 index out of range");
    }
    const double lv = c.log_values[t0_index];
    if (lv == kNegInf || lv >= 0.0) continue;  // TV exactly 0 or 1: excluded
    xs.push_back(c.w);
    ys.push_back(std::log(-lv));
  }
  if (xs.size() < 2) {
    throw DegenerateInput("decay_exponent_fit: fewer than 2 usable (w, TV) points");
  }
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DegenerateInput("decay_exponent_fit: degenerate w grid");
  DecayFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points_used = static_cast<int>(xs.size());
  fit.max_residual = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ys[k] - (fit.slope * xs[k] + fit.intercept)));
  }
  return fit;
}

DenseDistribution sampled_distribution_1d_cases(const MixtureModel& m, const GuidanceConfig& g) {
  require_dims(m.space(), 1, "sampled_distribution_1d_cases");
  const StateSpace& space = m.space();
  const int N = space.alphabet();
  const int z = g.class_index;
  const SupportSet own = support_of(m.conditional(z));

  bool overlaps = false;
  for (int k = 0; k < m.num_classes() && !overlaps; ++k) {
    if (k == z) continue;
    for (Index x : support_of(m.conditional(k)).members) {
      if (own.members.count(x)) {
        overlaps = true;
        break;
      }
    }
  }
  if (!overlaps) {
    // Case (1): private support, guidance strength is irrelevant.
    return m.conditional(z);
  }

  // Case (2): tilt by rho(x)^w with rho the posterior share of class z at x.
  Vector q = Vector::Zero(space.size());
  std::vector<double> logs;
  std::vector<Index> idxs;
  for (Index x : own.members) {
    double denom = 0.0;
    for (int k = 0; k < m.num_classes(); ++k) {
      if (m.conditional(k)(x) > 1e-12) denom += m.weight(k) * m.conditional(k)(x);
    }
    const double rho = m.weight(z) * m.conditional(z)(x) / denom;
    logs.push_back(std::log(m.conditional(z)(x)) + g.w * std::log(rho));
    idxs.push_back(x);
  }
  const double log_norm = log_sum_exp(logs);
  for (std::size_t k = 0; k < idxs.size(); ++k) {
    q[idxs[k]] = exp_or_zero(logs[k] - log_norm);
  }
  const double sum = q.sum();
  q /= sum;  // residue from underflowed entries
  return DenseDistribution(space, std::move(q));
}

RegionDecomposition region_decomposition_2d(const MixtureModel& m, int guided_class, double w,
                                            double tau) {
  require_dims(m.space(), 2, "region_decomposition_2d");
  const StateSpace& space = m.space();
  const int K = m.num_classes();

  std::vector<SupportSet> supports;
  for (int k = 0; k < K; ++k) supports.push_back(support_of(m.conditional(k), tau));
  const SupportSet& own = supports[guided_class];
  if (own.members.empty()) {
    throw EmptyClassSupport("region_decomposition_2d: guided class has empty support");
  }

  // Shared portions of the guided support and of its marginals.
  std::vector<std::set<int>> shared(2);
  std::set<Index> shared_states;
  for (int k = 0; k < K; ++k) {
    if (k == guided_class) continue;
    for (int d = 0; d < 2; ++d) {
      for (int token : supports[k].marginal_supports[d]) {
        if (own.marginal_supports[d].count(token)) shared[d].insert(token);
      }
    }
    for (Index x : supports[k].members) {
      if (own.members.count(x)) shared_states.insert(x);
    }
  }

  // Marginals of each conditional, for the per-coordinate posterior shares.
  const int N = space.alphabet();
  std::vector<std::vector<Vector>> marg(K, std::vector<Vector>(2, Vector::Zero(N)));
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < N - 1; ++i) {
      for (int j = 0; j < N - 1; ++j) {
        const double v = m.conditional(k)(static_cast<Index>(i) * N + j);
        marg[k][0][i] += v;
        marg[k][1][j] += v;
      }
    }
  }

  const auto rho_marginal = [&](int d, int token) {
    double denom = 0.0;
    for (int k = 0; k < K; ++k) {
      if (marg[k][d][token - 1] > tau) denom += m.weight(k) * marg[k][d][token - 1];
    }
    return m.weight(guided_class) * marg[guided_class][d][token - 1] / denom;
  };

  RegionDecomposition rd{space, guided_class, w, {}, {}, {}, {}, own.members,
                         own.marginal_supports, shared};
  for (Index x : own.members) {
    const State s = space.state_of(x);
    const bool shared1 = shared[0].count(s[0]) > 0;
    const bool shared2 = shared[1].count(s[1]) > 0;
    Region region;
    if (shared_states.count(x)) {
      region = Region::R4;
    } else if (shared1 && shared2) {
      region = Region::R3;
    } else if (shared1) {
      region = Region::R2_1;
    } else if (shared2) {
      region = Region::R2_2;
    } else {
      region = Region::R1;
    }
    const double rho1 = rho_marginal(0, s[0]);
    const double rho2 = rho_marginal(1, s[1]);
    const bool unit1 = rho1 > 1.0 - 1e-9;
    const bool unit2 = rho2 > 1.0 - 1e-9;
    double weight = 0.0, limit = 0.0;
    switch (region) {
      case Region::R1:
        weight = 2.0;
        limit = 2.0;
        break;
      case Region::R2_1:
        weight = 1.0 + std::pow(rho1, w);
        limit = 1.0 + (unit1 ? 1.0 : 0.0);
        break;
      case Region::R2_2:
        weight = 1.0 + std::pow(rho2, w);
        limit = 1.0 + (unit2 ? 1.0 : 0.0);
        break;
      case Region::R3:
        weight = std::pow(rho1, w) + std::pow(rho2, w);
        limit = (unit1 ? 1.0 : 0.0) + (unit2 ? 1.0 : 0.0);
        break;
      case Region::R4: {
        double denom = 0.0;
        for (int k = 0; k < K; ++k) {
          if (m.conditional(k)(x) > tau) denom += m.weight(k) * m.conditional(k)(x);
        }
        const double rho = m.weight(guided_class) * m.conditional(guided_class)(x) / denom;
        weight = (std::pow(rho1, w) + std::pow(rho2, w)) * std::pow(rho, w);
        limit = 0.0;
        break;
      }
    }
    rd.region_of[x] = region;
    rd.weight[x] = weight;
    rd.limit_weight[x] = limit;
    rd.regions[static_cast<int>(region)].insert(x);
  }
  return rd;
}

DenseDistribution limit_distribution_2d(const RegionDecomposition& rd, const MixtureModel& m) {
  if (rd.space != m.space()) {
    throw SpaceMismatch("limit_distribution_2d: decomposition and mixture disagree");
  }
  const DenseDistribution& cond = m.conditional(rd.guided_class);
  Vector q = Vector::Zero(rd.space.size());
  for (const auto& [x, a] : rd.limit_weight) q[x] = a * cond(x);
  const double sum = q.sum();
  if (sum <= 0.0) throw DegenerateLimit("limit_distribution_2d: all limit weights vanish");
  q /= sum;
  return DenseDistribution(rd.space, std::move(q));
}

LocalMoments local_moments(const DenseDistribution& d, const std::set<Index>& A) {
  const int D = d.space().dims();
  double mass = 0.0;
  for (Index x : A) mass += d(x);
  if (mass <= 0.0) throw EmptyRestriction("local_moments: restriction carries no mass");

  LocalMoments out;
  out.mean = Vector::Zero(D);
  out.covariance = Eigen::MatrixXd::Zero(D, D);
  for (Index x : A) {
    const State s = d.space().state_of(x);
    for (int k = 0; k < D; ++k) out.mean[k] += d(x) * s[k];
  }
  out.mean /= mass;
  for (Index x : A) {
    const State s = d.space().state_of(x);
    Vector delta(D);
    for (int k = 0; k < D; ++k) delta[k] = s[k] - out.mean[k];
    out.covariance += (d(x) / mass) * delta * delta.transpose();
  }
  return out;
}

}  // namespace mdg

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdg/closed_form.hpp"
#include "mdg/corpus.hpp"
#include "mdg/oracle.hpp"

using namespace mdg;

TEST_CASE("TimeRatio: endpoints, monotonicity, guards") {
  const double T = 3.0;
  CHECK(TimeRatio(T, 0.0).r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(TimeRatio(T, T).r == 0.0);
  double prev = 1.1;
  for (double t : {0.0, 0.5, 1.0, 2.0, 2.9, T}) {
    const double r = TimeRatio(T, t).r;
    CHECK(r < prev);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    prev = r;
  }
  CHECK_THROWS_AS(TimeRatio(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TimeRatio(1.0, -0.1), ConfigError);
  CHECK_THROWS_AS(TimeRatio(1.0, 1.1), ConfigError);
}

TEST_CASE("solve_1d_unguided: mask delta at t = 0, data law at t = T") {
  const MixtureModel m = random_mixture(41, 1, 6, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  const double T = 2.0;
  const DenseDistribution start = solve_1d_unguided(p, T, 0.0);
  CHECK(start(State{6}) == doctest::Approx(1.0).epsilon(1e-14));
  const DenseDistribution end = solve_1d_unguided(p, T, T);
  CHECK((end.probs() - p.probs()).cwiseAbs().maxCoeff() <= 1e-14);
  // Interior: mask mass is exactly r, the rest proportional to p.
  const double t = 0.8;
  const double r = TimeRatio(T, t).r;
  const DenseDistribution mid = solve_1d_unguided(p, T, t);
  CHECK(mid(State{6}) == doctest::Approx(r).epsilon(1e-15));
  for (int x = 1; x <= 5; ++x) {
    CHECK(mid(State{x}) == doctest::Approx((1.0 - r) * p(State{x})).epsilon(1e-14));
  }
}

TEST_CASE("solve_1d_guided: terminal law is the tilted distribution") {
  const MixtureModel m = random_mixture(43, 1, 5, 2, MixtureKind::Overlap);
  for (double w : {-1.0, 0.0, 0.5, 2.0, 10.0}) {
    const GuidanceConfig g(0, w);
    const DenseDistribution end = solve_1d_guided(m, g, 1.5, 1.5);
    const DenseDistribution tilt = tilted_distribution(m, g);
    CHECK((end.probs() - tilt.probs()).cwiseAbs().maxCoeff() <= 1e-14);
    // Mask mass at interior times is exactly r^Z.
    const double z = normalizer_Z(m, g);
    const double r = TimeRatio(1.5, 0.6).r;
    const DenseDistribution mid = solve_1d_guided(m, g, 1.5, 0.6);
    CHECK(mid(State{5}) == doctest::Approx(std::pow(r, z)).epsilon(1e-13));
  }
}

TEST_CASE("solve_1d_guided: r^Z underflows to an exact zero for huge Z") {
  const MixtureModel m = random_mixture(44, 1, 6, 2, MixtureKind::UniqueMaximizer);
  const GuidanceConfig g(0, 5000.0);
  const DenseDistribution mid = solve_1d_guided(m, g, 2.0, 1.0);
  CHECK(mid(State{6}) == 0.0);
  CHECK(mid.probs().sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("coefficients_2d: single class has c = d = 1, Z = 1, lambda = -2") {
  const StateSpace s(2, 3);
  Vector v = Vector::Zero(9);
  v[s.index_of({1, 1})] = 0.3;
  v[s.index_of({1, 2})] = 0.2;
  v[s.index_of({2, 1})] = 0.1;
  v[s.index_of({2, 2})] = 0.4;
  const MixtureModel m(s, {"only"}, {1.0}, {DenseDistribution(s, v)});
  for (double w : {0.0, 1.0, 7.0}) {
    const Coefficients2D coef = coefficients_2d(m, GuidanceConfig(0, w));
    for (int tok = 1; tok <= 2; ++tok) {
      CHECK(coef.c(tok) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(coef.d(tok) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(coef.Z() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(coef.c(3) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(coef.lambda_NN == doctest::Approx(-2.0).epsilon(1e-13));
  }
}

TEST_CASE("coefficients_2d: lambda_NN = -Z (1/c_N + 1/d_N) always") {
  for (std::uint64_t seed : {51, 52, 53}) {
    const MixtureModel m = random_mixture(seed, 2, 4, 2, MixtureKind::Overlap);
    for (double w : {0.0, 0.5, 3.0}) {
      const Coefficients2D coef = coefficients_2d(m, GuidanceConfig(0, w));
      const int N = 4;
      const double expect = -coef.Z() * (1.0 / coef.c(N) + 1.0 / coef.d(N));
      CHECK(coef.lambda_NN == doctest::Approx(expect).epsilon(1e-12));
      CHECK(coef.lambda_NN <= -2.0 + 1e-12);  // amplification never slows the corner
    }
  }
}

TEST_CASE("coefficients_2d: Z matches the 0D normalizer") {
  const MixtureModel m = random_mixture(55, 2, 4, 3, MixtureKind::Overlap);
  for (double w : {0.0, 1.0, 4.0}) {
    const GuidanceConfig g(0, w);
    CHECK(coefficients_2d(m, g).log_Z ==
          doctest::Approx(log_normalizer_Z(m, g)).epsilon(1e-12));
  }
}

TEST_CASE("solve_2d_guided: mask delta at t = 0, terminal law at t = T") {
  const MixtureModel m = random_mixture(57, 2, 4, 2, MixtureKind::Overlap);
  const GuidanceConfig g(0, 1.5);
  const double T = 2.5;
  const DenseDistribution start = solve_2d_guided(m, g, T, 0.0);
  CHECK(start(State{4, 4}) == doctest::Approx(1.0).epsilon(1e-13));
  const DenseDistribution end = solve_2d_guided(m, g, T, T);
  const DenseDistribution term = sampled_distribution_2d(m, g);
  CHECK((end.probs() - term.probs()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve_2d_guided: matches the exact oracle at interior times") {
  const MixtureModel m = random_mixture(59, 2, 3, 2, MixtureKind::Overlap);
  const double T = 2.0;
  const std::vector<double> times{0.3, 0.9, 1.6};
  for (double w : {0.0, 0.7, 2.0}) {
    const GuidanceConfig g(0, w);
    const ReverseGenerator gen = guided_reverse(m, g);
    const DenseDistribution q0 = DenseDistribution::delta(m.space(), State{3, 3});
    const OracleSolution sol = evolve_exact(gen, T, times, q0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const DenseDistribution closed = solve_2d_guided(m, g, T, times[k]);
      CHECK((closed.probs() - sol.densities[k].probs()).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("sampled_distribution_2d: normalized, supported on the conditional") {
  const MixtureModel m = random_mixture(61, 2, 5, 2, MixtureKind::RandomSupport);
  for (double w : {0.0, 1.0, 30.0, 200.0}) {
    const GuidanceConfig g(0, w);
    const DenseDistribution term = sampled_distribution_2d(m, g);
    CHECK(term.probs().sum() == doctest::Approx(1.0).epsilon(1e-12));
    const DenseDistribution& cond = m.conditional(0);
    for (Index x = 0; x < m.space().size(); ++x) {
      if (term(x) > 0.0) CHECK(cond(x) > 0.0);
    }
  }
}

TEST_CASE("sampled_distribution_2d: oracle agreement at t = T") {
  const MixtureModel m = random_mixture(63, 2, 3, 2, MixtureKind::Overlap);
  const double T = 2.0;
  for (double w : {0.0, 1.0, 3.0}) {
    const GuidanceConfig g(0, w);
    const ReverseGenerator gen = guided_reverse(m, g);
    const OracleSolution sol =
        evolve_exact(gen, T, {T}, DenseDistribution::delta(m.space(), State{3, 3}));
    const DenseDistribution term = sampled_distribution_2d(m, g);
    CHECK((term.probs() - sol.densities[0].probs()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("alpha_coefficient: collision limit is flagged and continuous") {
  // Hand-built coefficients with c(1) sitting exactly on -lambda_NN.
  const double B = 2.6;
  Coefficients2D coef;
  coef.log_c = Vector::Zero(2);
  coef.log_d = Vector::Zero(2);
  coef.log_c[0] = std::log(B);
  coef.log_c[1] = std::log(1.4);
  coef.log_d[0] = std::log(0.9);
  coef.log_d[1] = std::log(1.7);
  coef.log_Z = 0.0;
  coef.lambda_NN = -B;
  coef.c_defined = {true, true};
  coef.d_defined = {true, true};
  const TimeRatio tr(2.0, 0.7);

  const double at_collision = alpha_coefficient(coef, {1, 1}, tr);
  CHECK(last_alpha_used_collision_limit());
  Coefficients2D nudged = coef;
  nudged.log_c[0] = std::log(B * (1.0 + 1e-7));
  const double nearby = alpha_coefficient(nudged, {1, 1}, tr);
  CHECK(!last_alpha_used_collision_limit());
  CHECK(at_collision == doctest::Approx(nearby).epsilon(1e-6));

  // One-masked pattern hits the other divided difference.
  const double edge_collision = alpha_coefficient(coef, {1, 2}, tr);
  CHECK(last_alpha_used_collision_limit());
  nudged = coef;
  nudged.log_c[0] = std::log(B * (1.0 + 1e-7));
  const double edge_nearby = alpha_coefficient(nudged, {1, 2}, tr);
  CHECK(edge_collision == doctest::Approx(edge_nearby).epsilon(1e-6));
}

TEST_CASE("dimension guards") {
  const MixtureModel m1 = random_mixture(65, 1, 4, 2, MixtureKind::Overlap);
  CHECK_THROWS_AS(coefficients_2d(m1, GuidanceConfig(0, 1.0)), DimensionMismatch);
  CHECK_THROWS_AS(solve_2d_guided(m1, GuidanceConfig(0, 1.0), 1.0, 0.5), DimensionMismatch);
  const MixtureModel m2 = random_mixture(66, 2, 4, 2, MixtureKind::Overlap);
  CHECK_THROWS_AS(solve_1d_guided(m2, GuidanceConfig(0, 1.0), 1.0, 0.5), DimensionMismatch);
  CHECK_THROWS_AS(solve_1d_unguided(full_distribution(m2), 1.0, 0.5), DimensionMismatch);
}

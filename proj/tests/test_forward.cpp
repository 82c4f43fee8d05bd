#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdg/corpus.hpp"
#include "mdg/forward.hpp"

using namespace mdg;

namespace {

// Dense one-dimensional forward kernel applied literally, for cross-checks.
Vector brute_forward_1d(const StateSpace& s, const Vector& v, double t) {
  const int N = s.alphabet();
  const double keep = std::exp(-t);
  Vector out = Vector::Zero(N);
  for (int x = 0; x < N; ++x) {
    if (x == N - 1) {
      out[N - 1] += v[x];  // mask is absorbing
    } else {
      out[x] += keep * v[x];
      out[N - 1] += (1.0 - keep) * v[x];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("forward_density: t = 0 is the identity") {
  const MixtureModel m = random_mixture(1, 2, 5, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  CHECK((forward_density(p, 0.0).probs() - p.probs()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("forward_density: D = 1, N = 2 delta worked example") {
  const StateSpace s(1, 2);
  const DenseDistribution d = DenseDistribution::delta(s, State{1});
  const double t = 0.7;
  const DenseDistribution out = forward_density(d, t);
  CHECK(out(State{1}) == doctest::Approx(std::exp(-t)).epsilon(1e-15));
  CHECK(out(State{2}) == doctest::Approx(-std::expm1(-t)).epsilon(1e-15));
}

TEST_CASE("forward_density: matches the literal 1D kernel") {
  const MixtureModel m = random_mixture(5, 1, 7, 3, MixtureKind::RandomSupport);
  const DenseDistribution p = full_distribution(m);
  for (double t : {0.1, 0.5, 2.0, 10.0}) {
    const Vector brute = brute_forward_1d(m.space(), p.probs(), t);
    CHECK((forward_density(p, t).probs() - brute).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("forward_density: conservation, monotone mask absorption, semigroup") {
  const MixtureModel m = random_mixture(9, 3, 4, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  const Index all_mask = m.space().index_of(State(3, 4));
  double prev_mask = 0.0;
  for (double t : {0.0, 0.2, 0.6, 1.5, 4.0}) {
    const DenseDistribution pt = forward_density(p, t);
    CHECK(pt.probs().sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pt(all_mask) >= prev_mask - 1e-15);
    prev_mask = pt(all_mask);
  }
  const DenseDistribution two_step = forward_density(forward_density(p, 0.4), 0.9);
  const DenseDistribution one_step = forward_density(p, 1.3);
  CHECK((two_step.probs() - one_step.probs()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("forward_density: explicit Kronecker factorization in D = 2") {
  const MixtureModel m = random_mixture(13, 2, 4, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  const int N = 4;
  const double t = 0.8;
  // Build the 1D kernel and apply it coordinate by coordinate explicitly.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
  const double keep = std::exp(-t);
  for (int x = 0; x < N - 1; ++x) {
    K(x, x) = keep;
    K(N - 1, x) = 1.0 - keep;
  }
  K(N - 1, N - 1) = 1.0;
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) full(i * N + j, k * N + l) = K(i, k) * K(j, l);
  const Vector expected = full * p.probs();
  CHECK((forward_density(p, t).probs() - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("forward_density: ODE cross-check d/dt mu_t = L mu_t") {
  const MixtureModel m = random_mixture(17, 2, 4, 2, MixtureKind::RandomSupport);
  const DenseDistribution p = full_distribution(m);
  const StateSpace& s = m.space();
  // Forward generator: each unmasked coordinate flips to mask at rate 1.
  const double t = 0.9, h = 1e-5;
  const Vector plus = forward_density(p, t + h).probs();
  const Vector minus = forward_density(p, t - h).probs();
  const Vector mid = forward_density(p, t).probs();
  Vector lmu = Vector::Zero(s.size());
  for (Index x = 0; x < s.size(); ++x) {
    const State st = s.state_of(x);
    const int unmasked = s.dims() - s.masked_count(x);
    lmu[x] -= unmasked * mid[x];
    for (int d = 0; d < s.dims(); ++d) {
      if (st[d] == s.mask_token()) {
        State src = st;
        for (int tok = 1; tok < s.mask_token(); ++tok) {
          src[d] = tok;
          lmu[x] += mid[s.index_of(src)];
        }
      }
    }
  }
  CHECK(((plus - minus) / (2.0 * h) - lmu).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("forward_density_at: agrees with the vector evolution everywhere") {
  const MixtureModel m = random_mixture(23, 2, 5, 3, MixtureKind::Disjoint);
  const DenseDistribution p = full_distribution(m);
  for (double t : {0.05, 0.7, 3.0}) {
    const DenseDistribution pt = forward_density(p, t);
    for (Index x = 0; x < m.space().size(); ++x) {
      CHECK(forward_density_at(p, m.space().state_of(x), t) ==
            doctest::Approx(pt(x)).epsilon(0).scale(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward_density: rejects negative times and mask mass at t = 0") {
  const StateSpace s(1, 3);
  Vector v(3);
  v << 0.5, 0.5, 0.0;
  const DenseDistribution d(s, v);
  CHECK_THROWS_AS(forward_density(d, -0.1), ConfigError);
  CHECK_THROWS_AS(forward_density_at(d, State{1}, -0.1), ConfigError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mdg/corpus.hpp"
#include "mdg/forward.hpp"
#include "mdg/rates.hpp"

using namespace mdg;

namespace {

Eigen::MatrixXd dense_base(const ReverseGenerator& gen) {
  return Eigen::MatrixXd(gen.base());
}

}  // namespace

TEST_CASE("unguided_reverse: D = 1 base rate is mu(y) at every unmasking") {
  const MixtureModel m = random_mixture(2, 1, 6, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  const ReverseGenerator gen = unguided_reverse(p);
  const Eigen::MatrixXd B = dense_base(gen);
  const Index mask = m.space().index_of(State{6});
  for (int y = 1; y <= 5; ++y) {
    CHECK(B(m.space().index_of(State{y}), mask) == doctest::Approx(p(State{y})).epsilon(1e-14));
  }
  CHECK(B(mask, mask) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("unguided_reverse: uniform mu gives rate 1/(N-1) per target") {
  const StateSpace s(1, 4);
  const ReverseGenerator gen = unguided_reverse(DenseDistribution::uniform_non_mask(s));
  const Eigen::MatrixXd B = dense_base(gen);
  const Index mask = s.index_of(State{4});
  for (int y = 1; y <= 3; ++y) {
    CHECK(B(s.index_of(State{y}), mask) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("base columns sum to zero; fully unmasked states are absorbing") {
  const MixtureModel m = random_mixture(4, 2, 4, 2, MixtureKind::RandomSupport);
  for (const ReverseGenerator& gen :
       {unguided_reverse(full_distribution(m)), guided_reverse(m, GuidanceConfig(0, 1.5))}) {
    const Eigen::MatrixXd B = dense_base(gen);
    for (Index c = 0; c < B.cols(); ++c) {
      CHECK(std::abs(B.col(c).sum()) <= 1e-12);
      if (m.space().masked_count(c) == 0) CHECK(B.col(c).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("guided_reverse: w = 0 equals the conditional generator") {
  const MixtureModel m = random_mixture(6, 2, 4, 2, MixtureKind::Overlap);
  const ReverseGenerator guided = guided_reverse(m, GuidanceConfig(1, 0.0));
  const ReverseGenerator cond = unguided_reverse(m.conditional(1));
  CHECK((dense_base(guided) - dense_base(cond)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(guided.kind() == GeneratorKind::Conditional);  // w = 0 is the conditional
  CHECK(guided_reverse(m, GuidanceConfig(1, 0.5)).kind() == GeneratorKind::Guided);
}

TEST_CASE("guided_reverse: w = -1 equals the unguided generator on shared support") {
  const MixtureModel m = random_mixture(8, 2, 4, 2, MixtureKind::Overlap);
  const ReverseGenerator guided = guided_reverse(m, GuidanceConfig(0, -1.0));
  const ReverseGenerator full = unguided_reverse(full_distribution(m));
  // With dense overlapping classes every rate is positive, so the entrywise
  // power formula reduces exactly.
  CHECK((dense_base(guided) - dense_base(full)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("guided_reverse: entrywise power formula, checked independently") {
  const MixtureModel m = random_mixture(10, 2, 3, 2, MixtureKind::Overlap);
  const double w = 1.0;
  const Eigen::MatrixXd U = dense_base(unguided_reverse(full_distribution(m)));
  const Eigen::MatrixXd C = dense_base(unguided_reverse(m.conditional(0)));
  const Eigen::MatrixXd G = dense_base(guided_reverse(m, GuidanceConfig(0, w)));
  for (Index r = 0; r < G.rows(); ++r) {
    for (Index c = 0; c < G.cols(); ++c) {
      if (r == c) continue;
      double expect = 0.0;
      if (C(r, c) > 0.0) expect = std::pow(U(r, c), -w) * std::pow(C(r, c), 1.0 + w);
      CHECK(G(r, c) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("guided_reverse: D = 1 tilt identity against the mask column") {
  // In one dimension the guided rate from mask to y is
  // p(y)^{-w} p(y|z)^{1+w}, i.e. Z times the unguided rate of p^{z,w}.
  const MixtureModel m = random_mixture(12, 1, 6, 2, MixtureKind::Overlap);
  const GuidanceConfig g(0, 2.0);
  const double Z = normalizer_Z(m, g);
  const Eigen::MatrixXd G = dense_base(guided_reverse(m, g));
  const Eigen::MatrixXd Utilt = dense_base(unguided_reverse(tilted_distribution(m, g)));
  CHECK((G - Z * Utilt).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, Z));
}

TEST_CASE("unguided_reverse: D = 2 partial-marginal ratios, brute force") {
  const MixtureModel m = random_mixture(14, 2, 4, 2, MixtureKind::RandomSupport);
  const DenseDistribution mu = full_distribution(m);
  const StateSpace& s = m.space();
  const Eigen::MatrixXd B = dense_base(unguided_reverse(mu));
  const int N = s.alphabet();
  for (Index c = 0; c < s.size(); ++c) {
    const State x = s.state_of(c);
    for (int d = 0; d < 2; ++d) {
      if (x[d] != N) continue;
      // Denominator: marginal of mu over the coordinates of x that are
      // unmasked; numerator additionally pins coordinate d to the target.
      double denom = 0.0;
      for (Index y = 0; y < s.size(); ++y) {
        const State ys = s.state_of(y);
        if (s.masked_count(y) != 0) continue;
        bool agree = true;
        for (int e = 0; e < 2; ++e)
          if (x[e] != N && ys[e] != x[e]) agree = false;
        if (agree) denom += mu(y);
      }
      for (int tok = 1; tok < N; ++tok) {
        State tgt = x;
        tgt[d] = tok;
        double numer = 0.0;
        for (Index y = 0; y < s.size(); ++y) {
          const State ys = s.state_of(y);
          if (s.masked_count(y) != 0) continue;
          bool agree = ys[d] == tok;
          for (int e = 0; e < 2; ++e)
            if (x[e] != N && ys[e] != x[e]) agree = false;
          if (agree) numer += mu(y);
        }
        const double expect = denom > 0.0 ? numer / denom : 0.0;
        CHECK(B(s.index_of(tgt), c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("reverse generator undoes the forward corruption (finite differences)") {
  // Evolve q_t = law of the reverse chain via a fine Euler scheme and check
  // it reproduces the forward marginals run backwards.
  const MixtureModel m = random_mixture(16, 1, 5, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  const ReverseGenerator gen = unguided_reverse(p);
  const double T = 2.0;
  const int steps = 40000;
  Vector q = forward_density(p, T).probs();
  const Eigen::MatrixXd B = dense_base(gen);
  for (int k = 0; k < steps; ++k) {
    const double t = T * k / steps;
    const double h = T / steps;
    // Guard the singular factor at t ~ T by capping the step contribution.
    const double tf = ReverseGenerator::time_factor(std::max(T - (t + 0.5 * h), 1e-6));
    q += h * tf * (B * q);
  }
  const Vector target = p.probs();
  CHECK((q - target).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("time_factor: values and monotonicity") {
  CHECK(ReverseGenerator::time_factor(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ReverseGenerator::time_factor(0.5) > ReverseGenerator::time_factor(1.0));
  CHECK(ReverseGenerator::time_factor(50.0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-10));
}

TEST_CASE("zeroed_columns counts unreachable sources") {
  // Disjoint supports leave some partially-masked sources with zero partial
  // marginal under a single conditional.
  const MixtureModel m = random_mixture(18, 2, 4, 2, MixtureKind::Disjoint);
  const ReverseGenerator gen = unguided_reverse(m.conditional(0));
  CHECK(gen.zeroed_columns() > 0);
  const Eigen::MatrixXd B = dense_base(gen);
  for (Index c = 0; c < B.cols(); ++c) CHECK(std::abs(B.col(c).sum()) <= 1e-12);
}

TEST_CASE("exit rate extremes bracket every column") {
  const MixtureModel m = random_mixture(20, 2, 4, 2, MixtureKind::Overlap);
  const ReverseGenerator gen = guided_reverse(m, GuidanceConfig(0, 3.0));
  const Eigen::MatrixXd B = dense_base(gen);
  for (Index c = 0; c < B.cols(); ++c) {
    const double exit = -B(c, c);
    CHECK(exit <= gen.max_exit_rate() + 1e-12);
    if (exit > 0.0) CHECK(exit >= gen.min_exit_rate() - 1e-12);
  }
  CHECK(gen.max_exit_rate() > 0.0);
}

TEST_CASE("write_triplets round-trips the base matrix") {
  const MixtureModel m = random_mixture(22, 1, 5, 2, MixtureKind::Overlap);
  const ReverseGenerator gen = unguided_reverse(full_distribution(m));
  std::ostringstream os;
  write_triplets(os, gen);
  std::istringstream is(os.str());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(gen.space().size(), gen.space().size());
  Index r, c;
  double v;
  while (is >> r >> c >> v) B(r, c) = v;
  CHECK((B - dense_base(gen)).cwiseAbs().maxCoeff() == 0.0);
}

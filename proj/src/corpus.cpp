#include "mdg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdg/samplers.hpp"

namespace mdg {

namespace {

Index non_mask_count(int D, int N) {
  Index c = 1;
  for (int d = 0; d < D; ++d) c *= N - 1;
  return c;
}

// Flat row-major index over the (N-1)^D non-mask grid -> full-grid index.
Index non_mask_to_full(Index flat, int N, int D) {
  Index full = 0;
  Index scale = 1;
  for (int d = 0; d < D; ++d) {
    full += (flat % (N - 1)) * scale;
    flat /= (N - 1);
    scale *= N;
  }
  return full;
}

MixtureModel assemble(int D, int N, std::vector<double> weights,
                      std::vector<std::vector<double>> cell_probs) {
  StateSpace space(D, N);
  const Index cells = non_mask_count(D, N);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= wsum;

  std::vector<std::string> labels;
  std::vector<DenseDistribution> conditionals;
  for (std::size_t k = 0; k < cell_probs.size(); ++k) {
    labels.push_back("z" + std::to_string(k + 1));
    auto& probs = cell_probs[k];
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    Vector v = Vector::Zero(space.size());
    for (Index i = 0; i < cells; ++i) {
      v[non_mask_to_full(i, N, D)] = probs[static_cast<std::size_t>(i)] / sum;
    }
    conditionals.emplace_back(space, std::move(v));
  }
  return MixtureModel(space, std::move(labels), std::move(weights), std::move(conditionals));
}

}  // namespace

MixtureModel random_mixture(std::uint64_t seed, int D, int N, int K, MixtureKind kind) {
  if (D < 1 || N < 2 || K < 1) throw ConfigError("random_mixture: need D >= 1, N >= 2, K >= 1");
  const Index cells = non_mask_count(D, N);
  if (kind == MixtureKind::Disjoint && cells < K) {
    throw ConfigError("random_mixture: not enough states for disjoint classes");
  }
  SplitMix64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
  rng.next();

  // Near-equal weights keep 1/a_k (and with it the guided rate spread, which
  // scales like (1/a)^w) small enough for the brute-force oracle to stay fast.
  std::vector<double> weights(static_cast<std::size_t>(K));
  for (double& w : weights) w = 0.8 + 0.4 * rng.uniform();

  std::vector<std::vector<double>> probs(static_cast<std::size_t>(K),
                                         std::vector<double>(static_cast<std::size_t>(cells), 0.0));
  switch (kind) {
    case MixtureKind::Overlap:
    case MixtureKind::UniqueMaximizer:
      // Bounded away from zero so conditional/unconditional ratios stay modest.
      for (auto& p : probs) {
        for (double& v : p) v = 0.2 + rng.uniform();
      }
      break;
    case MixtureKind::RandomSupport:
      for (auto& p : probs) {
        Index populated = 0;
        for (double& v : p) {
          if (rng.uniform() < 0.6) {
            v = 0.05 + rng.uniform();
            ++populated;
          }
        }
        if (populated == 0) p[static_cast<std::size_t>(rng.next() % cells)] = 1.0;
      }
      break;
    case MixtureKind::Disjoint: {
      std::vector<Index> order(static_cast<std::size_t>(cells));
      std::iota(order.begin(), order.end(), Index{0});
      for (Index i = cells - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.next() % (i + 1))]);
      }
      for (Index i = 0; i < cells; ++i) {
        probs[static_cast<std::size_t>(i % K)][static_cast<std::size_t>(order[i])] =
            0.05 + rng.uniform();
      }
      break;
    }
  }

  if (kind == MixtureKind::UniqueMaximizer) {
    // Force a strict, well-separated argmax of p(x|z_1)/p(x) by inflating
    // one cell of class 1 that every other class keeps small.
    const auto star = static_cast<std::size_t>(rng.next() % cells);
    probs[0][star] = 5.0;
    for (std::size_t k = 1; k < probs.size(); ++k) probs[k][star] = 0.01;
  }
  return assemble(D, N, std::move(weights), std::move(probs));
}

MixtureModel cluster_mixture_1d(bool overlapping) {
  const int N = 11;  // tokens 1..10 plus mask
  const double shape[5] = {0.1, 0.2, 0.4, 0.2, 0.1};
  std::vector<double> c1(10, 0.0), c2(10, 0.0);
  const int offset2 = overlapping ? 3 : 5;  // overlap on tokens {4,5}
  for (int k = 0; k < 5; ++k) {
    c1[static_cast<std::size_t>(k)] += shape[k];
    c2[static_cast<std::size_t>(offset2 + k)] += shape[k];
  }
  return assemble(1, N, {0.5, 0.5}, {c1, c2});
}

MixtureModel two_square_mixture_2d() {
  const int N = 5;  // tokens 1..4 plus mask
  std::vector<double> c1(16, 0.0), c2(16, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c1[static_cast<std::size_t>(i * 4 + j)] = 1.0;          // {1,2,3}^2
      c2[static_cast<std::size_t>((i + 1) * 4 + j + 1)] = 1.0;  // {2,3,4}^2
    }
  }
  return assemble(2, N, {0.5, 0.5}, {c1, c2});
}

MixtureModel diamond_mixture_2d() {
  const int N = 6;  // tokens 1..5 plus mask
  std::vector<double> c1(25, 0.0), c2(25, 0.0);
  const auto bump = [](std::vector<double>& c, int ci, int cj) {
    for (int i = 1; i <= 5; ++i) {
      for (int j = 1; j <= 5; ++j) {
        const double v = 2.0 - std::abs(i - ci) - std::abs(j - cj);
        if (v > 0.0) c[static_cast<std::size_t>((i - 1) * 5 + (j - 1))] = v;
      }
    }
  };
  bump(c1, 2, 2);
  bump(c2, 4, 4);
  return assemble(2, N, {0.5, 0.5}, {c1, c2});
}

}  // namespace mdg

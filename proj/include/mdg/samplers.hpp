#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdg/distribution.hpp"
#include "mdg/rates.hpp"

namespace mdg {

/// SplitMix64 stream; cheap, splittable, and counter-based. One independent
/// stream per particle keeps batches bit-reproducible under any scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Stream for a (seed, particle) pair; particles get well-separated
  /// counters and the output function decorrelates neighboring streams.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t particle);

  std::uint64_t next();
  /// Uniform double in [0, 1).
  double uniform();
  /// Poisson draw; exact inversion below mean 30, normal approximation above.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

struct SampleBatch {
  StateSpace space;
  std::vector<Index> samples;   // terminal states, flat indices
  std::uint64_t seed;
  std::string scheme;
  double wall_time = 0.0;       // seconds
  std::uint64_t discarded_events = 0;  // tau-leaping excess-event diagnostic
};

/// Tau-leaping over `steps` intervals of [0, T - eps] with frozen-state
/// Poisson draws, at most one unmasking per coordinate per interval, and an
/// exact-event sweep for coordinates still masked at the end.
SampleBatch sample_tau_leaping(const ReverseGenerator& gen, double T, int steps, int n,
                               std::uint64_t seed);

/// Event-driven simulation in the transformed time where the generator is
/// the constant base matrix; exact in distribution.
SampleBatch sample_exact_event(const ReverseGenerator& gen, double T, int n, std::uint64_t seed);

/// Normalized histogram of the batch over its state space.
DenseDistribution empirical_distribution(const SampleBatch& b);

/// Chi-square goodness-of-fit p-value of the batch against q; cells with
/// expected count below 5 are pooled.
double chi_square_pvalue(const SampleBatch& b, const DenseDistribution& q);

}  // namespace mdg

#include "mdg/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "mdg/numeric.hpp"

namespace mdg {

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t particle) {
  // Scramble (seed, particle) through the output hash to pick the starting
  // state. Offsetting the state arithmetically would make neighboring
  // particles shifted copies of one underlying sequence (the state already
  // advances by the golden gamma), which correlates the whole batch.
  SplitMix64 key(seed + particle * 0x9E3779B97F4A7C15ULL);
  return SplitMix64(key.next());
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }
  // Normal approximation; adequate for the diagnostics-only large-mean case.
  const double u1 = std::max(uniform(), 1e-300);
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  const double v = std::round(mean + std::sqrt(mean) * z);
  return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
}

namespace {

struct Transition {
  Index target;
  double rate;
  int coordinate;  // which coordinate the jump unmasks (0-based)
  int token;       // the token it is unmasked to
};

// Lazily materialized off-diagonal entries per source column, annotated
// with the coordinate flip each jump represents.
class TransitionCache {
 public:
  explicit TransitionCache(const ReverseGenerator& gen)
      : gen_(gen), columns_(static_cast<std::size_t>(gen.space().size())) {}

  const std::vector<Transition>& column(Index source) {
    auto& slot = columns_[static_cast<std::size_t>(source)];
    if (slot) return *slot;
    const StateSpace& space = gen_.space();
    const State from = space.state_of(source);
    auto out = std::make_unique<std::vector<Transition>>();
    for (ReverseGenerator::Sparse::InnerIterator it(gen_.base(), source); it; ++it) {
      if (it.row() == source) continue;
      const State to = space.state_of(it.row());
      for (int d = 0; d < space.dims(); ++d) {
        if (to[d] != from[d]) {
          out->push_back({it.row(), it.value(), d, to[d]});
          break;
        }
      }
    }
    slot = std::move(out);
    return *slot;
  }

 private:
  const ReverseGenerator& gen_;
  std::vector<std::unique_ptr<std::vector<Transition>>> columns_;
};

// Jump-chain descent to an absorbing (fully unmasked) state. The terminal
// law only depends on the embedded chain, so no clocks are needed.
Index absorb_by_jump_chain(const ReverseGenerator& gen, TransitionCache& cache, Index start,
                           SplitMix64& rng) {
  const StateSpace& space = gen.space();
  const int max_events = 10 * space.dims();
  Index x = start;
  int events = 0;
  while (space.masked_count(x) > 0) {
    if (++events > max_events) {
      throw EventOverflow("sampler: particle exceeded 10*D events before absorbing");
    }
    const std::vector<Transition>& moves = cache.column(x);
    double total = 0.0;
    for (const Transition& m : moves) total += m.rate;
    if (total <= 0.0) {
      throw EventOverflow("sampler: particle stuck in a masked state with no exit rate");
    }
    double u = rng.uniform() * total;
    Index next = moves.back().target;
    for (const Transition& m : moves) {
      u -= m.rate;
      if (u <= 0.0) {
        next = m.target;
        break;
      }
    }
    x = next;
  }
  return x;
}

double time_ratio_r(double T, double t) { return std::expm1(-(T - t)) / std::expm1(-T); }

}  // namespace

SampleBatch sample_tau_leaping(const ReverseGenerator& gen, double T, int steps, int n,
                               std::uint64_t seed) {
  if (steps < 1 || n < 1) throw ConfigError("sample_tau_leaping: steps and n must be >= 1");
  const auto start_clock = std::chrono::steady_clock::now();
  const StateSpace& space = gen.space();
  const Index all_mask = space.size() - 1;

  // Truncate at T - eps such that r(T - eps)^a < 1e-9 for the slowest
  // exponent a; the leftover masked mass is handed to the exact-event sweep.
  const double a = std::min(1.0, gen.min_exit_rate());
  const double target_r = std::pow(1e-9, 1.0 / a);
  const double eps = -std::log1p(target_r * std::expm1(-T));
  const double horizon = std::max(T - eps, T * 0.5);

  // Transformed-time grid increments: ds_k = ln(r(t_k) / r(t_{k+1})).
  std::vector<double> ds(steps);
  for (int k = 0; k < steps; ++k) {
    const double ta = horizon * k / steps;
    const double tb = horizon * (k + 1) / steps;
    ds[k] = std::log(time_ratio_r(T, ta) / time_ratio_r(T, tb));
  }

  SampleBatch batch{space, {}, seed, "tau-leaping(" + std::to_string(steps) + ")"};
  batch.samples.reserve(n);
  TransitionCache cache(gen);
  for (int p = 0; p < n; ++p) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(p));
    Index x = all_mask;
    for (int k = 0; k < steps && space.masked_count(x) > 0; ++k) {
      const std::vector<Transition>& moves = cache.column(x);
      if (moves.empty()) break;
      // Frozen-state Poisson counts, grouped by the coordinate they unmask.
      std::vector<std::uint64_t> counts(moves.size());
      for (std::size_t i = 0; i < moves.size(); ++i) {
        counts[i] = rng.poisson(moves[i].rate * ds[k]);
      }
      State s = space.state_of(x);
      for (int d = 0; d < space.dims(); ++d) {
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < moves.size(); ++i) {
          if (moves[i].coordinate == d) total += counts[i];
        }
        if (total == 0) continue;
        batch.discarded_events += total - 1;
        std::uint64_t pick = static_cast<std::uint64_t>(rng.uniform() * total);
        pick = std::min(pick, total - 1);
        for (std::size_t i = 0; i < moves.size(); ++i) {
          if (moves[i].coordinate != d || counts[i] == 0) continue;
          if (pick < counts[i]) {
            s[d] = moves[i].token;
            break;
          }
          pick -= counts[i];
        }
      }
      x = space.index_of(s);
    }
    batch.samples.push_back(absorb_by_jump_chain(gen, cache, x, rng));
  }
  batch.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
  return batch;
}

SampleBatch sample_exact_event(const ReverseGenerator& gen, double T, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_exact_event: n must be >= 1");
  (void)T;  // the terminal law is T-independent; kept for interface symmetry
  const auto start_clock = std::chrono::steady_clock::now();
  const StateSpace& space = gen.space();
  const Index all_mask = space.size() - 1;

  SampleBatch batch{space, {}, seed, "exact-event"};
  batch.samples.reserve(n);
  TransitionCache cache(gen);
  for (int p = 0; p < n; ++p) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(p));
    batch.samples.push_back(absorb_by_jump_chain(gen, cache, all_mask, rng));
  }
  batch.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
  return batch;
}

DenseDistribution empirical_distribution(const SampleBatch& b) {
  if (b.samples.empty()) throw DegenerateInput("empirical_distribution: empty batch");
  Vector hist = Vector::Zero(b.space.size());
  for (Index x : b.samples) hist[x] += 1.0;
  hist /= static_cast<double>(b.samples.size());
  return DenseDistribution(b.space, std::move(hist));
}

namespace {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
double gammq(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw DegenerateInput("gammq: invalid arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) by series; Q = 1 - P.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Q(a,x) by Lentz continued fraction.
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double chi_square_pvalue(const SampleBatch& b, const DenseDistribution& q) {
  if (b.space != q.space()) throw SpaceMismatch("chi_square_pvalue: space mismatch");
  const auto n = static_cast<double>(b.samples.size());
  std::vector<double> counts(static_cast<std::size_t>(b.space.size()), 0.0);
  for (Index x : b.samples) counts[static_cast<std::size_t>(x)] += 1.0;

  // Pool cells with expected count < 5 into one bucket.
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  int cells = 0;
  for (Index x = 0; x < b.space.size(); ++x) {
    const double expect = n * q(x);
    const double obs = counts[static_cast<std::size_t>(x)];
    if (expect < 5.0) {
      pooled_obs += obs;
      pooled_exp += expect;
      continue;
    }
    stat += (obs - expect) * (obs - expect) / expect;
    ++cells;
  }
  if (pooled_exp >= 5.0 || (pooled_exp > 0.0 && cells == 0)) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0.0 && pooled_exp < 1e-12) {
    return 0.0;  // mass observed where none is expected
  }
  const int dof = cells - 1;
  if (dof < 1) return 1.0;
  return gammq(dof / 2.0, stat / 2.0);
}

}  // namespace mdg

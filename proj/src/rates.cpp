#include "mdg/rates.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace mdg {

namespace {

// partial_marginals[x] = sum of mu over all states agreeing with x on the
// unmasked coordinates of x. Computed by summing mu out along each axis
// into the mask slot, O(D * N^D).
Vector partial_marginals(const DenseDistribution& mu) {
  const StateSpace& space = mu.space();
  const int N = space.alphabet();
  Vector s = mu.probs();
  Index stride = 1;
  for (int d = space.dims() - 1; d >= 0; --d) {
    const Index block = stride * N;
    for (Index base = 0; base < space.size(); base += block) {
      for (Index off = 0; off < stride; ++off) {
        const Index fiber = base + off;
        double total = 0.0;
        for (int token = 0; token < N - 1; ++token) total += s[fiber + stride * token];
        s[fiber + stride * (N - 1)] = total;
      }
    }
    stride *= N;
  }
  return s;
}

// For each state x with masked coordinates, visits every single-coordinate
// unmasking x -> y.
template <typename Fn>
void for_each_unmasking(const StateSpace& space, Fn&& fn) {
  const int N = space.alphabet();
  const int D = space.dims();
  for (Index x = 0; x < space.size(); ++x) {
    Index rem = x;
    Index stride = 1;
    for (int d = D - 1; d >= 0; --d) {
      const int token0 = static_cast<int>(rem % N);
      rem /= N;
      if (token0 == N - 1) {
        for (int v = 0; v < N - 1; ++v) {
          const Index y = x - stride * (N - 1) + stride * v;
          fn(x, y);
        }
      }
      stride *= N;
    }
  }
}

ReverseGenerator assemble(const StateSpace& space, std::vector<Eigen::Triplet<double>> trips,
                          GeneratorKind kind, double w, Index zeroed) {
  Vector col_sums = Vector::Zero(space.size());
  for (const auto& t : trips) col_sums[t.col()] += t.value();
  for (Index x = 0; x < space.size(); ++x) {
    if (col_sums[x] != 0.0) trips.emplace_back(x, x, -col_sums[x]);
  }
  ReverseGenerator::Sparse base(space.size(), space.size());
  base.setFromTriplets(trips.begin(), trips.end());
  return ReverseGenerator(space, std::move(base), kind, w, zeroed);
}

}  // namespace

ReverseGenerator::ReverseGenerator(StateSpace space, Sparse base, GeneratorKind kind, double w,
                                   Index zeroed_columns)
    : space_(space), base_(std::move(base)), kind_(kind), w_(w), zeroed_columns_(zeroed_columns) {}

double ReverseGenerator::max_exit_rate() const {
  double rate = 0.0;
  for (Index x = 0; x < space_.size(); ++x) rate = std::max(rate, -base_.coeff(x, x));
  return rate;
}

double ReverseGenerator::min_exit_rate() const {
  double rate = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < space_.size(); ++x) {
    const double exit = -base_.coeff(x, x);
    if (exit > 0.0) rate = std::min(rate, exit);
  }
  return rate;
}

ReverseGenerator unguided_reverse(const DenseDistribution& mu) {
  const StateSpace& space = mu.space();
  const Vector s = partial_marginals(mu);
  std::vector<Eigen::Triplet<double>> trips;
  Index zeroed = 0;
  std::vector<bool> zero_col(space.size(), false);
  for_each_unmasking(space, [&](Index x, Index y) {
    if (s[x] <= 0.0) {
      if (!zero_col[x]) {
        zero_col[x] = true;
        ++zeroed;
      }
      return;  // unreachable source state; column stays zero
    }
    const double rate = s[y] / s[x];
    if (rate > 0.0) trips.emplace_back(y, x, rate);
  });
  return assemble(space, std::move(trips), GeneratorKind::Unguided, -1.0, zeroed);
}

ReverseGenerator guided_reverse(const MixtureModel& m, const GuidanceConfig& g) {
  const StateSpace& space = m.space();
  const Vector sp = partial_marginals(full_distribution(m));
  const Vector sc = partial_marginals(m.conditional(g.class_index));
  const double w = g.w;
  std::vector<Eigen::Triplet<double>> trips;
  Index zeroed = 0;
  std::vector<bool> zero_col(space.size(), false);
  for_each_unmasking(space, [&](Index x, Index y) {
    if (sc[x] <= 0.0) {
      // The conditional reverse process never visits x.
      if (!zero_col[x]) {
        zero_col[x] = true;
        ++zeroed;
      }
      return;
    }
    if (sp[x] <= 0.0) {
      throw IncompatibleSupports("guided_reverse: conditional support escapes the mixture's");
    }
    const double rc = sc[y] / sc[x];
    if (rc <= 0.0) return;  // zero conditional rate forces the product to 0
    const double ru = sp[y] / sp[x];
    if (ru <= 0.0) {
      throw IncompatibleSupports("guided_reverse: conditional rate positive where unguided is 0");
    }
    double rate;
    if (w == 0.0) {
      rate = rc;
    } else if (w == -1.0) {
      rate = ru;
    } else {
      rate = std::exp(-w * std::log(ru) + (1.0 + w) * std::log(rc));
    }
    trips.emplace_back(y, x, rate);
  });
  const GeneratorKind kind = w == 0.0   ? GeneratorKind::Conditional
                             : w == -1.0 ? GeneratorKind::Unguided
                                         : GeneratorKind::Guided;
  return assemble(space, std::move(trips), kind, w, zeroed);
}

void write_triplets(std::ostream& os, const ReverseGenerator& gen) {
  const auto& base = gen.base();
  char buf[64];
  for (int k = 0; k < base.outerSize(); ++k) {
    for (ReverseGenerator::Sparse::InnerIterator it(base, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      os << buf;
    }
  }
}

}  // namespace mdg

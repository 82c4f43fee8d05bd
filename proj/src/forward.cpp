#include "mdg/forward.hpp"

#include <cmath>

namespace mdg {

namespace {

// Applies the one-dimensional kernel along dimension d of the flat vector:
// non-mask entries scale by e^{-t}; the mask entry absorbs 1 - e^{-t} of
// every non-mask entry in its fiber.
void apply_axis_kernel(Vector& v, const StateSpace& space, int d, double t) {
  const int N = space.alphabet();
  const double keep = std::exp(-t);
  const double leak = -std::expm1(-t);  // 1 - e^{-t}
  Index stride = 1;
  for (int dd = space.dims() - 1; dd > d; --dd) stride *= N;
  const Index block = stride * N;
  for (Index base = 0; base < space.size(); base += block) {
    for (Index off = 0; off < stride; ++off) {
      const Index fiber = base + off;
      double moved = 0.0;
      for (int token = 0; token < N - 1; ++token) {
        double& entry = v[fiber + stride * token];
        moved += entry;
        entry *= keep;
      }
      v[fiber + stride * (N - 1)] += leak * moved;
    }
  }
}

}  // namespace

DenseDistribution forward_density(const DenseDistribution& mu, double t) {
  if (t < 0.0) throw ConfigError("forward_density: t must be >= 0");
  Vector v = mu.probs();
  for (int d = 0; d < mu.space().dims(); ++d) apply_axis_kernel(v, mu.space(), d, t);
  return DenseDistribution(mu.space(), std::move(v));
}

double forward_density_at(const DenseDistribution& mu, const State& x, double t) {
  if (t < 0.0) throw ConfigError("forward_density_at: t must be >= 0");
  const StateSpace& space = mu.space();
  const int D = space.dims();
  const int mask = space.mask_token();
  if (static_cast<int>(x.size()) != D) {
    throw DimensionMismatch("forward_density_at: state has wrong arity");
  }
  int unmasked = 0;
  for (int d = 0; d < D; ++d) {
    if (x[d] != mask) ++unmasked;
  }
  // Partial marginal: sum over all y agreeing with x on its unmasked coords.
  double partial = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    const State y = space.state_of(i);
    bool agrees = true;
    for (int d = 0; d < D; ++d) {
      if (x[d] != mask && y[d] != x[d]) {
        agrees = false;
        break;
      }
    }
    if (agrees) partial += mu(i);
  }
  const double leak = -std::expm1(-t);  // 1 - e^{-t}
  double value = std::exp(-static_cast<double>(unmasked) * t) * partial;
  for (int k = 0; k < D - unmasked; ++k) value *= leak;
  return value;
}

}  // namespace mdg

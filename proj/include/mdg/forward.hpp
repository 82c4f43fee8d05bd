#pragma once

#include "mdg/distribution.hpp"

namespace mdg {

/// Evolves mu for time t under the absorbing forward dynamics (unit noise
/// rate): each coordinate independently keeps its token w.p. e^{-t} and
/// jumps to the mask token otherwise. Applied dimension by dimension; the
/// N^D x N^D kernel is never materialized.
DenseDistribution forward_density(const DenseDistribution& mu, double t);

/// Pointwise closed form for a data distribution mu (no mask mass):
/// mu_t(x) = e^{-u t} (1 - e^{-t})^{D-u} * sum_{y: y agrees with x on its
/// unmasked coordinates} mu(y), where u is the number of unmasked
/// coordinates of x.
double forward_density_at(const DenseDistribution& mu, const State& x, double t);

}  // namespace mdg

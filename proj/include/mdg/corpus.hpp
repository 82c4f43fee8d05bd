#pragma once

#include <cstdint>

#include "mdg/mixture.hpp"

namespace mdg {

enum class MixtureKind {
  Overlap,          // every class positive on every non-mask state
  RandomSupport,    // random per-class supports (overlaps possible)
  Disjoint,         // classes partition the non-mask states
  UniqueMaximizer,  // dense, with a strict argmax of p(x|z_1)/p(x)
};

/// Seeded random mixture on {1..N}^D with K classes. Deterministic in all
/// arguments; the same seed gives the same mixture on every platform.
MixtureModel random_mixture(std::uint64_t seed, int D, int N, int K, MixtureKind kind);

/// Two-class 1D cluster construction: the shape (0.1,0.2,0.4,0.2,0.1) placed
/// at two offsets on 10 tokens plus mask, equal class weights. With
/// `overlapping` the windows share two tokens, otherwise they are disjoint.
MixtureModel cluster_mixture_1d(bool overlapping);

/// Two 3x3 uniform squares on a 4x4 token grid plus mask (N = 5), offset by
/// one cell so they overlap in a 2x2 block; equal class weights.
MixtureModel two_square_mixture_2d();

/// Two L1-ball ("diamond") bumps on a 5x5 token grid plus mask (N = 6),
/// centers offset so the bumps overlap; equal class weights.
MixtureModel diamond_mixture_2d();

}  // namespace mdg

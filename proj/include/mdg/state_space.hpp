#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mdg/errors.hpp"

namespace mdg {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;

/// A state is a tuple of 1-based tokens (x_1, ..., x_D), each in {1..N}.
/// Token N is the mask symbol.
using State = std::vector<int>;

/// Finite state space {1..N}^D with a row-major flat-index bijection:
/// the first coordinate varies slowest, so index(x) = sum_d (x_d - 1) * N^(D-d).
class StateSpace {
 public:
  StateSpace(int dims, int alphabet);

  int dims() const { return dims_; }
  int alphabet() const { return alphabet_; }
  int mask_token() const { return alphabet_; }
  Index size() const { return total_; }

  Index index_of(const State& x) const;
  State state_of(Index idx) const;

  /// Number of masked coordinates of the state at flat index idx.
  int masked_count(Index idx) const;

  bool operator==(const StateSpace& other) const {
    return dims_ == other.dims_ && alphabet_ == other.alphabet_;
  }
  bool operator!=(const StateSpace& other) const { return !(*this == other); }

 private:
  int dims_;
  int alphabet_;
  Index total_;
};

}  // namespace mdg

#include "mdg/state_space.hpp"

#include <string>

namespace mdg {

namespace {
constexpr Index kMaxStates = Index(1) << 24;
}

StateSpace::StateSpace(int dims, int alphabet) : dims_(dims), alphabet_(alphabet) {
  if (dims < 1) {
    throw ConfigError("StateSpace: dims must be >= 1, got " + std::to_string(dims));
  }
  if (alphabet < 2) {
    throw ConfigError("StateSpace: alphabet must be >= 2, got " + std::to_string(alphabet));
  }
  total_ = 1;
  for (int d = 0; d < dims; ++d) {
    if (total_ > kMaxStates / alphabet) {
      throw ConfigError("StateSpace: N^D exceeds the 2^24 dense-storage guard");
    }
    total_ *= alphabet;
  }
}

Index StateSpace::index_of(const State& x) const {
  if (static_cast<int>(x.size()) != dims_) {
    throw DimensionMismatch("index_of: state has wrong number of coordinates");
  }
  Index idx = 0;
  for (int d = 0; d < dims_; ++d) {
    const int token = x[d];
    if (token < 1 || token > alphabet_) {
      throw ConfigError("index_of: token out of range at coordinate " + std::to_string(d + 1));
    }
    idx = idx * alphabet_ + (token - 1);
  }
  return idx;
}

State StateSpace::state_of(Index idx) const {
  State x(dims_);
  for (int d = dims_ - 1; d >= 0; --d) {
    x[d] = static_cast<int>(idx % alphabet_) + 1;
    idx /= alphabet_;
  }
  return x;
}

int StateSpace::masked_count(Index idx) const {
  int count = 0;
  for (int d = 0; d < dims_; ++d) {
    if (idx % alphabet_ == alphabet_ - 1) ++count;
    idx /= alphabet_;
  }
  return count;
}

}  // namespace mdg

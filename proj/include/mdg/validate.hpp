#pragma once

#include <iosfwd>

namespace mdg {

/// Runs the acceptance suite on built-in seeded scenarios, printing one
/// PASS/FAIL line per criterion. Returns true iff every criterion passed.
/// `quick` trims corpus sizes and sample counts; `inject_fault` corrupts one
/// computed value as a negative control (the suite must then fail).
bool run_acceptance(bool quick, bool inject_fault, std::ostream& os);

}  // namespace mdg

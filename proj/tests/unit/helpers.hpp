#pragma once

#include <cmath>
#include <vector>

#include "mnpt/signal_chain.hpp"

namespace mnpt::testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Coils whose phase is flat in frequency and temperature.
inline CoilParams flat_coil(double R0 = 10.0) {
  CoilParams c;
  c.R0 = R0;
  c.L0 = 1e-12;
  c.alpha_R = 0.0;
  return c;
}

inline ChainConfig flat_chain() {
  ChainConfig chain;
  chain.coil_a = flat_coil(10.0);
  chain.coil_b = flat_coil(10.3);
  return chain;
}

}  // namespace mnpt::testing

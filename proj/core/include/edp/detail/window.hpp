#pragma once

#include <array>

#include "edp/density_model.hpp"

namespace edp::detail {

// Integrals of (x - centre)^j exp(t x - g(x) + q(x) - log_ref), j = 0..3,
// over the support, from a Laplace window of half width 12 sigma extended
// until the added mass is below 1e-14 of the running total.
struct WindowSums {
  double log_ref = 0.0;
  std::array<double, 4> sums{};
  double centre = 0.0;
  double sigma = 0.0;
  double half_width = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

WindowSums integrate_tilted_window(const DensitySpec& spec, double t);

}  // namespace edp::detail

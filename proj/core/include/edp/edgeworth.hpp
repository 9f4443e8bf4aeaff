#pragma once

// One-term Edgeworth expansion for the standardised sum of n variables drawn
// from the tilted law pi^{a_n}, and its error against an exact grid
// convolution.

#include <functional>
#include <utility>
#include <vector>

#include "edp/density_model.hpp"
#include "edp/grid_density.hpp"

namespace edp {

struct EdgeworthGrid {
  std::pair<double, double> bounds{-40.0, 40.0};  // standardised units
  std::size_t points = std::size_t{1} << 14;
};

// s pi^{a_n}(s x + a_n) on the grid, s^2 = s^2(t), m(t) = a_n.
GridDensity normalized_tilted_grid(const DensitySpec& spec, double a_n,
                                   std::pair<double, double> bounds, std::size_t points);

// phi(x) (1 + mu_3 / (6 sqrt(n) s^3) (x^3 - 3x)); not clipped at zero.
double edgeworth_density(const DensitySpec& spec, double a_n, int n, double x);

struct EdgeworthReport {
  int n = 0;
  double a_n = 0.0;
  double sup_error = 0.0;               // sup over [-6, 6] of |rho_n - edgeworth|
  double sup_error_times_sqrt_n = 0.0;
  double gaussian_sup_error = 0.0;      // same with the skewness term removed
  double skewness = 0.0;                // mu_3 / s^3 at the tilt
  double growth_value = 0.0;            // psi(t)^2 / sqrt(n psi'(t))
  bool growth_warning = false;          // growth_value > 1
  double convolution_mass_drift = 0.0;
  GridDensity exact;                    // rho_n
  GridDensity approx;                   // expansion on the same nodes
};

EdgeworthReport edgeworth_report(const DensitySpec& spec, double a_n, int n,
                                 const EdgeworthGrid& grid = {});

std::vector<EdgeworthReport> edgeworth_error_scan(const DensitySpec& spec,
                                                  const std::function<double(int)>& a_schedule,
                                                  const std::vector<int>& n_list,
                                                  const EdgeworthGrid& grid = {});

}  // namespace edp

#include "edp/edgeworth.hpp"

#include <cmath>

#include "edp/conditional_gibbs.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"
#include "edp/tilted_calculus.hpp"

namespace edp {

GridDensity normalized_tilted_grid(const DensitySpec& spec, double a_n,
                                   std::pair<double, double> bounds, std::size_t points) {
  if (points < (std::size_t{1} << 10)) {
    throw Error(ErrorKind::Precondition, "normalized grid needs at least 1024 points");
  }
  if (!(bounds.first <= -8.0 && bounds.second >= 8.0)) {
    throw Error(ErrorKind::Precondition, "normalized grid must cover [-8, 8]");
  }
  const TiltRecord r = solve_tilt(spec, a_n);
  const double s = std::sqrt(r.s2);
  const double left = spec.support_left();
  const bool open = spec.singular_at_boundary();
  const double dx = (bounds.second - bounds.first) / static_cast<double>(points - 1);
  GridDensity g = tabulate(
      [&](double x) {
        const double y = s * x + a_n;
        if (y < left || (open && y <= left)) return 0.0;
        return s * std::exp(tilted_log_density(spec, r.t, y));
      },
      bounds.first, dx, points, GridDensity::Origin::Normalized, r.t);
  return g;
}

double edgeworth_density(const DensitySpec& spec, double a_n, int n, double x) {
  if (n < 1) throw Error(ErrorKind::Precondition, "edgeworth_density needs n >= 1");
  const TiltRecord r = solve_tilt(spec, a_n);
  const double skew = r.mu3 / (r.s2 * std::sqrt(r.s2));
  return num::standard_normal_pdf(x) *
         (1.0 + skew / (6.0 * std::sqrt(static_cast<double>(n))) * (x * x * x - 3.0 * x));
}

EdgeworthReport edgeworth_report(const DensitySpec& spec, double a_n, int n,
                                 const EdgeworthGrid& grid) {
  if (n < 2) throw Error(ErrorKind::Precondition, "edgeworth report needs n >= 2");
  EdgeworthReport rep;
  rep.n = n;
  rep.a_n = a_n;
  const TiltRecord r = solve_tilt(spec, a_n);
  rep.skewness = r.mu3 / (r.s2 * std::sqrt(r.s2));
  rep.growth_value = growth_condition(spec, n, a_n);
  rep.growth_warning = rep.growth_value > 1.0;

  GridDensity base = normalized_tilted_grid(spec, a_n, grid.bounds, grid.points);
  base.renormalize();
  const GridDensity sum = n_fold_convolution(base, n);
  rep.convolution_mass_drift = sum.mass_drift;
  rep.exact = rescale_sum(sum, n);

  rep.approx = rep.exact;
  const double c = rep.skewness / (6.0 * std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < rep.exact.size(); ++i) {
    const double x = rep.exact.x(i);
    const double phi = num::standard_normal_pdf(x);
    const double e = phi * (1.0 + c * (x * x * x - 3.0 * x));
    rep.approx.values[i] = e;
    if (x < -6.0 || x > 6.0) continue;
    rep.sup_error = std::max(rep.sup_error, std::fabs(rep.exact.values[i] - e));
    rep.gaussian_sup_error = std::max(rep.gaussian_sup_error, std::fabs(rep.exact.values[i] - phi));
  }
  rep.approx.update_mass();
  rep.sup_error_times_sqrt_n = rep.sup_error * std::sqrt(static_cast<double>(n));
  return rep;
}

std::vector<EdgeworthReport> edgeworth_error_scan(const DensitySpec& spec,
                                                  const std::function<double(int)>& a_schedule,
                                                  const std::vector<int>& n_list,
                                                  const EdgeworthGrid& grid) {
  std::vector<EdgeworthReport> out;
  for (int n : n_list) {
    if (n < 4) throw Error(ErrorKind::Precondition, "edgeworth scan needs n >= 4");
    out.push_back(edgeworth_report(spec, a_schedule(n), n, grid));
  }
  return out;
}

}  // namespace edp

// Acceptance suite. Usage: edp-acceptance --criterion N (1..11) or --all.
// Prints one PASS/FAIL line per criterion followed by the numbers behind it.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "edp/conditional_gibbs.hpp"
#include "edp/edgeworth.hpp"
#include "edp/exceedance_tail.hpp"
#include "edp/grid_density.hpp"
#include "edp/harness.hpp"
#include "edp/sampling.hpp"
#include "edp/tilted_calculus.hpp"

using namespace edp;

namespace {

struct Example {
  const char* name;
  DensitySpec spec;
};

std::vector<Example> examples() { return {{"weibull(k=2)", weibull(2.0)}, {"doubleexp", double_exponential()}}; }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", v[i]);
    s += buf;
  }
  return "[" + s + "]";
}

bool criterion_1() {
  bool ok = true;
  const std::vector<double> ts{10, 100, 1000};
  for (const auto& ex : examples()) {
    std::vector<double> rm, rs, r3, r3_psi;
    for (double t : ts) {
      const MomentComparison c = asymptotic_moments(ex.spec, t);
      rm.push_back(c.ratios_order1.m);
      rs.push_back(c.ratios_order1.s2);
      r3.push_back(c.ratios_order1.mu3);
      r3_psi.push_back(c.quadrature.mu3 / c.psi_second);
    }
    auto check = [&](const char* label, const std::vector<double>& r) {
      std::vector<double> dist;
      for (double v : r) dist.push_back(std::fabs(v - 1.0));
      const bool band = r.back() >= 0.9 && r.back() <= 1.1;
      const bool mono = strictly_decreasing(dist);
      std::printf("  %-13s %-22s %s  band@1e3=%s  toward1=%s\n", ex.name, label, join(r).c_str(),
                  band ? "yes" : "no", mono ? "yes" : "no");
      ok = ok && band && mono;
    };
    check("m/psi", rm);
    check("s2/psi'", rs);
    check("mu3/(6 psi'')", r3);
    std::printf("  %-13s %-22s %s  (diagnostic)\n", ex.name, "mu3/psi''", join(r3_psi).c_str());
  }
  return ok;
}

bool criterion_2() {
  bool ok = true;
  for (const auto& ex : examples()) {
    std::vector<double> s;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) s.push_back(std::fabs(skewness_ratio(ex.spec, t)));
    const bool dec = strictly_decreasing(s);
    std::printf("  %-13s |mu3/s^3| at t=1,10,1e2,1e3: %s  decreasing=%s\n", ex.name, join(s).c_str(),
                dec ? "yes" : "no");
    ok = ok && dec;
  }
  return ok;
}

bool criterion_3() {
  const DensitySpec w = weibull(2.0);
  const auto scan = edgeworth_error_scan(w, [](int n) { return std::pow(n, 0.25); }, {8, 16, 32, 64});
  std::vector<double> e;
  for (const auto& r : scan) {
    e.push_back(r.sup_error_times_sqrt_n);
    std::printf("  n=%-3d a_n=%.4f sqrt(n)*sup=%.6g gaussian sup=%.6g growth=%.4g%s drift=%.2e\n", r.n,
                r.a_n, r.sup_error_times_sqrt_n, r.gaussian_sup_error, r.growth_value,
                r.growth_warning ? " (above 1)" : "", r.convolution_mass_drift);
  }
  const bool dec = strictly_decreasing(e);

  // FFT power against direct summation on a standardised tilted grid
  const GridDensity base = normalized_tilted_grid(w, 2.0, {-12.0, 12.0}, 2049);
  double worst = 0.0;
  for (int n : {2, 4}) {
    ConvolutionOptions fft;
    ConvolutionOptions direct;
    direct.method = ConvolutionMethod::Direct;
    const GridDensity a = n_fold_convolution(base, n, fft);
    const GridDensity b = n_fold_convolution(base, n, direct);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a.values[i] - b.values[i]));
  }
  std::printf("  decreasing=%s; FFT vs direct max |diff| at n=2,4: %.3e (limit 1e-10)\n", dec ? "yes" : "no",
              worst);
  return dec && worst <= 1e-10;
}

bool criterion_4() {
  const DensitySpec w = weibull(2.0);
  const double slack = 1e-3;
  auto tv = [&](int n, double a) {
    const double v = tv_distance(w, make_point(w, n, a)).tv_fixed;
    std::printf("  n=%-3d a_n=%g TV=%.6f\n", n, a, v);
    return v;
  };
  std::vector<double> by_n{tv(8, 3), tv(16, 3), tv(32, 3)};
  std::vector<double> by_a{tv(16, 2), tv(16, 3), tv(16, 4)};
  auto dec_slack = [&](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[i - 1] + slack) return false;
    }
    return true;
  };
  const bool a_ok = dec_slack(by_n);
  const bool b_ok = dec_slack(by_a);
  std::printf("  decreasing in n: %s; decreasing in a_n (slack 1e-3): %s\n", a_ok ? "yes" : "no",
              b_ok ? "yes" : "no");
  return a_ok && b_ok;
}

bool criterion_5() {
  const DensitySpec w = weibull(2.0);
  const int n = 8;
  const double a = 3.0;
  OracleOptions o;
  o.base = OracleBase::AsGiven;
  o.method = ConvolutionMethod::Direct;
  o.dx = 0.01;
  const ConditionalOracle plain(w, n, a, o);
  double worst = 0.0;
  for (double alpha : {a, 2 * a}) {
    const ConditionalOracle tilted(tilt_spec(w, solve_tilt(w, alpha).t), n, a, o);
    for (double y1 = 0.25; y1 < 6.0; y1 += 0.25) {
      for (double y2 : {1.0, 3.0, 5.0}) {
        const double one[] = {y1};
        const double two[] = {y1, y2};
        worst = std::max(worst, std::fabs(plain.log_conditional(one) - tilted.log_conditional(one)));
        worst = std::max(worst, std::fabs(plain.log_conditional(two) - tilted.log_conditional(two)));
      }
    }
  }
  std::printf("  max |log p - log p_tilted| over alpha in {a_n, 2a_n}: %.3e (limit 1e-8)\n", worst);
  return worst <= 1e-8;
}

bool criterion_6() {
  const DensitySpec w = weibull(2.0);
  const TailEstimate e = mc_tail_estimate(w, 32, 2.0, 1000000, 20240601);
  const double gap = std::fabs(e.log_p_analytic - e.log_p_mc);
  std::printf("  n=32 a_n=2: analytic=%.6f mc=%.6f stderr=%.6f |gap|=%.6f (3 se = %.6f) hits=%zu\n",
              e.log_p_analytic, e.log_p_mc, e.mc_std_err, gap, 3 * e.mc_std_err, e.hits);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double direct = ts.integrate([&](double x) { return std::exp(log_density(w, x)); }, 3.0, 15.0);
  const double approx1 = tail_prob_approx(w, 1, 3.0);
  const double gap1 = std::fabs(approx1 - std::log(direct));
  std::printf("  n=1 a=3: approx=%.6f quadrature=%.6f |log ratio|=%.4f (limit 0.2)\n", approx1,
              std::log(direct), gap1);
  return gap <= 3 * e.mc_std_err && gap1 <= 0.2;
}

bool criterion_7() {
  const DensitySpec w = weibull(2.0);
  const ExceedanceReport r = exceedance_report(w, 16, 2.0);
  std::printf("  n=16 a_n=2: eta=%.6f raw mass=%.6f grid integral=%.8f TV=%.5f decreasing after mode=%s\n",
              r.eta, std::exp(r.raw_log_mass), r.grid_integral, r.tv_exact,
              r.decreasing_after_mode ? "yes" : "no");
  const MassRatio m = exceedance_mass_ratio(w, 1000, 2.0);
  std::printf("  n=1000 a_n=2: log(P2/P1)=%.3f vs log(1/sqrt n)=%.3f\n", m.log_ratio, -0.5 * std::log(1000.0));
  return std::fabs(r.grid_integral - 1.0) <= 1e-4 && r.tv_exact <= 0.1 &&
         m.log_ratio < -0.5 * std::log(1000.0);
}

bool criterion_8() {
  bool ok = true;
  std::vector<double> u;
  for (int i = -30; i <= 30; ++i) u.push_back(i / 10.0);
  for (const auto& ex : examples()) {
    const auto rows = concentration_check(ex.spec, {2, 4, 8, 16}, u);
    std::vector<double> dev, sup;
    for (const auto& r : rows) {
      dev.push_back(r.max_ratio_deviation);
      sup.push_back(r.sup_distance_to_normal);
    }
    const bool d1 = strictly_decreasing(dev);
    const bool d2 = strictly_decreasing(sup);
    std::printf("  %-13s max|s2 ratio - 1|: %s decreasing=%s\n", ex.name, join(dev).c_str(), d1 ? "yes" : "no");
    std::printf("  %-13s sup|density - phi|: %s decreasing=%s\n", ex.name, join(sup).c_str(), d2 ? "yes" : "no");
    ok = ok && d1 && d2;
  }
  return ok;
}

bool criterion_9() {
  bool ok = true;
  const std::vector<double> ts{10, 100, 1000, 10000};
  for (const auto& ex : examples()) {
    const DecayDiagnostics d = laplace_remainder_diagnostics(ex.spec, ts);
    const std::pair<const char*, double DecayRow::*> items[] = {
        {"|log sigma|/int psi", &DecayRow::log_sigma_ratio},
        {"sup h''' sigma^4 l^4", &DecayRow::h3_window},
        {"h'' sigma^3 l", &DecayRow::h2_sigma3_l},
        {"xi ratio", &DecayRow::xi_ratio},
    };
    for (const auto& [label, member] : items) {
      const bool dec = d.strictly_decreasing(member);
      std::printf("  %-13s %-22s %s decreasing=%s\n", ex.name, label, join(d.series(member)).c_str(),
                  dec ? "yes" : "no");
      ok = ok && dec;
    }
    for (const auto& r : d.rows) {
      if (r.window_clipped) std::printf("  %-13s window clipped by the support at t=%g\n", ex.name, r.t);
    }
  }
  return ok;
}

bool criterion_10() {
  bool ok = true;
  for (const auto& ex : examples()) {
    std::vector<double> p;
    for (double a : {3.0, 5.0, 8.0}) {
      const DemocracyEstimate d = democracy_demo(ex.spec, 8, a, 1.0, 10000, 77);
      p.push_back(d.probability);
      std::printf("  %-13s a_n=%g P(all |X_i - a_n| < 1)=%.4f +- %.4f\n", ex.name, a, d.probability, d.std_err);
    }
    const bool inc = p[1] > p[0] && p[2] > p[1];
    std::printf("  %-13s increasing=%s%s\n", ex.name, inc ? "yes" : "no",
                ex.spec.family() == "weibull" ? "" : " (diagnostic)");
    if (ex.spec.family() == "weibull") ok = ok && inc;
  }
  return ok;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool criterion_11() {
  namespace fs = std::filesystem;
  std::vector<SimConfig> configs(3);
  configs[0].experiment = Experiment::Tail;
  configs[0].n_list = {32};
  configs[0].a_schedule = parse_a_schedule("fixed:2");
  configs[0].samples = 100000;
  configs[1].experiment = Experiment::Democracy;
  configs[1].n_list = {8};
  configs[1].a_schedule = parse_a_schedule("fixed:3,5");
  configs[1].samples = 4000;
  configs[2].experiment = Experiment::ConditionalTv;
  configs[2].n_list = {8, 16};
  configs[2].a_schedule = parse_a_schedule("fixed:3");
  bool ok = true;
  const fs::path root = fs::temp_directory_path() / "edp_acceptance_determinism";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "2", "5"}) {
      setenv("EDP_THREADS", threads, 1);
      SimConfig c = configs[i];
      c.seed = 4242;
      c.out_dir = (root / (std::to_string(i) + "_" + threads)).string();
      fs::remove_all(c.out_dir);
      const RunSummary s = run(c);
      std::string all;
      for (const auto& f : s.files) all += slurp(fs::path(c.out_dir) / f);
      outputs.push_back(all);
    }
    unsetenv("EDP_THREADS");
    const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    std::printf("  %-15s threads 1/2/5 byte-identical CSV: %s (%zu bytes)\n", to_string(configs[i].experiment),
                same ? "yes" : "no", outputs[0].size());
    ok = ok && same;
  }
  // conditional point sampler, outside the harness
  setenv("EDP_THREADS", "1", 1);
  const auto a = sample_conditional_point(weibull(2.0), 8, 3.0, 600, 9);
  setenv("EDP_THREADS", "3", 1);
  const auto b = sample_conditional_point(weibull(2.0), 8, 3.0, 600, 9);
  unsetenv("EDP_THREADS");
  std::printf("  conditional point sampler identical across thread counts: %s\n", a == b ? "yes" : "no");
  return ok && a == b;
}

const std::vector<std::pair<const char*, std::function<bool()>>> kCriteria = {
    {"tilted moment asymptotics", criterion_1},
    {"skewness vanishes along the tilt", criterion_2},
    {"extreme-tilt Edgeworth expansion", criterion_3},
    {"total variation of the conditional marginal", criterion_4},
    {"tilt invariance of the conditional law", criterion_5},
    {"sharp tail formula", criterion_6},
    {"exceedance conditional density", criterion_7},
    {"concentration of the tilted law", criterion_8},
    {"Laplace remainder diagnostics", criterion_9},
    {"democracy under exceedance", criterion_10},
    {"determinism across thread counts", criterion_11},
};

bool run_one(int id) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string error;
  std::printf("criterion %d: %s\n", id, kCriteria[id - 1].first);
  try {
    ok = kCriteria[id - 1].second();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!error.empty()) std::printf("  error: %s\n", error.c_str());
  std::printf("%s criterion %d (%.1f s)\n", ok ? "PASS" : "FAIL", id, secs);
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--all") == 0) {
      for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) ids.push_back(k);
    } else {
      std::fprintf(stderr, "usage: edp-acceptance --criterion N | --all\n");
      return 2;
    }
  }
  if (ids.empty()) {
    std::fprintf(stderr, "usage: edp-acceptance --criterion N | --all\n");
    return 2;
  }
  bool all = true;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    all = run_one(id) && all;
  }
  return all ? 0 : 1;
}

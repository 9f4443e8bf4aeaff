#include "edp/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "edp/conditional_gibbs.hpp"
#include "edp/edgeworth.hpp"
#include "edp/error.hpp"
#include "edp/exceedance_tail.hpp"
#include "edp/sampling.hpp"
#include "edp/tilted_calculus.hpp"

namespace edp {

namespace {

using nlohmann::json;

constexpr const char* kCodeVersion = "0.1.0";

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::DensityCheck, "density-check"}, {Experiment::Tilt, "tilt"},
    {Experiment::Edgeworth, "edgeworth"},         {Experiment::ConditionalTv, "conditional-tv"},
    {Experiment::Tail, "tail"},                   {Experiment::Exceedance, "exceedance"},
    {Experiment::Democracy, "democracy"},
};

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "'" + s + "' is not a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::int64_t as_int(bool b) { return b ? 1 : 0; }

std::vector<double> geometric(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const int steps = static_cast<int>(std::round(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  return out;
}

std::vector<ResultTable> density_check(const SimConfig& c) {
  const DensitySpec& spec = c.spec.spec;
  const bool rinf = spec.class_hint().kind == ClassHint::Kind::RInfinity;
  const RegularityReport rep = regularity_report(spec, rinf ? geometric(10, 1e6, 1) : geometric(10, 1e4, 1));

  ResultTable cls{"class", {"family", "hint", "verdict", "beta_estimate", "log_c"}, {}};
  cls.add_row({spec.family(), to_string(spec.class_hint()), to_string(ClassHint{rep.verdict, rep.beta_estimate}),
               rep.beta_estimate, spec.log_c()});

  ResultTable flags{"conditions", {"condition", "pass", "margin", "rule"}, {}};
  for (const auto& [name, f] : rep.condition_flags) flags.add_row({name, as_int(f.pass), f.margin, f.rule});

  ResultTable decay{"decay",
                    {"t", "x_hat", "sigma", "l", "log_sigma_ratio", "h3_window", "h2_sigma3_l",
                     "xi_ratio", "window_clipped"},
                    {}};
  for (const DecayRow& r : laplace_remainder_diagnostics(spec, c.t_list).rows) {
    decay.add_row({r.t, r.x_hat, r.sigma, r.l, r.log_sigma_ratio, r.h3_window, r.h2_sigma3_l,
                   r.xi_ratio, as_int(r.window_clipped)});
  }
  return {cls, flags, decay};
}

std::vector<ResultTable> tilt(const SimConfig& c) {
  const DensitySpec& spec = c.spec.spec;
  ResultTable t{"tilt",
                {"t", "m", "s2", "mu3", "log_phi", "psi", "psi_prime", "six_psi_second", "ratio_m",
                 "ratio_s2", "ratio_mu3", "ratio_m_refined", "ratio_s2_refined", "ratio_mu3_refined",
                 "abs_skewness"},
                {}};
  for (double tv : c.t_list) {
    const MomentComparison mc = asymptotic_moments(spec, tv);
    const TiltRecord r = moments(spec, tv);
    t.add_row({tv, r.m, r.s2, r.mu3, r.log_phi, mc.asymptotic_order1.m, mc.asymptotic_order1.s2,
               mc.asymptotic_order1.mu3, mc.ratios_order1.m, mc.ratios_order1.s2, mc.ratios_order1.mu3,
               mc.ratios_refined.m, mc.ratios_refined.s2, mc.ratios_refined.mu3,
               std::fabs(r.mu3 / std::pow(r.s2, 1.5))});
  }
  return {t};
}

std::vector<ResultTable> edgeworth(const SimConfig& c) {
  ResultTable t{"edgeworth",
                {"n", "a_n", "sup_error", "sqrt_n_sup_error", "gaussian_sup_error", "skewness",
                 "growth_value", "growth_warning", "mass_drift"},
                {}};
  EdgeworthGrid grid;
  grid.points = c.grid_points;
  grid.bounds = {c.grid_lo, c.grid_hi};
  for (int n : c.n_list) {
    for (double a : c.a_schedule.at(n)) {
      const EdgeworthReport r = edgeworth_report(c.spec.spec, a, n, grid);
      t.add_row({std::int64_t{n}, a, r.sup_error, r.sup_error_times_sqrt_n, r.gaussian_sup_error,
                 r.skewness, r.growth_value, as_int(r.growth_warning), r.convolution_mass_drift});
    }
  }
  return {t};
}

std::vector<ResultTable> conditional_tv(const SimConfig& c) {
  ResultTable t{"conditional_tv",
                {"n", "a_n", "tv_fixed", "tv_gaussian", "ratio_min", "ratio_max", "exact_mass",
                 "growth_value", "growth_warning"},
                {}};
  for (int n : c.n_list) {
    for (double a : c.a_schedule.at(n)) {
      const ConditionalReport r = tv_distance(c.spec.spec, make_point(c.spec.spec, n, a));
      t.add_row({std::int64_t{n}, a, r.tv_fixed, r.tv_gaussian, r.ratio_min, r.ratio_max, r.exact_mass,
                 r.point.growth_value, as_int(r.point.growth_warning)});
    }
  }
  return {t};
}

std::vector<ResultTable> tail(const SimConfig& c) {
  ResultTable t{"tail",
                {"n", "a_n", "log_p_analytic", "log_p_mc", "stderr", "samples", "seed", "hits",
                 "growth_value", "lambda_sq"},
                {}};
  for (int n : c.n_list) {
    for (double a : c.a_schedule.at(n)) {
      const TailApprox ap = tail_approx(c.spec.spec, n, a);
      const TailEstimate e = mc_tail_estimate(c.spec.spec, n, a, c.samples, c.seed);
      t.add_row({std::int64_t{n}, a, e.log_p_analytic, e.log_p_mc, e.mc_std_err,
                 static_cast<std::int64_t>(e.mc_samples), std::to_string(e.seed),
                 static_cast<std::int64_t>(e.hits), ap.growth_value, ap.lambda_sq});
    }
  }
  return {t};
}

std::vector<ResultTable> exceedance(const SimConfig& c) {
  ResultTable t{"exceedance",
                {"n", "a_n", "eta", "raw_log_mass", "grid_integral", "tv_exact", "decreasing_after_mode",
                 "log_p2_over_p1"},
                {}};
  for (int n : c.n_list) {
    for (double a : c.a_schedule.at(n)) {
      const MassRatio mr = exceedance_mass_ratio(c.spec.spec, n, a);
      if (n <= 64) {
        const ExceedanceReport r = exceedance_report(c.spec.spec, n, a);
        t.add_row({std::int64_t{n}, a, r.eta, r.raw_log_mass, r.grid_integral, r.tv_exact,
                   as_int(r.decreasing_after_mode), mr.log_ratio});
      } else {
        // no exact oracle beyond 64 summands
        const ExceedanceMixture mix(c.spec.spec, n, a);
        t.add_row({std::int64_t{n}, a, mix.eta(), mix.raw_log_mass(), std::nan(""), std::nan(""),
                   std::int64_t{-1}, mr.log_ratio});
      }
    }
  }
  return {t};
}

std::vector<ResultTable> democracy(const SimConfig& c) {
  ResultTable t{"democracy", {"n", "a_n", "epsilon", "probability", "std_err", "draws", "seed"}, {}};
  for (int n : c.n_list) {
    for (double a : c.a_schedule.at(n)) {
      const DemocracyEstimate d = democracy_demo(c.spec.spec, n, a, c.epsilon, c.samples, c.seed);
      t.add_row({std::int64_t{n}, a, c.epsilon, d.probability, d.std_err,
                 static_cast<std::int64_t>(d.draws), std::to_string(c.seed)});
    }
  }
  return {t};
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& x : kExperiments) {
    if (x.e == e) return x.name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (const auto& x : kExperiments) {
    if (name == x.name) return x.e;
  }
  return std::nullopt;
}

std::vector<double> ASchedule::at(int n) const {
  switch (kind) {
    case Kind::Fixed: return values;
    case Kind::Power: return {c * std::pow(static_cast<double>(n), alpha)};
    case Kind::Log: return {c * std::log(static_cast<double>(n))};
  }
  return {};
}

std::string ASchedule::describe() const {
  switch (kind) {
    case Kind::Fixed: {
      std::string s = "fixed:";
      for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_number(values[i]);
      return s;
    }
    case Kind::Power: return "power:c=" + format_number(c) + ",alpha=" + format_number(alpha);
    case Kind::Log: return "log:c=" + format_number(c);
  }
  return "";
}

ASchedule parse_a_schedule(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  ASchedule s;
  if (kind == "fixed") {
    s.kind = ASchedule::Kind::Fixed;
    s.values.clear();
    for (const auto& v : split(rest, ',')) s.values.push_back(parse_double(v));
    if (s.values.empty()) throw Error(ErrorKind::Parse, "fixed schedule needs at least one value");
    return s;
  }
  if (kind != "power" && kind != "log") {
    throw Error(ErrorKind::Parse, "a-schedule must be fixed:, power: or log:");
  }
  s.kind = kind == "power" ? ASchedule::Kind::Power : ASchedule::Kind::Log;
  for (const auto& item : split(rest, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double v = parse_double(item.substr(eq + 1));
    if (key == "c") {
      s.c = v;
    } else if (key == "alpha" && s.kind == ASchedule::Kind::Power) {
      s.alpha = v;
    } else {
      throw Error(ErrorKind::Parse, "unknown schedule parameter '" + key + "'");
    }
  }
  return s;
}

std::string SimConfig::canonical_json() const {
  json doc;
  doc["spec"] = json::parse(spec.canonical);
  doc["experiment"] = to_string(experiment);
  doc["n_list"] = n_list;
  doc["a_schedule"] = a_schedule.describe();
  doc["t_list"] = t_list;
  doc["epsilon"] = epsilon;
  doc["samples"] = samples;
  doc["seed"] = std::to_string(seed);
  doc["grid"] = {{"points", grid_points}, {"bounds", {grid_lo, grid_hi}}};
  return doc.dump();
}

std::string SimConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_json()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != headers.size()) {
    throw Error(ErrorKind::Precondition, "row width " + std::to_string(row.size()) +
                                             " differs from header width " + std::to_string(headers.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string to_csv(const ResultTable& table, const std::string& config_hash) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  };
  std::string out;
  for (const auto& h : table.headers) out += quote(h) + ",";
  out += "config_hash\n";
  for (const auto& row : table.rows) {
    for (const Cell& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        out += format_number(*d);
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) {
        out += std::to_string(*i);
      } else {
        out += quote(std::get<std::string>(cell));
      }
      out += ",";
    }
    out += config_hash + "\n";
  }
  return out;
}

std::vector<ResultTable> run_experiment(const SimConfig& c) {
  switch (c.experiment) {
    case Experiment::DensityCheck: return density_check(c);
    case Experiment::Tilt: return tilt(c);
    case Experiment::Edgeworth: return edgeworth(c);
    case Experiment::ConditionalTv: return conditional_tv(c);
    case Experiment::Tail: return tail(c);
    case Experiment::Exceedance: return exceedance(c);
    case Experiment::Democracy: return democracy(c);
  }
  throw Error(ErrorKind::Precondition, "unknown experiment");
}

RunSummary run(const SimConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ResultTable> tables = run_experiment(config);
  const std::string hash = config.hash();

  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  RunSummary summary;
  for (const auto& t : tables) {
    const std::string file = std::string(to_string(config.experiment)) + "_" + t.name + ".csv";
    std::ofstream out(fs::path(config.out_dir) / file, std::ios::binary);
    out << to_csv(t, hash);
    if (!out) throw Error(ErrorKind::Precondition, "cannot write " + file);
    summary.files.push_back(file);
  }
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["config"] = json::parse(config.canonical_json());
  manifest["config_hash"] = hash;
  manifest["code_version"] = kCodeVersion;
  manifest["wall_time_seconds"] = summary.wall_seconds;
  manifest["files"] = summary.files;
  std::ofstream out(fs::path(config.out_dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::Precondition, "cannot write manifest.json");
  return summary;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    if (err->kind() == ErrorKind::Parse) return 1;
    return is_precondition(err->kind()) ? 2 : 3;
  }
  return 3;
}

}  // namespace edp

#include "edp/spec_io.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "edp/error.hpp"

namespace edp {

namespace {

using nlohmann::json;
using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
// g needs a trustworthy second derivative at the right end for the continuation
using SmoothSpline = boost::math::interpolators::cardinal_quintic_b_spline<double>;

double number(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number()) {
    throw Error(ErrorKind::Parse, std::string("spec field '") + key + "' must be a number");
  }
  return doc.at(key).get<double>();
}

std::vector<double> numbers(const json& doc, const char* key) {
  if (!doc.at(key).is_array()) throw Error(ErrorKind::Parse, std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : doc.at(key)) {
    if (!v.is_number()) throw Error(ErrorKind::Parse, std::string("'") + key + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

ClassHint parse_hint(const json& doc) {
  if (!doc.contains("class")) return ClassHint::unknown();
  const std::string c = doc.at("class").get<std::string>();
  if (c == "r_beta") return ClassHint::r_beta(number(doc, "beta"));
  if (c == "r_infinity") return ClassHint::r_infinity();
  if (c == "unknown") return ClassHint::unknown();
  throw Error(ErrorKind::Parse, "class must be r_beta, r_infinity or unknown");
}

DensitySpec custom_table(const json& doc) {
  const std::vector<double> x = numbers(doc, "x");
  const std::vector<double> g = numbers(doc, "g");
  if (x.size() < 8 || g.size() != x.size()) {
    throw Error(ErrorKind::Parse, "custom-table needs >= 8 x nodes and a g value per node");
  }
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::fabs(x[i] - x[i - 1] - step) > 1e-9 * std::max(1.0, std::fabs(step))) {
      throw Error(ErrorKind::Parse, "custom-table x grid must be uniform");
    }
  }
  auto gs = std::make_shared<SmoothSpline>(g, x.front(), step);
  const double xe = x.back();
  const double ge = (*gs)(xe);
  const double he = gs->prime(xe);
  const double ce = gs->double_prime(xe);
  if (!(ce > 0.0) || !(he > 0.0)) {
    throw Error(ErrorKind::Parse, "custom-table g must end increasing and convex");
  }

  DensityClosures f;
  f.g = [gs, xe, ge, he, ce](double v) {
    if (v <= xe) return (*gs)(v);
    const double d = v - xe;
    return ge + he * d + 0.5 * ce * d * d;
  };
  f.h = [gs, xe, he, ce](double v) { return v <= xe ? gs->prime(v) : he + ce * (v - xe); };
  f.h1 = [gs, xe, ce](double v) { return v <= xe ? gs->double_prime(v) : ce; };
  if (doc.contains("q")) {
    const std::vector<double> q = numbers(doc, "q");
    if (q.size() != x.size()) throw Error(ErrorKind::Parse, "q table must match the x grid");
    auto qs = std::make_shared<Spline>(q.begin(), q.end(), x.front(), step);
    const double qe = q.back();
    f.q = [qs, xe, qe](double v) { return v <= xe ? (*qs)(v) : qe; };
  }
  std::optional<double> log_c;
  if (doc.contains("log_c")) log_c = number(doc, "log_c");
  const bool singular = doc.value("singular_at_boundary", false);
  return DensitySpec("custom-table", std::move(f), x.front(), parse_hint(doc), log_c, singular);
}

}  // namespace

SpecDocument parse_spec_document(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("spec document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("family") || !doc.at("family").is_string()) {
    throw Error(ErrorKind::Parse, "spec document needs a string 'family'");
  }
  const std::string family = doc.at("family").get<std::string>();
  try {
    if (family == "weibull") {
      DensitySpec s = weibull(number(doc, "k"));
      return {spec_to_json(s), s};
    }
    if (family == "doubleexp") {
      DensitySpec s = double_exponential();
      return {spec_to_json(s), s};
    }
    if (family == "custom-table") return {doc.dump(), custom_table(doc)};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("spec document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Precondition) throw Error(ErrorKind::Parse, e.what());
    throw;
  }
  throw Error(ErrorKind::Parse, "unknown family '" + family + "'");
}

SpecDocument parse_spec_argument(const std::string& argument) {
  const auto colon = argument.find(':');
  const std::string head = argument.substr(0, colon);
  if (head == "weibull" || head == "doubleexp") {
    json doc = {{"family", head}};
    if (colon != std::string::npos) {
      std::stringstream rest(argument.substr(colon + 1));
      std::string item;
      while (std::getline(rest, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected param=value in '" + item + "'");
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != value.size() || value.empty()) {
          throw Error(ErrorKind::Parse, "'" + value + "' is not a number");
        }
        doc[item.substr(0, eq)] = v;
      }
    }
    return parse_spec_document(doc.dump());
  }
  if (!std::filesystem::is_regular_file(argument)) {
    throw Error(ErrorKind::Parse, "spec '" + argument + "' is neither a known family nor a file");
  }
  std::ifstream in(argument);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_document(buf.str());
}

std::string spec_to_json(const DensitySpec& spec) {
  json doc = {{"family", spec.family()}};
  for (const auto& [k, v] : spec.params()) doc[k] = v;
  return doc.dump();
}

}  // namespace edp

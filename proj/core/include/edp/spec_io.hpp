#pragma once

// Density spec documents. A document is a JSON object:
//
//   {"family": "weibull", "k": 2}
//   {"family": "doubleexp"}
//   {"family": "custom-table", "x": [...], "g": [...], "q": [...],
//    "log_c": -1.2, "class": "r_beta", "beta": 1, "singular_at_boundary": false}
//
// custom-table needs a uniform x grid; g (and optional q) are interpolated by
// cubic B-splines and g continues quadratically right of the table. The CLI
// also accepts the short form "family:param=value,...".

#include <string>

#include "edp/density_model.hpp"

namespace edp {

struct SpecDocument {
  std::string canonical;  // compact JSON with sorted keys
  DensitySpec spec;
};

SpecDocument parse_spec_document(const std::string& json_text);
// "weibull:k=2", "doubleexp", or a path to a document file.
SpecDocument parse_spec_argument(const std::string& argument);
// Canonical document for the built-in families.
std::string spec_to_json(const DensitySpec& spec);

}  // namespace edp

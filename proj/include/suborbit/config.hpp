#pragma once

// JSON configuration for the pipelines. Every missing or malformed field is
// reported by name.
//
// Vector literals:
//   sequence  {"entries": {"1": [re, im], "3": [re, im]}}
//   function  {"q": 16, "i0": 0, "samples": [[re, im], ...]}
// Families ("family"):
//   {"kind": "explicit", "elements": [<vector>, ...], "A": a, "B": b}
//   {"kind": "canonical_basis", "size": K}
//   {"kind": "exponential_bump", "size": K, "C": c, "beta": b, "trunc_tol": 1e-14}
//   {"kind": "indicator", "q": q, "intervals": [[left, right], ...]}   chi_[left, right)
// Rationals are integers, "p/q" strings, or numbers on the relevant grid.

#include <optional>
#include <string>

#include <json.hpp>

#include "suborbit/approx_l2n.hpp"
#include "suborbit/approx_l2r.hpp"
#include "suborbit/approx_localized.hpp"
#include "suborbit/core_types.hpp"

namespace suborbit {

class ConfigError : public Error {
 public:
  using Error::Error;
};

using ConfigJson = nlohmann::json;

ConfigJson load_config(const std::string& path);
ConfigJson parse_config(const std::string& text);

Vector parse_vector(const ConfigJson& j);
/// Rational from an integer, a "p/q" string, or a number that lies on the
/// grid 1/q.
Rational parse_rational(const ConfigJson& j, const std::string& field, std::int64_t q = 1);

struct FamilyConfig {
  FrameFamily family;
  std::optional<Index> truncation_radius;
};

FamilyConfig parse_family(const ConfigJson& j);

/// Accepts a number or the string "sqrt2".
double parse_lambda(const ConfigJson& config);

FiniteSupportOptions parse_finite_support_options(const ConfigJson& config);
LocalizedOptions parse_localized_options(const ConfigJson& config, std::optional<Index> truncation_radius);
L2rOptions parse_l2r_options(const ConfigJson& config);
GaborSpec parse_gabor_spec(const ConfigJson& j);

}  // namespace suborbit

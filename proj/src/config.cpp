#include "suborbit/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace suborbit {

namespace {

const ConfigJson& field(const ConfigJson& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) {
    throw ConfigError("missing field '" + name + "'");
  }
  return j.at(name);
}

double number(const ConfigJson& j, const std::string& name) {
  const ConfigJson& v = field(j, name);
  if (!v.is_number()) {
    throw ConfigError("field '" + name + "' must be a number");
  }
  return v.get<double>();
}

std::optional<double> optional_number(const ConfigJson& j, const std::string& name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return number(j, name);
}

std::int64_t integer(const ConfigJson& j, const std::string& name) {
  const ConfigJson& v = field(j, name);
  if (!v.is_number_integer()) {
    throw ConfigError("field '" + name + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::optional<std::int64_t> optional_integer(const ConfigJson& j, const std::string& name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return integer(j, name);
}

std::optional<std::size_t> optional_count(const ConfigJson& j, const std::string& name) {
  const auto v = optional_integer(j, name);
  if (!v) return std::nullopt;
  if (*v < 1) throw ConfigError("field '" + name + "' must be at least 1");
  return static_cast<std::size_t>(*v);
}

std::optional<int> optional_int(const ConfigJson& j, const std::string& name) {
  const auto v = optional_integer(j, name);
  if (!v) return std::nullopt;
  return static_cast<int>(*v);
}

Complex amplitude(const ConfigJson& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("field '" + where + "' must be a number or [re, im]");
}

}  // namespace

ConfigJson parse_config(const std::string& text) {
  try {
    return ConfigJson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

ConfigJson load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Vector parse_vector(const ConfigJson& j) {
  if (j.is_object() && j.contains("entries")) {
    const ConfigJson& entries = j.at("entries");
    if (!entries.is_object()) throw ConfigError("field 'entries' must be an object");
    CoordinateVector::Entries out;
    for (const auto& [key, value] : entries.items()) {
      Index index = 0;
      try {
        std::size_t used = 0;
        index = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("entry key '" + key + "' is not an integer index");
      }
      out.emplace(index, amplitude(value, "entries." + key));
    }
    const auto bound = optional_integer(j, "support_bound");
    return CoordinateVector(std::move(out), bound);
  }
  if (j.is_object() && j.contains("samples")) {
    const std::int64_t q = integer(j, "q");
    const std::int64_t i0 = integer(j, "i0");
    const ConfigJson& samples = j.at("samples");
    if (!samples.is_array()) throw ConfigError("field 'samples' must be an array");
    std::vector<Complex> out;
    for (const auto& s : samples) out.push_back(amplitude(s, "samples"));
    return SampledFunction(q, i0, std::move(out));
  }
  throw ConfigError("a vector needs 'entries' (sequence) or 'q', 'i0', 'samples' (function)");
}

Rational parse_rational(const ConfigJson& j, const std::string& name, std::int64_t q) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto slash = text.find('/');
    const auto whole_integer = [&](const std::string& part) {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      return v;
    };
    try {
      if (slash != std::string::npos) {
        return Rational(whole_integer(text.substr(0, slash)), whole_integer(text.substr(slash + 1)));
      }
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      if (text.find_first_of(".eE") == std::string::npos) return Rational(whole_integer(text));
      return parse_rational(ConfigJson(v), name, q);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("field '" + name + "' is not a rational: " + text);
    }
  }
  if (j.is_number()) {
    const double scaled = j.get<double>() * static_cast<double>(q);
    if (std::abs(scaled - std::round(scaled)) > 1e-9) {
      throw ConfigError("field '" + name + "' is not on the grid 1/" + std::to_string(q));
    }
    return Rational(static_cast<std::int64_t>(std::llround(scaled)), q);
  }
  throw ConfigError("field '" + name + "' must be an integer, a number or a \"p/q\" string");
}

FamilyConfig parse_family(const ConfigJson& j) {
  if (!j.is_object()) throw ConfigError("field 'family' must be an object");
  const ConfigJson& kind_field = field(j, "kind");
  if (!kind_field.is_string()) throw ConfigError("field 'kind' must be a string");
  const auto kind = kind_field.get<std::string>();
  const auto lower = optional_number(j, "A");
  const auto upper = optional_number(j, "B");
  if (kind == "explicit") {
    const ConfigJson& elements = field(j, "elements");
    if (!elements.is_array() || elements.empty()) {
      throw ConfigError("field 'elements' must be a nonempty array");
    }
    std::vector<Vector> out;
    for (const auto& e : elements) out.push_back(parse_vector(e));
    return {FrameFamily(std::move(out), lower, upper), std::nullopt};
  }
  if (kind == "canonical_basis") {
    const std::int64_t size = integer(j, "size");
    if (size < 1) throw ConfigError("field 'size' must be at least 1");
    std::vector<Vector> out;
    for (Index k = 1; k <= size; ++k) out.emplace_back(basis_vector(k));
    return {FrameFamily(std::move(out), lower, upper), std::nullopt};
  }
  if (kind == "exponential_bump") {
    const std::int64_t size = integer(j, "size");
    if (size < 1) throw ConfigError("field 'size' must be at least 1");
    const double tol = optional_number(j, "trunc_tol").value_or(1e-14);
    LocalizedFamily f = exponential_bump_family(static_cast<std::size_t>(size), number(j, "C"), number(j, "beta"), tol);
    return {FrameFamily(f.family.elements(), lower, upper), f.radius};
  }
  if (kind == "indicator") {
    const std::int64_t q = integer(j, "q");
    const ConfigJson& intervals = field(j, "intervals");
    if (!intervals.is_array() || intervals.empty()) {
      throw ConfigError("field 'intervals' must be a nonempty array");
    }
    std::vector<Vector> out;
    for (const auto& iv : intervals) {
      if (!iv.is_array() || iv.size() != 2) throw ConfigError("field 'intervals' needs [left, right] pairs");
      out.emplace_back(
          SampledFunction::indicator(q, parse_rational(iv[0], "intervals", q), parse_rational(iv[1], "intervals", q)));
    }
    return {FrameFamily(std::move(out), lower, upper), std::nullopt};
  }
  throw ConfigError("unknown family kind '" + kind + "'");
}

double parse_lambda(const ConfigJson& config) {
  const ConfigJson& v = field(config, "lambda");
  if (v.is_string() && v.get<std::string>() == "sqrt2") return std::numbers::sqrt2;
  if (!v.is_number()) throw ConfigError("field 'lambda' must be a number or \"sqrt2\"");
  return v.get<double>();
}

FiniteSupportOptions parse_finite_support_options(const ConfigJson& config) {
  FiniteSupportOptions o;
  o.lambda = parse_lambda(config);
  o.epsilon = number(config, "epsilon");
  o.upper = optional_number(config, "B");
  o.rows = optional_count(config, "K");
  o.n_terms = optional_count(config, "n_terms");
  o.N = optional_int(config, "N");
  o.j = optional_int(config, "j");
  o.rank_tol = optional_number(config, "rank_tol").value_or(kDefaultRankTol);
  const std::string rule = config.contains("rule") ? config.at("rule").get<std::string>() : "general";
  if (rule == "general" || rule == "l2n") {
    o.rule = FiniteSupportRule::general;
  } else if (rule == "sqrt2") {
    o.rule = FiniteSupportRule::sqrt2;
  } else if (rule == "sqrt2_restricted") {
    o.rule = FiniteSupportRule::sqrt2_restricted;
  } else {
    throw ConfigError("field 'rule' must be general, sqrt2 or sqrt2_restricted");
  }
  return o;
}

LocalizedOptions parse_localized_options(const ConfigJson& config, std::optional<Index> truncation_radius) {
  LocalizedOptions o;
  o.lambda = parse_lambda(config);
  o.C = number(config, "C");
  o.beta = number(config, "beta");
  o.epsilon = optional_number(config, "epsilon");
  o.epsilon_fraction = optional_number(config, "epsilon_fraction");
  if (!o.epsilon && !o.epsilon_fraction) throw ConfigError("missing field 'epsilon' (or 'epsilon_fraction')");
  o.upper = optional_number(config, "B");
  o.rows = optional_count(config, "K");
  o.n_terms = optional_count(config, "n_terms");
  o.truncation_radius = truncation_radius;
  o.rank_tol = optional_number(config, "rank_tol").value_or(kDefaultRankTol);
  return o;
}

L2rOptions parse_l2r_options(const ConfigJson& config) {
  L2rOptions o;
  o.lambda = parse_lambda(config);
  o.epsilon = optional_number(config, "epsilon");
  o.upper = optional_number(config, "B");
  o.rows = optional_count(config, "K");
  o.n_terms = optional_count(config, "n_terms");
  o.N = optional_int(config, "N");
  o.j = optional_int(config, "j");
  o.rank_tol = optional_number(config, "rank_tol").value_or(kDefaultRankTol);
  return o;
}

GaborSpec parse_gabor_spec(const ConfigJson& j) {
  if (!j.is_object()) throw ConfigError("field 'gabor' must be an object");
  GaborSpec spec;
  const Vector window = parse_vector(field(j, "window"));
  if (!std::holds_alternative<SampledFunction>(window)) {
    throw ConfigError("field 'window' must be a sampled function");
  }
  spec.window = std::get<SampledFunction>(window);
  spec.a = parse_rational(field(j, "a"), "a", spec.window.q());
  spec.b = number(j, "b");
  spec.m_range = integer(j, "m_range");
  spec.n_range = integer(j, "n_range");
  return spec;
}

}  // namespace suborbit

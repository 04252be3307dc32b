#include "monret/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw InvalidInput(std::string("unknown key \"") + key + "\" in " + what);
  }
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInput(where + ": expected a number or an [re, im] pair");
}

std::vector<double> number_array(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw InvalidInput("missing key \"" + key + "\"");
  const Json& a = j.at(key);
  if (!a.is_array() || a.empty()) throw InvalidInput("\"" + key + "\" must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw InvalidInput("\"" + key + "\" must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

double get_number(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw InvalidInput("missing key \"" + key + "\"");
  if (!j.at(key).is_number()) throw InvalidInput("\"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

double get_number(const Json& j, const std::string& key, double fallback) {
  return j.contains(key) ? get_number(j, key) : fallback;
}

std::int64_t get_int(const Json& j, const std::string& key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw InvalidInput("\"" + key + "\" must be an integer");
  return j.at(key).get<std::int64_t>();
}

std::uint64_t get_u64(const Json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw InvalidInput("\"" + key + "\" must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw InvalidInput("\"" + key + "\" must be true or false");
  return j.at(key).get<bool>();
}

RawSpectralModel raw_model_from_json(const Json& j) {
  require_object(j, "model");
  if (j.contains("energies") || j.contains("weights")) {
    reject_unknown(j, {"energies", "weights", "degeneracy_tol", "weight_floor"}, "model");
    const auto e = number_array(j, "energies");
    const auto w = number_array(j, "weights");
    if (e.size() != w.size()) throw InvalidInput("energies and weights differ in length");
    std::vector<Level> levels;
    for (std::size_t i = 0; i < e.size(); ++i) levels.push_back({e[i], w[i]});
    return RawSpectralModel(std::move(levels));
  }
  if (j.contains("hamiltonian")) {
    reject_unknown(j, {"hamiltonian", "initial_state", "degeneracy_tol", "weight_floor"}, "model");
    if (!j.contains("initial_state")) throw InvalidInput("missing key \"initial_state\"");
    const Json& rows = j.at("hamiltonian");
    if (!rows.is_array() || rows.empty()) throw InvalidInput("\"hamiltonian\" must be a list of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    HamiltonianInput h;
    h.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw InvalidInput("\"hamiltonian\" must be square");
      for (Eigen::Index c = 0; c < n; ++c)
        h.matrix(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], "hamiltonian");
    }
    const Json& psi = j.at("initial_state");
    if (!psi.is_array() || static_cast<Eigen::Index>(psi.size()) != n)
      throw InvalidInput("\"initial_state\" must have one entry per row of the hamiltonian");
    h.initial_state.resize(n);
    for (Eigen::Index r = 0; r < n; ++r)
      h.initial_state(r) = complex_from_json(psi[static_cast<std::size_t>(r)], "initial_state");
    return spectral_decompose(h);
  }
  throw InvalidInput("model needs either energies/weights or hamiltonian/initial_state");
}

CanonicalSpectralModel model_from_json(const Json& j) {
  const RawSpectralModel raw = raw_model_from_json(j);
  return canonicalize(raw, get_number(j, "degeneracy_tol", kDefaultDegeneracyTol),
                      get_number(j, "weight_floor", kDefaultWeightFloor));
}

TimeDistribution dist_from_json(const Json& j) {
  require_object(j, "dist");
  // The law's name is keyed "type", or "dist" in flat configs.
  const char* tag = j.contains("type") ? "type" : "dist";
  if (!j.contains(tag) || !j.at(tag).is_string()) throw InvalidInput("dist needs a string \"type\"");
  const auto type = j.at(tag).get<std::string>();
  if (type == "fixed") {
    reject_unknown(j, {tag, "tau"}, "dist");
    return TimeDistribution(Fixed{get_number(j, "tau")});
  }
  if (type == "exponential") {
    reject_unknown(j, {tag, "rate"}, "dist");
    return TimeDistribution(Exponential{get_number(j, "rate")});
  }
  if (type == "uniform") {
    reject_unknown(j, {tag, "a", "b"}, "dist");
    return TimeDistribution(Uniform{get_number(j, "a"), get_number(j, "b")});
  }
  if (type == "gamma") {
    reject_unknown(j, {tag, "shape", "rate"}, "dist");
    return TimeDistribution(Gamma{get_number(j, "shape"), get_number(j, "rate")});
  }
  throw InvalidInput("unknown dist type \"" + type + "\"");
}

Json to_json(const TimeDistribution& d) {
  return std::visit(
      [](const auto& law) -> Json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Fixed>)
          return {{"type", "fixed"}, {"tau", law.tau0}};
        else if constexpr (std::is_same_v<T, Exponential>)
          return {{"type", "exponential"}, {"rate", law.rate}};
        else if constexpr (std::is_same_v<T, Uniform>)
          return {{"type", "uniform"}, {"a", law.a}, {"b", law.b}};
        else
          return {{"type", "gamma"}, {"shape", law.shape}, {"rate", law.rate}};
      },
      d.variant());
}

Json to_json(const MomentReport& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["mean_k"] = r.mean_k;
  j["mean_t"] = r.mean_t;
  auto moments = [](const std::map<int, double>& m) {
    Json o = Json::object();
    for (const auto& [order, value] : m) o[std::to_string(order)] = value;
    return o;
  };
  j["moments_k"] = moments(r.moments_k);
  j["moments_t"] = moments(r.moments_t);
  if (r.method == MomentMethod::monte_carlo) {
    j["std_errors_k"] = moments(r.std_errors_k);
    j["std_errors_t"] = moments(r.std_errors_t);
    j["samples"] = r.samples;
    j["censored_fraction"] = r.censored_fraction;
  } else {
    j["truncation_K"] = r.truncation_K;
    j["tail_bound"] = r.tail_bound;
  }
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

Json to_json(const WindingResult& r) {
  Json j;
  j["winding"] = r.winding;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["residual"] = r.residual;
  switch (r.method) {
    case WindingMethod::phase_unwrap:
      j["min_modulus"] = r.min_modulus;
      j["max_phase_jump"] = r.max_phase_jump;
      j["grid_points"] = r.grid_points;
      break;
    case WindingMethod::poly_roots:
      j["root_moduli"] = r.root_moduli;
      break;
    case WindingMethod::correlator_contour:
      j["imag_part"] = r.imag_part;
      j["max_norm_deviation"] = r.max_norm_deviation;
      j["truncation_K"] = r.truncation_K;
      j["grid_points"] = r.grid_points;
      break;
    case WindingMethod::series_mean:
      break;
  }
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace monret

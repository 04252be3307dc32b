#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "monret/analysis.hpp"
#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"
#include "monret/winding.hpp"

namespace monret {

using Json = nlohmann::json;

// Model objects take one of two forms:
//   {"energies": [...], "weights": [...]}
//   {"hamiltonian": M, "initial_state": v}
// where complex entries are [re, im] pairs or bare reals and M is a list of
// rows. Optional keys "degeneracy_tol" and "weight_floor" tune
// canonicalization. Unknown keys are rejected.
RawSpectralModel raw_model_from_json(const Json& j);
CanonicalSpectralModel model_from_json(const Json& j);

// {"type": "fixed", "tau": t} | {"type": "exponential", "rate": r}
// | {"type": "uniform", "a": a, "b": b} | {"type": "gamma", "shape": k, "rate": r}
// "dist" is accepted in place of "type".
TimeDistribution dist_from_json(const Json& j);
Json to_json(const TimeDistribution& d);

Json to_json(const MomentReport& r);
Json to_json(const WindingResult& r);

// Shortest text that round-trips: 17 significant digits, "inf"/"-inf"/"nan"
// for non-finite values.
std::string format_double(double v);

// Typed lookups that throw InvalidInput with the key name.
double get_number(const Json& j, const std::string& key);
double get_number(const Json& j, const std::string& key, double fallback);
std::int64_t get_int(const Json& j, const std::string& key, std::int64_t fallback);
std::uint64_t get_u64(const Json& j, const std::string& key, std::uint64_t fallback);
bool get_bool(const Json& j, const std::string& key, bool fallback);

}  // namespace monret

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spincs/geometry.hpp"
#include "spincs/propagator.hpp"

namespace spincs {

// Raised for malformed or unknown configuration content.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Complex complex_from_json(const Json& j);
Json complex_to_json(Complex z);

AngleTriple angles_from_json(const Json& j);

// {"two_s", "coeffs": [[re, im], ...]} in m-descending order, or one of the
// strings "lowest", "highest", "random" (the last draws from rng).
FiducialVector fv_from_json(const Json& j, Spin spin, std::mt19937_64& rng);
Json fv_to_json(const FiducialVector& fv);

HamiltonianSpec hamiltonian_from_json(const Json& j, Spin spin);

Path path_from_json(const Json& j);
Json path_to_json(const FiducialVector& fv, const Path& path);

// Rejects keys of `j` not present in `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

} // namespace spincs

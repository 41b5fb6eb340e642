#pragma once

#include "pvlab/discretization.hpp"
#include "pvlab/sources.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pvlab::cli {

/// Names of the registered analytic fields.
std::vector<std::string> catalog_names();

/// One-line description per catalog entry, for `pvlab catalog`.
std::string catalog_help();

/// Scalar field from a catalog entry such as
/// {"field": "cos_mode", "k": 2, "amplitude": 0.5}. ConfigError on unknown
/// names or keys. The seed feeds "broadband".
ScalarFn scalar_field(const nlohmann::json& spec, int dim, std::uint64_t seed);

/// Vector field: a scalar entry in 1D, or {"components": [x, y]} in 2D.
VectorFn vector_field(const nlohmann::json& spec, int dim, std::uint64_t seed);

/// Time profile {"coeff": c, "power": m, "rate": r} for c t^m e^{r t}.
ExpPoly time_profile(const nlohmann::json& spec);

/// Coefficients read from a file with one value per line (blank lines and
/// lines starting with '#' skipped).
Vec read_coefficients(const std::string& path);

} // namespace pvlab::cli

#pragma once

#include <string>
#include <vector>

namespace pvlab {

/// Physical coefficients of the poro-visco-elastic system, nondimensionalized.
struct PhysParams {
    double lambda_e = 1.0;    ///< first Lame parameter
    double mu = 1.0;          ///< shear modulus
    double alpha = 1.0;       ///< Biot-Willis coupling
    double c0 = 0.0;          ///< storage coefficient
    double kappa = 1.0;       ///< permeability (constant)
    double delta1 = 0.0;      ///< Kelvin-Voigt relaxation time
    double delta2 = 0.0;      ///< fluid-content adjustment coefficient
    double lambda_star = 0.0; ///< secondary-consolidation viscosity

    double elastic_modulus() const { return lambda_e + 2.0 * mu; }
};

enum class RegimeKind { ClassicalBiot, ViscoStandardContent, ViscoAdjustedContent, SecondaryConsolidation };
enum class Compressibility { Incompressible, Compressible };

struct RegimeTag {
    RegimeKind kind = RegimeKind::ClassicalBiot;
    Compressibility compressibility = Compressibility::Incompressible;

    bool operator==(const RegimeTag&) const = default;
};

std::string to_string(RegimeKind kind);
std::string to_string(Compressibility c);
std::string to_string(const RegimeTag& tag);

/// Throws InvalidParams when the zero pattern of (delta1, delta2, lambda_star)
/// admits no regime.
RegimeTag classify_regime(const PhysParams& params);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool valid() const { return violations.empty(); }
};

ValidationReport validate_params(const PhysParams& params);

/// validate_params followed by a throw (InvalidParams) listing every violation.
void require_valid(const PhysParams& params);

} // namespace pvlab

#pragma once

#include "pvlab/operators.hpp"
#include "pvlab/sources.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pvlab {

/// Whichever initial quantities the user supplies. p0, d0 and p1 live in the
/// zero-mean pressure space, u0 in the displacement space.
struct InitialSpec {
    std::optional<FieldVec> p0;
    std::optional<FieldVec> u0;
    std::optional<FieldVec> d0;
    std::optional<FieldVec> p1;
};

/// PressureOnly resolves what a pressure-only reduced solve needs and lets
/// the displacement stay unknown where the admissible table allows it.
enum class ResolveMode { Full, PressureOnly };

enum class Origin { Absent, Given, Derived };

std::string to_string(Origin o);

/// Complete initial state. Empty vectors mark absent quantities.
struct InitialState {
    RegimeTag regime;
    ResolveMode mode = ResolveMode::Full;
    Vec p;
    Vec u;
    Vec u_dot;
    Vec p_dot;
    Vec zeta; ///< primal fluid content
    Origin p_origin = Origin::Absent;
    Origin u_origin = Origin::Absent;
    Origin u_dot_origin = Origin::Absent;
    Origin p_dot_origin = Origin::Absent;
    Origin zeta_origin = Origin::Absent;

    /// Which admissible combination the state was built from, e.g. "p0+u0".
    std::string basis;
    /// Relative defect of the mass balance at t = 0 (incompressible, delta2 = 0
    /// visco case only): |alpha Ddiv u_t + Ap p - S| measured in the Mp^{-1} norm.
    double mass_defect = 0.0;
    /// Share of d0 / p1 data that the discrete coupling cannot represent.
    double unrepresentable_fraction = 0.0;

    bool has_u() const { return u.size() > 0; }
    bool has_u_dot() const { return u_dot.size() > 0; }
    bool has_p_dot() const { return p_dot.size() > 0; }
    bool has_zeta() const { return zeta.size() > 0; }
};

/// Admissible combinations per regime:
///   ClassicalBiot              d0 | p0
///   ViscoStandard, c0 = 0      p0 + u0   (p0 alone in PressureOnly mode)
///   ViscoStandard, c0 > 0      p0 + u0 | p0 + p1
///   ViscoAdjusted              p0 + u0   (p0 alone in PressureOnly mode)
///   SecondaryConsolidation     p0 + u0
/// Extra fields are accepted when they agree with the derived state to 1e-10
/// relative (OverspecifiedInconsistent otherwise). Any other combination is
/// Underspecified.
InitialState resolve_initial_state(const Operators& ops, const InitialSpec& spec, const SourceSpec& sources,
                                   ResolveMode mode = ResolveMode::Full);

/// Every quantity present in the state, as an InitialSpec (zeta becomes d0, p_dot becomes p1).
InitialSpec as_spec(const InitialState& state);

/// Fluid content c0 Mp p + alpha Ddiv u + delta2 Ddiv u_dot (dual).
Vec fluid_content_dual(const Operators& ops, const Vec& p, const Vec& u, const Vec& u_dot);

/// Displacement compatible with the incompressible visco mass balance at t = 0:
/// alpha Ddiv u_t(0) = S(0) - Ap p0, with the minimal-energy u_t(0).
Vec consistent_displacement(const Operators& ops, const Vec& p0, const SourceSpec& sources);

/// Largest relative difference between two states over the fields both carry.
double state_difference(const InitialState& a, const InitialState& b);

} // namespace pvlab

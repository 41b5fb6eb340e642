#pragma once

#include "pvlab/discretization.hpp"

#include <functional>
#include <optional>
#include <string>

namespace pvlab {

using SpaceTimeScalar = std::function<double(const Point&, double)>;
using SpaceTimeVector = std::function<std::array<double, 2>(const Point&, double)>;

/// c * t^power * exp(rate * t) with its exact derivative.
struct ExpPoly {
    double coeff = 1.0;
    int power = 0;
    double rate = 0.0;

    double value(double t) const;
    double derivative(double t) const;
};

/// Body force F and fluid source S. Empty callables mean identically zero.
/// Time derivatives are optional; reductions that differentiate data demand them.
struct SourceSpec {
    SpaceTimeVector F;
    std::optional<SpaceTimeVector> F_t;
    SpaceTimeScalar S;
    std::optional<SpaceTimeScalar> S_t;
    bool F_constant_in_time = false;
    bool S_constant_in_time = false;
    std::string descriptor = "none";

    /// Separable time profiles, when known, let the 1D oracle treat the source.
    std::optional<ExpPoly> F_profile;
    std::optional<ExpPoly> S_profile;

    bool has_F() const { return static_cast<bool>(F); }
    bool has_S() const { return static_cast<bool>(S); }

    /// No sources.
    static SourceSpec none() { return {}; }
    /// F(x, t) = f(x) g(t), S(x, t) = s(x) h(t) with exact time derivatives.
    /// A null f or s drops the respective source.
    static SourceSpec separable(VectorFn f, ExpPoly g, ScalarFn s, ExpPoly h, std::string descriptor);
    /// 2 * sources (or any scalar multiple).
    SourceSpec scaled(double factor) const;
};

/// Displacement dual vector (v, F(t)) on interior rows.
Vec load_vector(const OperatorBundle& bundle, const SourceSpec& src, double t);
/// Same for F_t. MissingTimeDerivative if F is time dependent without F_t.
Vec load_rate_vector(const OperatorBundle& bundle, const SourceSpec& src, double t);
/// Pressure dual vector (q, S(t)), projected to be orthogonal to constants.
Vec source_vector(const OperatorBundle& bundle, const SourceSpec& src, double t);
Vec source_rate_vector(const OperatorBundle& bundle, const SourceSpec& src, double t);

} // namespace pvlab

#include "pvlab/sources.hpp"

#include "pvlab/errors.hpp"
#include "pvlab/krylov.hpp"

#include <cmath>

namespace pvlab {

double ExpPoly::value(double t) const
{
    return coeff * std::pow(t, power) * std::exp(rate * t);
}

double ExpPoly::derivative(double t) const
{
    const double e = std::exp(rate * t);
    double d = rate * std::pow(t, power);
    if (power > 0)
        d += power * std::pow(t, power - 1);
    return coeff * d * e;
}

SourceSpec SourceSpec::separable(VectorFn f, ExpPoly g, ScalarFn s, ExpPoly h, std::string descriptor)
{
    SourceSpec spec;
    spec.descriptor = std::move(descriptor);
    if (f) {
        spec.F = [f, g](const Point& x, double t) {
            auto v = f(x);
            const double gt = g.value(t);
            return std::array<double, 2>{v[0] * gt, v[1] * gt};
        };
        spec.F_t = [f, g](const Point& x, double t) {
            auto v = f(x);
            const double gt = g.derivative(t);
            return std::array<double, 2>{v[0] * gt, v[1] * gt};
        };
        spec.F_constant_in_time = g.power == 0 && g.rate == 0.0;
        spec.F_profile = g;
    }
    if (s) {
        spec.S = [s, h](const Point& x, double t) { return s(x) * h.value(t); };
        spec.S_t = [s, h](const Point& x, double t) { return s(x) * h.derivative(t); };
        spec.S_constant_in_time = h.power == 0 && h.rate == 0.0;
        spec.S_profile = h;
    }
    return spec;
}

SourceSpec SourceSpec::scaled(double factor) const
{
    SourceSpec out = *this;
    auto scale_vec = [factor](SpaceTimeVector fn) -> SpaceTimeVector {
        return [fn, factor](const Point& x, double t) {
            auto v = fn(x, t);
            return std::array<double, 2>{factor * v[0], factor * v[1]};
        };
    };
    auto scale_sc = [factor](SpaceTimeScalar fn) -> SpaceTimeScalar {
        return [fn, factor](const Point& x, double t) { return factor * fn(x, t); };
    };
    if (F)
        out.F = scale_vec(F);
    if (F_t)
        out.F_t = scale_vec(*F_t);
    if (S)
        out.S = scale_sc(S);
    if (S_t)
        out.S_t = scale_sc(*S_t);
    if (F_profile)
        out.F_profile->coeff *= factor;
    if (S_profile)
        out.S_profile->coeff *= factor;
    return out;
}

namespace {

Vec assemble_vector_field(const OperatorBundle& b, const SpaceTimeVector& fn, double t)
{
    const Mesh& m = *b.mesh;
    const Vec nodal = nodal_values(m, VectorFn([&](const Point& x) { return fn(x, t); }));
    return b.Mu_load * nodal;
}

Vec assemble_scalar_field(const OperatorBundle& b, const SpaceTimeScalar& fn, double t)
{
    const Mesh& m = *b.mesh;
    const Vec nodal = nodal_values(m, ScalarFn([&](const Point& x) { return fn(x, t); }));
    return project_dual(b.Mp * nodal, b.meanvec);
}

} // namespace

Vec load_vector(const OperatorBundle& bundle, const SourceSpec& src, double t)
{
    if (!src.has_F())
        return Vec::Zero(bundle.nu());
    return assemble_vector_field(bundle, src.F, t);
}

Vec load_rate_vector(const OperatorBundle& bundle, const SourceSpec& src, double t)
{
    if (!src.has_F() || src.F_constant_in_time)
        return Vec::Zero(bundle.nu());
    if (!src.F_t)
        throw Error(ErrorCode::MissingTimeDerivative, "time-dependent body force without an analytic F_t");
    return assemble_vector_field(bundle, *src.F_t, t);
}

Vec source_vector(const OperatorBundle& bundle, const SourceSpec& src, double t)
{
    if (!src.has_S())
        return Vec::Zero(bundle.np());
    return assemble_scalar_field(bundle, src.S, t);
}

Vec source_rate_vector(const OperatorBundle& bundle, const SourceSpec& src, double t)
{
    if (!src.has_S() || src.S_constant_in_time)
        return Vec::Zero(bundle.np());
    if (!src.S_t)
        throw Error(ErrorCode::MissingTimeDerivative, "time-dependent fluid source without an analytic S_t");
    return assemble_scalar_field(bundle, *src.S_t, t);
}

} // namespace pvlab

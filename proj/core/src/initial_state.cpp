#include "pvlab/initial_state.hpp"

#include "pvlab/errors.hpp"

#include <cmath>
#include <limits>

namespace pvlab {

std::string to_string(Origin o)
{
    switch (o) {
    case Origin::Absent:
        return "absent";
    case Origin::Given:
        return "given";
    case Origin::Derived:
        return "derived";
    }
    return "unknown";
}

namespace {

constexpr double kConsistencyTol = 1e-10;
constexpr double kMeanTol = 1e-12;

double rel_diff(const Vec& a, const Vec& b)
{
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

void check_field(const OperatorBundle& b, const std::optional<FieldVec>& f, const char* name, bool pressure)
{
    if (!f)
        return;
    const Space want = pressure ? Space::PressureZeroMean : Space::Displacement;
    if (f->space != want)
        throw Error(ErrorCode::SpaceMismatch, std::string(name) + " is tagged with the wrong function space");
    const int n = pressure ? b.np() : b.nu();
    if (f->coeffs.size() != n)
        throw Error(ErrorCode::SpaceMismatch, std::string(name) + " has " + std::to_string(f->coeffs.size()) +
                                                  " coefficients, expected " + std::to_string(n));
    if (pressure && std::abs(b.meanvec.dot(f->coeffs)) > kMeanTol * f->coeffs.norm())
        throw Error(ErrorCode::NonZeroMean, std::string(name) + " violates the zero-mean constraint");
}

void require_agreement(const Vec& given, const Vec& derived, const char* name)
{
    const double d = rel_diff(given, derived);
    if (d > kConsistencyTol)
        throw Error(ErrorCode::OverspecifiedInconsistent,
                    std::string(name) + " disagrees with the state derived from the other data (relative difference " +
                        std::to_string(d) + ")");
}

[[noreturn]] void underspecified(const RegimeTag& tag, const std::string& detail)
{
    throw Error(ErrorCode::Underspecified, "initial data not admissible for " + to_string(tag) + ": " + detail);
}

double dual_norm(const Operators& ops, const Vec& r)
{
    return std::sqrt(std::max(0.0, r.dot(ops.mass_solve(r))));
}

Vec primal_content(const Operators& ops, const Vec& zeta_dual)
{
    return ops.project_primal(ops.mass_solve(zeta_dual));
}

/// Ke^{-1}(F0 - alpha G p): the displacement balancing the elastic equation.
Vec equilibrium_displacement(const Operators& ops, const Vec& p, const Vec& F0)
{
    return ops.apply_Einv(F0 - ops.params().alpha * (ops.bundle().G * p));
}

/// Minimal-energy rate v = Ke^{-1} Ddiv' y with alpha Ddiv v = rhs.
Vec rate_from_content_balance(const Operators& ops, const Vec& rhs, double* unrepresentable)
{
    CalBSolveInfo info;
    const Vec y = ops.solve_shifted_B_dual(0.0, ops.params().alpha, rhs, &info);
    if (unrepresentable)
        *unrepresentable = info.unrepresentable_fraction;
    return ops.apply_Einv(ops.bundle().Ddiv.transpose() * y);
}

} // namespace

Vec fluid_content_dual(const Operators& ops, const Vec& p, const Vec& u, const Vec& u_dot)
{
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    Vec z = pp.alpha * (b.Ddiv * u);
    if (pp.c0 != 0.0)
        z += pp.c0 * (b.Mp * p);
    if (pp.delta2 != 0.0)
        z += pp.delta2 * (b.Ddiv * u_dot);
    return z;
}

Vec consistent_displacement(const Operators& ops, const Vec& p0, const SourceSpec& sources)
{
    const PhysParams& pp = ops.params();
    if (!(pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "consistent_displacement requires delta1 > 0");
    const OperatorBundle& b = ops.bundle();
    const Vec rhs = ops.project_dual(source_vector(b, sources, 0.0) - b.Ap * p0);
    const Vec v = rate_from_content_balance(ops, rhs, nullptr);
    return equilibrium_displacement(ops, p0, load_vector(b, sources, 0.0)) - pp.delta1 * v;
}

InitialState resolve_initial_state(const Operators& ops, const InitialSpec& spec, const SourceSpec& sources,
                                   ResolveMode mode)
{
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    require_valid(pp);
    check_field(b, spec.p0, "p0", true);
    check_field(b, spec.d0, "d0", true);
    check_field(b, spec.p1, "p1", true);
    check_field(b, spec.u0, "u0", false);

    InitialState st;
    st.regime = classify_regime(pp);
    st.mode = mode;
    const bool P = spec.p0.has_value();
    const bool U = spec.u0.has_value();
    const bool D = spec.d0.has_value();
    const bool P1 = spec.p1.has_value();
    const Vec F0 = load_vector(b, sources, 0.0);
    const Vec S0 = source_vector(b, sources, 0.0);
    const RegimeTag tag = st.regime;
    const bool incompressible = pp.c0 == 0.0;

    bool u_in_basis = false;
    bool d_in_basis = false;
    bool p1_in_basis = false;

    auto set_rate_from_u = [&] {
        st.u_dot = (equilibrium_displacement(ops, st.p, F0) - st.u) / pp.delta1;
        st.u_dot_origin = Origin::Derived;
    };
    auto set_pressure_rate = [&] {
        st.p_dot = ops.project_primal(
            ops.mass_solve(ops.project_dual(S0 - b.Ap * st.p - pp.alpha * (b.Ddiv * st.u_dot))) / pp.c0);
        st.p_dot_origin = Origin::Derived;
    };
    auto set_content_from_fields = [&] {
        const Vec v = st.has_u_dot() ? st.u_dot : Vec::Zero(b.nu());
        st.zeta = primal_content(ops, fluid_content_dual(ops, st.p, st.u, v));
        st.zeta_origin = Origin::Derived;
    };

    switch (tag.kind) {
    case RegimeKind::ClassicalBiot: {
        if (P1)
            underspecified(tag, "p1 belongs to no admissible combination");
        if (P) {
            st.p = spec.p0->coeffs;
            st.p_origin = Origin::Given;
            st.basis = "p0";
        } else if (D) {
            CalBSolveInfo info;
            const Vec rhs = b.Mp * spec.d0->coeffs - pp.alpha * (b.Ddiv * ops.apply_Einv(F0));
            st.p = ops.solve_calB_dual(rhs, &info);
            st.unrepresentable_fraction = info.unrepresentable_fraction;
            st.p_origin = Origin::Derived;
            st.basis = "d0";
            d_in_basis = true;
        } else {
            underspecified(tag, "supply d0 or p0");
        }
        st.u = equilibrium_displacement(ops, st.p, F0);
        st.u_origin = Origin::Derived;
        set_content_from_fields();
        if (d_in_basis)
            st.zeta_origin = Origin::Derived;
        break;
    }
    case RegimeKind::ViscoStandardContent: {
        if (!P)
            underspecified(tag, "p0 is required");
        st.p = spec.p0->coeffs;
        st.p_origin = Origin::Given;
        if (U) {
            st.u = spec.u0->coeffs;
            st.u_origin = Origin::Given;
            u_in_basis = true;
            st.basis = "p0+u0";
            set_rate_from_u();
        } else if (P1 && !incompressible) {
            const Vec rhs = ops.project_dual(S0 - b.Ap * st.p - pp.c0 * (b.Mp * spec.p1->coeffs));
            const Vec v = rate_from_content_balance(ops, rhs, &st.unrepresentable_fraction);
            st.u = equilibrium_displacement(ops, st.p, F0) - pp.delta1 * v;
            st.u_origin = Origin::Derived;
            st.basis = "p0+p1";
            p1_in_basis = true;
            set_rate_from_u();
        } else if (incompressible && mode == ResolveMode::PressureOnly && !P1 && !D) {
            st.basis = "p0";
            break;
        } else {
            underspecified(tag, incompressible ? "supply p0 and u0 (p0 alone only for pressure-only solves)"
                                               : "supply p0 with u0 or with p1");
        }
        if (incompressible) {
            if (P1)
                underspecified(tag, "p1 belongs to no admissible combination with c0 = 0");
            const Vec r = ops.project_dual(pp.alpha * (b.Ddiv * st.u_dot) + b.Ap * st.p - S0);
            const double scale = dual_norm(ops, ops.project_dual(b.Ap * st.p)) + dual_norm(ops, S0);
            st.mass_defect = scale > 0.0 ? dual_norm(ops, r) / scale : dual_norm(ops, r);
        } else {
            set_pressure_rate();
            if (p1_in_basis && rel_diff(spec.p1->coeffs, st.p_dot) <= kConsistencyTol)
                st.p_dot_origin = Origin::Given;
        }
        set_content_from_fields();
        break;
    }
    case RegimeKind::ViscoAdjustedContent: {
        if (P1)
            underspecified(tag, "p1 belongs to no admissible combination");
        if (!P)
            underspecified(tag, "p0 is required (d0 alone does not determine the state)");
        st.p = spec.p0->coeffs;
        st.p_origin = Origin::Given;
        if (U) {
            st.u = spec.u0->coeffs;
            st.u_origin = Origin::Given;
            u_in_basis = true;
            st.basis = "p0+u0";
            set_rate_from_u();
            set_content_from_fields();
        } else if (mode == ResolveMode::PressureOnly) {
            // u + delta1 u_t balances the elastic equation, so the content needs no u
            st.basis = "p0";
            st.zeta = primal_content(ops, ops.apply_calB_dual(st.p) + pp.alpha * (b.Ddiv * ops.apply_Einv(F0)));
            st.zeta_origin = Origin::Derived;
        } else {
            underspecified(tag, "u0 is required to recover the displacement");
        }
        break;
    }
    case RegimeKind::SecondaryConsolidation: {
        if (P1)
            underspecified(tag, "p1 belongs to no admissible combination");
        if (!P || !U)
            underspecified(tag, "supply p0 and u0");
        st.p = spec.p0->coeffs;
        st.p_origin = Origin::Given;
        st.u = spec.u0->coeffs;
        st.u_origin = Origin::Given;
        u_in_basis = true;
        st.basis = "p0+u0";
        set_content_from_fields();
        break;
    }
    }

    if (U && !u_in_basis) {
        if (!st.has_u())
            underspecified(tag, "u0 cannot be checked against a pressure-only state");
        require_agreement(spec.u0->coeffs, st.u, "u0");
    }
    if (D && !d_in_basis) {
        if (!st.has_zeta())
            underspecified(tag, "d0 cannot be checked against a pressure-only state");
        require_agreement(spec.d0->coeffs, st.zeta, "d0");
    }
    if (P1 && !p1_in_basis) {
        if (!st.has_p_dot())
            underspecified(tag, "p1 belongs to no admissible combination");
        require_agreement(spec.p1->coeffs, st.p_dot, "p1");
    }
    return st;
}

InitialSpec as_spec(const InitialState& s)
{
    InitialSpec spec;
    spec.p0 = FieldVec::pressure(s.p);
    if (s.has_u())
        spec.u0 = FieldVec::displacement(s.u);
    if (s.has_zeta())
        spec.d0 = FieldVec::pressure(s.zeta);
    if (s.has_p_dot())
        spec.p1 = FieldVec::pressure(s.p_dot);
    return spec;
}

double state_difference(const InitialState& a, const InitialState& b)
{
    double worst = 0.0;
    auto cmp = [&](const Vec& x, const Vec& y) {
        if ((x.size() == 0) != (y.size() == 0)) {
            worst = std::numeric_limits<double>::infinity();
            return;
        }
        if (x.size() != 0)
            worst = std::max(worst, rel_diff(x, y));
    };
    cmp(a.p, b.p);
    cmp(a.u, b.u);
    cmp(a.u_dot, b.u_dot);
    cmp(a.p_dot, b.p_dot);
    cmp(a.zeta, b.zeta);
    return worst;
}

} // namespace pvlab

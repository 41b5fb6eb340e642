#include "pvlab/cli/verify.hpp"

#include "pvlab/diagnostics.hpp"
#include "pvlab/errors.hpp"
#include "pvlab/oracle1d.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace pvlab::cli {

namespace {

using std::numbers::pi;

Check le(std::string label, double v, double thr)
{
    return {std::move(label), v, thr, "<=", 0.0, v <= thr};
}

Check ge(std::string label, double v, double thr)
{
    return {std::move(label), v, thr, ">=", 0.0, v >= thr};
}

Check lt(std::string label, double v, double thr)
{
    return {std::move(label), v, thr, "<", 0.0, v < thr};
}

Check within(std::string label, double v, double lo, double hi)
{
    return {std::move(label), v, lo, "in", hi, v >= lo && v <= hi};
}

Check finite(std::string label, double v)
{
    return {std::move(label), v, 0.0, "finite", 0.0, std::isfinite(v)};
}

Check report(std::string label, double v)
{
    return {std::move(label), v, 0.0, "report", 0.0, true};
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

ScalarFn phi(int k)
{
    return [k](const Point& x) { return std::numbers::sqrt2 * std::cos(k * pi * x[0]); };
}

ScalarFn psi(int k, double amp = 1.0)
{
    return [k, amp](const Point& x) { return amp * std::numbers::sqrt2 * std::sin(k * pi * x[0]); };
}

std::shared_ptr<const Operators> make_ops(int dim, int n, const PhysParams& pp, SolverConfig cfg = {})
{
    return std::make_shared<const Operators>(assemble_forms(build_mesh(dim, n), pp), cfg);
}

double mnorm(const SpMat& M, const Vec& v)
{
    return std::sqrt(std::max(0.0, v.dot(M * v)));
}

PhysParams unit_params()
{
    return PhysParams{};
}

/// Largest relative (Mp, Mu) distance between two trajectories of equal length.
double trajectory_distance(const OperatorBundle& b, const Trajectory& x, const Trajectory& y, bool with_u)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.states.size(); ++i) {
        double d2 = std::pow(mnorm(b.Mp, x.states[i].p - y.states[i].p), 2);
        double n2 = std::pow(mnorm(b.Mp, x.states[i].p), 2);
        if (with_u) {
            d2 += std::pow(mnorm(b.Mu, x.states[i].u - y.states[i].u), 2);
            n2 += std::pow(mnorm(b.Mu, x.states[i].u), 2);
        }
        num = std::max(num, std::sqrt(d2));
        den = std::max(den, std::sqrt(n2));
    }
    return num / den;
}

double final_state_distance(const OperatorBundle& b, const State& x, const State& y)
{
    return std::hypot(mnorm(b.Mp, x.p - y.p), mnorm(b.Mu, x.u - y.u));
}

// ---------------------------------------------------------------- criteria

void criterion_operator_properties(CriterionResult& r, const VerifyOptions& opts)
{
    std::mt19937_64 rng(20240101);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (auto [dim, n] : {std::pair{1, 128}, std::pair{2, 24}}) {
        SolverConfig cfg;
        cfg.dense_threshold = 1024;
        for (double c0 : {0.0, 1.0}) {
            PhysParams pp = unit_params();
            pp.c0 = c0;
            const auto ops = make_ops(dim, n, pp, cfg);
            const std::string tag = ops->bundle().mesh->id() + " c0=" + fmt(c0);
            if (c0 == 0.0) {
                const PropertyReport rep = ops->check_operator_properties(opts.b_asymmetry);
                r.checks.push_back(le(tag + " B symmetry defect", rep.b_symmetry_defect, 1e-10));
                r.checks.push_back(ge(tag + " B min Ritz", rep.b_min_ritz, -1e-10));
            }
            const OperatorBundle& b = ops->bundle();
            Vec z(b.np());
            for (int i = 0; i < z.size(); ++i)
                z[i] = unif(rng);
            z = ops->project_primal(z);
            // with c0 = 0 only range(B) is attainable on P1-P1 pairs
            const Vec d = c0 == 0.0 ? ops->apply_B(z) : z;
            const Vec x = ops->solve_calB(d);
            const double res = mnorm(b.Mp, ops->apply_calB(x) - d) / mnorm(b.Mp, d);
            r.checks.push_back(le(tag + " calB solve residual", res, 1e-9));
        }
    }
}

void criterion_b_identity(CriterionResult& r, const VerifyOptions&)
{
    const PhysParams pp = unit_params();
    const double b = 1.0 / pp.elastic_modulus();
    const std::vector<int> ns{32, 64, 128};
    double worst_ratio = 0.0;
    double min_order = std::numeric_limits<double>::infinity();
    for (int k : {1, 2, 4}) {
        std::vector<double> errs;
        for (int n : ns) {
            const auto ops = make_ops(1, n, pp);
            const Mesh& mesh = *ops->bundle().mesh;
            const Vec p = project_function(mesh, phi(k), Space::PressureZeroMean).coeffs;
            const double err = mnorm(ops->bundle().Mp, ops->apply_B(p) - b * p) / mnorm(ops->bundle().Mp, p);
            errs.push_back(err);
            worst_ratio = std::max(worst_ratio, err / (20.0 * mesh.h * mesh.h * k * k));
        }
        for (std::size_t i = 1; i < errs.size(); ++i)
            min_order = std::min(min_order, std::log2(errs[i - 1] / errs[i]));
        r.checks.push_back(report("k=" + std::to_string(k) + " error at n=128", errs.back()));
    }
    r.checks.push_back(le("max error / (20 h^2 k^2)", worst_ratio, 1.0));
    r.checks.push_back(ge("min observed h-order", min_order, 1.9));
}

PhysParams oracle_params()
{
    PhysParams pp = unit_params();
    pp.c0 = 0.1;
    pp.delta1 = 0.5;
    return pp;
}

InitialSpec oracle_initial(const Mesh& mesh)
{
    InitialSpec spec;
    spec.p0 = project_function(mesh, phi(1), Space::PressureZeroMean);
    spec.u0 = project_function(mesh, psi(1, 0.3), Space::Displacement);
    return spec;
}

void criterion_oracle(CriterionResult& r, const VerifyOptions&)
{
    const PhysParams pp = oracle_params();
    const auto ops = make_ops(1, 128, pp);
    const OperatorBundle& b = ops->bundle();
    const Mesh& mesh = *b.mesh;
    const InitialSpec init = oracle_initial(mesh);
    const double T = 0.1;

    std::vector<State> finals;
    double oracle_err = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const Trajectory tr = run(ops, init, SourceSpec::none(), dt, T, 0.5);
        finals.push_back(tr.back());
        if (dt == 1e-3) {
            double num = 0.0, den = 0.0;
            for (const State& s : tr.states) {
                const auto [pe, ue] = oracle_field_solution(mesh, pp, {OracleMode{1, 1.0, 0.3, {}}}, s.t);
                num = std::max(num, std::hypot(mnorm(b.Mp, s.p - pe.coeffs), mnorm(b.Mu, s.u - ue.coeffs)));
                den = std::max(den, std::hypot(mnorm(b.Mp, pe.coeffs), mnorm(b.Mu, ue.coeffs)));
            }
            oracle_err = num / den;
        }
    }
    const double order = std::log2(final_state_distance(b, finals[0], finals[1]) /
                                   final_state_distance(b, finals[1], finals[2]));
    r.checks.push_back(le("relative L2 error in (p, u) vs modal oracle", oracle_err, 1e-3));
    r.checks.push_back(ge("dt-order (self-convergence 4e-3, 2e-3, 1e-3)", order, 1.9));
}

SourceSpec smooth_sources()
{
    VectorFn f = [](const Point& x) { return std::array<double, 2>{std::sin(2.0 * pi * x[0]), 0.0}; };
    ScalarFn s = [](const Point& x) { return std::numbers::sqrt2 * std::cos(pi * x[0]); };
    return SourceSpec::separable(f, ExpPoly{1.0, 0, -1.0}, s, ExpPoly{1.0, 1, 0.0}, "sin(2 pi x) e^-t; cos(pi x) t");
}

void criterion_cross_formulation(CriterionResult& r, const VerifyOptions&)
{
    VectorFn f = [](const Point& x) { return std::array<double, 2>{std::sin(pi * x[0]), 0.0}; };
    ScalarFn s = [](const Point& x) { return std::numbers::sqrt2 * std::cos(2.0 * pi * x[0]); };
    const SourceSpec src = SourceSpec::separable(f, ExpPoly{1.0, 1, 0.0}, s, ExpPoly{1.0, 0, -1.0}, "linear F");
    for (double c0 : {0.0, 1.0}) {
        PhysParams pp = unit_params();
        pp.c0 = c0;
        pp.delta1 = 0.5;
        pp.delta2 = pp.alpha * pp.delta1;
        const auto ops = make_ops(1, 64, pp);
        const Mesh& mesh = *ops->bundle().mesh;
        InitialSpec init;
        init.p0 = project_function(mesh, phi(1), Space::PressureZeroMean);
        init.u0 = project_function(mesh, psi(1, 0.2), Space::Displacement);
        const double dt = 0.01, T = 0.2;
        const Trajectory full = run(ops, init, src, dt, T, 0.5);
        ReducedInitial rinit;
        rinit.p0 = init.p0->coeffs;
        const Trajectory red = solve_reduced_biot(ops, rinit, src, dt, T, 0.5);
        r.checks.push_back(
            le("c0=" + fmt(c0) + " full vs reduced pressure", trajectory_distance(ops->bundle(), full, red, false), 1e-9));
    }
}

struct IdentityCase {
    std::string label;
    PhysParams params;
    bool consistent_u;
    bool with_sources;
    std::vector<Identity> ids;
};

void criterion_identities(CriterionResult& r, const VerifyOptions&)
{
    PhysParams visco = unit_params();
    visco.c0 = 1.0;
    visco.delta1 = 0.5;
    PhysParams incomp = unit_params();
    incomp.delta1 = 0.5;
    PhysParams adjusted = visco;
    adjusted.delta2 = adjusted.alpha * adjusted.delta1;

    const std::vector<IdentityCase> cases{
        {"c0=1 sources", visco, false, true, {Identity::EnergyEst, Identity::EED1C0}},
        {"c0=0 sources", incomp, true, true, {Identity::EnergyEst, Identity::EED1C0}},
        {"c0=0 free", incomp, true, false, {Identity::FirstOne, Identity::SecondOne, Identity::ThirdOne}},
        {"adjusted sources", adjusted, false, true, {Identity::Finest}},
    };
    const std::vector<double> dts{2.5e-3, 1.25e-3, 6.25e-4};
    const double T = 0.4;
    for (const auto& c : cases) {
        const auto ops = make_ops(1, 32, c.params);
        const Mesh& mesh = *ops->bundle().mesh;
        const SourceSpec src = c.with_sources ? smooth_sources() : SourceSpec::none();
        InitialSpec init;
        init.p0 = project_function(mesh, [](const Point& x) { return phi(1)(x) + 0.5 * phi(3)(x); },
                                   Space::PressureZeroMean);
        init.u0 = c.consistent_u ? FieldVec::displacement(consistent_displacement(*ops, init.p0->coeffs, src))
                                 : project_function(mesh, psi(1, 0.3), Space::Displacement);
        IdentityOptions iopt;
        iopt.poincare_korn = poincare_korn_constant(*ops);
        std::vector<std::vector<double>> rel(c.ids.size());
        for (double dt : dts) {
            const Trajectory tr = run(ops, init, src, dt, T, 0.5);
            for (std::size_t j = 0; j < c.ids.size(); ++j) {
                const IdentitySeries s = identity_residual(*ops, tr, src, c.ids[j], iopt);
                if (s.inequality)
                    rel[j].push_back(s.max_value() / s.scale);
                else
                    rel[j].push_back(s.max_abs() / s.scale);
            }
        }
        for (std::size_t j = 0; j < c.ids.size(); ++j) {
            const std::string name = to_string(c.ids[j]) + " (" + c.label + ")";
            if (c.ids[j] == Identity::ThirdOne) {
                r.checks.push_back(le(name + " max relative slack", *std::max_element(rel[j].begin(), rel[j].end()),
                                      1e-10));
            } else {
                r.checks.push_back(report(name + " relative residual at dt=6.25e-4", rel[j].back()));
                r.checks.push_back(within(name + " dt-order", loglog_slope(dts, rel[j]), 1.8, 2.2));
            }
        }
    }
}

void criterion_spectrum(CriterionResult& r, const VerifyOptions&)
{
    double worst_abscissa = -std::numeric_limits<double>::infinity();
    double worst_mismatch = 0.0;
    for (double c0 : {0.1, 1.0, 10.0}) {
        for (double d1 : {0.1, 1.0, 10.0}) {
            PhysParams pp = unit_params();
            pp.c0 = c0;
            pp.delta1 = d1;
            const auto ops = make_ops(1, 64, pp);
            const GeneratorMatrix gen = build_first_order_generator(*ops);
            const SpectrumReport spec = spectrum_report(gen);
            worst_abscissa = std::max(worst_abscissa, spec.spectral_abscissa);

            const GeneratorModes modes = generator_modes(gen);
            Eigen::Index slow = 0;
            modes.values.real().maxCoeff(&slow);
            Vec y0 = modes.vectors.col(slow).real();
            if (y0.norm() < 1e-8 * modes.vectors.col(slow).norm())
                y0 = modes.vectors.col(slow).imag();
            const auto [p0, p1] = from_generator_coords(*ops, y0);
            const double rate = -spec.spectral_abscissa;
            const double T = 4.0 / rate;
            const int steps = 4000;
            const Trajectory tr = solve_strongly_damped_wave(ops, p0, p1, SourceSpec::none(), T / steps, T, 0.5);
            std::vector<double> y;
            for (const State& s : tr.states)
                y.push_back(y_norm(*ops, s.p, s.p_dot));
            const DecayFit fit = fit_decay_rate(tr.times(), y, 0.0, T, "Y-norm");
            worst_mismatch = std::max(worst_mismatch, std::abs(fit.gamma_fit - rate) / rate);
        }
    }
    r.checks.push_back(lt("max spectral abscissa over the (c0, delta1) grid", worst_abscissa, 0.0));
    r.checks.push_back(le("max |gamma_fit + abscissa| / |abscissa|", worst_mismatch, 0.05));
}

void criterion_ode_decay(CriterionResult& r, const VerifyOptions&)
{
    PhysParams pp = unit_params();
    pp.delta1 = 0.5;
    const auto ops = make_ops(1, 128, pp);
    const Mesh& mesh = *ops->bundle().mesh;
    InitialSpec init;
    init.p0 = project_function(mesh, [](const Point& x) { return phi(1)(x) + 0.5 * phi(3)(x); },
                               Space::PressureZeroMean);
    init.u0 = FieldVec::displacement(consistent_displacement(*ops, init.p0->coeffs, SourceSpec::none()));
    const double T = 3.0;
    const Trajectory tr = run(ops, init, SourceSpec::none(), 0.01, T, 0.5);
    const double cp = poincare_korn_constant(*ops);
    const std::vector<double> E = gronwall_energy(*ops, tr, cp);
    double worst_rise = 0.0;
    for (std::size_t i = 1; i < E.size(); ++i)
        worst_rise = std::max(worst_rise, (E[i] - E[i - 1]) / E[0]);
    const DecayFit fit = fit_decay_rate(tr.times(), E, 0.0, T, "gronwall energy");
    r.checks.push_back(le("max relative increase of E between steps", worst_rise, 1e-12));
    r.checks.push_back(ge("gamma_fit - gamma_bound", fit.gamma_fit - gamma_bound(pp, cp), 0.0));
    r.checks.push_back(report("gamma_fit", fit.gamma_fit));
}

void criterion_poincare(CriterionResult& r, const VerifyOptions&)
{
    const PhysParams pp = unit_params();
    const auto ops = make_ops(1, 128, pp);
    const double cp = poincare_korn_constant(*ops);
    const double exact = 1.0 / (pp.elastic_modulus() * pi * pi);
    r.checks.push_back(report("C_P", cp));
    r.checks.push_back(le("relative deviation from 1/((lambda+2mu) pi^2)", std::abs(cp - exact) / exact, 0.02));
}

Vec broadband_d0(const Mesh& mesh, std::uint64_t seed, int kmax)
{
    std::mt19937_64 rng(seed);
    std::vector<double> amp(kmax + 1, 0.0);
    for (int k = 1; k <= kmax; ++k)
        amp[k] = ((rng() >> 63) ? 1.0 : -1.0) / std::sqrt(static_cast<double>(k));
    return project_function(
               mesh,
               [&](const Point& x) {
                   double v = 0.0;
                   for (int k = 1; k <= kmax; ++k)
                       v += amp[k] * std::numbers::sqrt2 * std::cos(k * pi * x[0]);
                   return v;
               },
               Space::PressureZeroMean)
        .coeffs;
}

void criterion_smoothing(CriterionResult& r, const VerifyOptions&)
{
    const auto ops = make_ops(1, 256, unit_params());
    const Vec d0 = broadband_d0(*ops->bundle().mesh, 7, 64);
    std::vector<double> Ts;
    for (int i = 0; i <= 6; ++i)
        Ts.push_back(std::pow(10.0, -4.0 + 0.25 * i));
    const SmoothingReport rep = smoothing_rate_check(ops, d0, Ts);
    r.checks.push_back(within("log-log slope of |Ap(T)|", rep.slope, -1.2, -0.8));
    r.checks.push_back(finite("sup_T T |Ap(T)| / |d0|", rep.sup_ratio));
}

void criterion_secondary(CriterionResult& r, const VerifyOptions&)
{
    ScalarFn s = [](const Point& x) { return std::numbers::sqrt2 * std::cos(2.0 * pi * x[0]); };
    const SourceSpec src = SourceSpec::separable(nullptr, ExpPoly{}, s, ExpPoly{1.0, 0, 0.0}, "S steady");
    for (double c0 : {0.0, 1.0}) {
        PhysParams pp = unit_params();
        pp.c0 = c0;
        pp.lambda_star = 1.0;
        const auto ops = make_ops(1, 64, pp);
        const Mesh& mesh = *ops->bundle().mesh;
        InitialSpec init;
        init.p0 = project_function(mesh, phi(1), Space::PressureZeroMean);
        init.u0 = project_function(mesh, psi(1, 0.2), Space::Displacement);
        const Trajectory tr = run(ops, init, src, 0.01, 0.5, 0.5);
        const double l2ap = elliptic_time_norm(*ops, tr);
        if (c0 == 0.0) {
            const EnergyLedger led = energy_ledger(*ops, tr, src);
            double min_increment = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < led.rows.size(); ++i)
                min_increment = std::min(min_increment, led.rows[i].consolidation - led.rows[i - 1].consolidation);
            r.checks.push_back(report("c0=0 consolidation dissipation at T", led.rows.back().consolidation));
            r.checks.push_back(lt("c0=0 -(smallest consolidation increment)", -min_increment, 0.0));
            r.checks.push_back(finite("c0=0 |Ap| in L2(0,T;L2)", l2ap));
        } else {
            r.checks.push_back(report("c0=1 |Ap| in L2(0,T;L2)", l2ap));
        }
    }
}

void criterion_variation_of_constants(CriterionResult& r, const VerifyOptions&)
{
    const PhysParams pp = oracle_params();
    const auto ops = make_ops(1, 64, pp);
    const OperatorBundle& b = ops->bundle();
    const InitialSpec init = oracle_initial(*b.mesh);
    const SourceSpec src = smooth_sources();
    std::vector<double> dts{1e-3, 5e-4, 2.5e-4};
    std::vector<double> errs;
    for (double dt : dts) {
        const Trajectory tr = run(ops, init, src, dt, 0.1, 0.5);
        std::vector<Vec> ps;
        for (const State& s : tr.states)
            ps.push_back(s.p);
        const auto rec = recover_u_variation_of_constants(*ops, tr.times(), ps, tr.states.front().u, src);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            num = std::max(num, mnorm(b.Mu, rec[i] - tr.states[i].u));
            den = std::max(den, mnorm(b.Mu, tr.states[i].u));
        }
        errs.push_back(num / den);
    }
    r.checks.push_back(le("relative error at dt=1e-3", errs.front(), 5e-3));
    r.checks.push_back(ge("dt-order", loglog_slope(dts, errs), 1.9));
}

struct Cell {
    std::string label;
    PhysParams params;
    std::vector<unsigned> bases; ///< bit masks over {p0, u0, d0, p1}
    unsigned checkable;          ///< fields that may accompany a basis
};

constexpr unsigned kP0 = 1, kU0 = 2, kD0 = 4, kP1 = 8;

std::string mask_name(unsigned m)
{
    std::string s;
    const char* names[] = {"p0", "u0", "d0", "p1"};
    for (int i = 0; i < 4; ++i)
        if (m & (1u << i))
            s += (s.empty() ? "" : "+") + std::string(names[i]);
    return s;
}

void criterion_initial_table(CriterionResult& r, const VerifyOptions&)
{
    auto visco = [](double c0, double d2) {
        PhysParams pp = unit_params();
        pp.c0 = c0;
        pp.delta1 = 0.5;
        pp.delta2 = d2;
        return pp;
    };
    PhysParams classical0 = unit_params();
    PhysParams classical1 = unit_params();
    classical1.c0 = 1.0;
    const std::vector<Cell> cells{
        {"visco c0=0 delta2=0", visco(0.0, 0.0), {kP0 | kU0}, kD0},
        {"visco c0=1 delta2=0", visco(1.0, 0.0), {kP0 | kU0, kP0 | kP1}, kP0 | kU0 | kD0 | kP1},
        {"visco c0=0 delta2=alpha delta1", visco(0.0, 0.5), {kP0 | kU0}, kD0},
        {"visco c0=1 delta2=alpha delta1", visco(1.0, 0.5), {kP0 | kU0}, kD0},
        {"classical c0=0", classical0, {kP0, kD0}, kP0 | kU0 | kD0},
        {"classical c0=1", classical1, {kP0, kD0}, kP0 | kU0 | kD0},
    };
    int wrong = 0;
    double worst_roundtrip = 0.0;
    std::string first_wrong;
    for (const Cell& cell : cells) {
        const auto ops = make_ops(1, 32, cell.params);
        const Mesh& mesh = *ops->bundle().mesh;
        Vec p0 = project_function(mesh, phi(1), Space::PressureZeroMean).coeffs;
        if (cell.params.c0 == 0.0 && cell.params.delta1 == 0.0)
            p0 = ops->solve_calB(ops->apply_calB(p0)); // representable pressure
        InitialSpec ref_spec;
        ref_spec.p0 = FieldVec::pressure(p0);
        if (cell.params.delta1 > 0.0)
            ref_spec.u0 = FieldVec::displacement(cell.params.c0 == 0.0 && cell.params.delta2 == 0.0
                                                     ? consistent_displacement(*ops, p0, SourceSpec::none())
                                                     : project_function(mesh, psi(1, 0.3), Space::Displacement).coeffs);
        const InitialState ref = resolve_initial_state(*ops, ref_spec, SourceSpec::none());
        const InitialSpec full = as_spec(ref);
        const InitialState again = resolve_initial_state(*ops, full, SourceSpec::none());
        worst_roundtrip = std::max(worst_roundtrip, state_difference(ref, again));

        std::optional<FieldVec> pool[4] = {full.p0, full.u0, full.d0, ref.has_p_dot() ? full.p1 : std::nullopt};
        if (!pool[3])
            pool[3] = FieldVec::pressure(p0);
        for (unsigned m = 1; m < 16; ++m) {
            bool expect = false;
            for (unsigned basis : cell.bases)
                expect = expect || ((m & basis) == basis && (m & ~(basis | cell.checkable)) == 0);
            InitialSpec spec;
            if (m & kP0)
                spec.p0 = pool[0];
            if (m & kU0)
                spec.u0 = pool[1];
            if (m & kD0)
                spec.d0 = pool[2];
            if (m & kP1)
                spec.p1 = pool[3];
            bool accepted = false;
            bool right_error = true;
            try {
                resolve_initial_state(*ops, spec, SourceSpec::none());
                accepted = true;
            } catch (const Error& e) {
                right_error = e.code() == ErrorCode::Underspecified;
            }
            if (accepted != expect || (!accepted && !right_error)) {
                ++wrong;
                if (first_wrong.empty())
                    first_wrong = cell.label + ": " + mask_name(m);
            }
        }
    }
    r.checks.push_back(le("misclassified combinations", wrong, 0.0));
    r.checks.push_back(le("idempotence round-trip difference", worst_roundtrip, 1e-12));
    if (!first_wrong.empty())
        r.error = "first misclassified: " + first_wrong;
}

struct Entry {
    int id;
    const char* name;
    double budget;
    void (*fn)(CriterionResult&, const VerifyOptions&);
};

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> entries{
        {1, "operator properties", 10.0, criterion_operator_properties},
        {2, "1D B identity", 10.0, criterion_b_identity},
        {3, "oracle equivalence", 30.0, criterion_oracle},
        {4, "cross-formulation equivalence", 20.0, criterion_cross_formulation},
        {5, "energy identities", 60.0, criterion_identities},
        {6, "semigroup spectrum", 60.0, criterion_spectrum},
        {7, "ODE-case decay", 30.0, criterion_ode_decay},
        {8, "Poincare-Korn constant", 5.0, criterion_poincare},
        {9, "parabolic smoothing", 60.0, criterion_smoothing},
        {10, "secondary consolidation", 30.0, criterion_secondary},
        {11, "variation-of-constants recovery", 30.0, criterion_variation_of_constants},
        {12, "initial-condition table", 5.0, criterion_initial_table},
    };
    return entries;
}

std::string describe(const Check& c)
{
    std::string s = c.label + " = " + fmt(c.value);
    if (c.relation == "in")
        s += " (in [" + fmt(c.threshold) + ", " + fmt(c.upper) + "])";
    else if (c.relation == "finite" || c.relation == "report")
        s += c.relation == "finite" ? " (finite)" : "";
    else
        s += " (" + c.relation + " " + fmt(c.threshold) + ")";
    return s;
}

} // namespace

bool CriterionResult::passed() const
{
    if (!error.empty() && checks.empty())
        return false;
    for (const Check& c : checks)
        if (!c.passed)
            return false;
    return !checks.empty();
}

std::string CriterionResult::summary_line() const
{
    std::ostringstream os;
    os << (passed() ? "[PASS] " : "[FAIL] ") << id << " " << name << " (" << fmt(seconds) << " s)";
    for (const Check& c : checks)
        os << (c.passed ? "; " : "; FAILED ") << describe(c);
    if (!error.empty())
        os << "; " << error;
    return os.str();
}

nlohmann::json CriterionResult::to_json() const
{
    nlohmann::json j;
    j["id"] = id;
    j["name"] = name;
    j["passed"] = passed();
    j["seconds"] = seconds;
    j["budget_seconds"] = budget_seconds;
    if (!error.empty())
        j["error"] = error;
    j["checks"] = nlohmann::json::array();
    for (const Check& c : checks) {
        nlohmann::json cj{{"label", c.label}, {"relation", c.relation}, {"passed", c.passed}};
        cj["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(fmt(c.value));
        if (c.relation != "report" && c.relation != "finite")
            cj["threshold"] = c.threshold;
        if (c.relation == "in")
            cj["upper"] = c.upper;
        j["checks"].push_back(cj);
    }
    return j;
}

std::vector<int> criteria_for(SuiteLevel level)
{
    if (level == SuiteLevel::Quick)
        return {1, 2, 3, 8, 12};
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
}

CriterionResult run_criterion(int id, const VerifyOptions& opts)
{
    for (const Entry& e : registry()) {
        if (e.id != id)
            continue;
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        r.budget_seconds = e.budget;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.fn(r, opts);
        } catch (const std::exception& ex) {
            r.error = ex.what();
            r.checks.push_back(Check{"completed without error", 0.0, 1.0, ">=", 0.0, false});
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.checks.push_back(le("runtime seconds", r.seconds, r.budget_seconds));
        return r;
    }
    throw Error(ErrorCode::ConfigError, "no acceptance criterion with id " + std::to_string(id));
}

bool SuiteReport::passed() const
{
    for (const auto& r : results)
        if (!r.passed())
            return false;
    return true;
}

nlohmann::json SuiteReport::to_json() const
{
    nlohmann::json j;
    j["level"] = level == SuiteLevel::Quick ? "quick" : "full";
    j["passed"] = passed();
    j["criteria"] = nlohmann::json::array();
    for (const auto& r : results)
        j["criteria"].push_back(r.to_json());
    return j;
}

SuiteReport verify_suite(SuiteLevel level, const VerifyOptions& opts,
                         const std::function<void(const CriterionResult&)>& on_result)
{
    SuiteReport rep;
    rep.level = level;
    for (int id : criteria_for(level)) {
        rep.results.push_back(run_criterion(id, opts));
        if (on_result)
            on_result(rep.results.back());
    }
    return rep;
}

} // namespace pvlab::cli

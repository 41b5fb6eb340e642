#include "test_support.hpp"

namespace pvlab::test {
namespace {

double rel_p(const OperatorBundle& b, const Vec& x, const Vec& ref)
{
    return mnorm(b.Mp, x - ref) / mnorm(b.Mp, ref);
}

TEST(ReducedBiot, ZeroDataStaysZero)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    ReducedInitial init;
    init.p0 = Vec::Zero(ops->bundle().np());
    const Trajectory tr = solve_reduced_biot(ops, init, SourceSpec::none(), 0.01, 0.1, 0.5);
    EXPECT_EQ(tr.back().p.norm(), 0.0);
}

TEST(ReducedBiot, MatchesFullClassicalScheme)
{
    const auto ops = make_ops(1, 32, PhysParams{});
    const Mesh& mesh = *ops->bundle().mesh;
    InitialSpec init;
    init.p0 = project_function(mesh, [](const Point& x) { return phi(1)(x) - 0.4 * phi(4)(x); },
                               Space::PressureZeroMean);
    ScalarFn s = phi(2);
    const SourceSpec src = SourceSpec::separable(nullptr, ExpPoly{}, s, ExpPoly{1.0, 1, 0.0}, "S");
    const Trajectory full = run(ops, init, src, 0.01, 0.2, 0.5);
    ReducedInitial rinit;
    rinit.p0 = init.p0->coeffs;
    const Trajectory red = solve_reduced_biot(ops, rinit, src, 0.01, 0.2, 0.5);
    EXPECT_LT(rel_p(ops->bundle(), red.back().p, full.back().p), 1e-9);
}

TEST(ReducedBiot, FluidContentStartMatchesFullScheme)
{
    const auto ops = make_ops(1, 32, PhysParams{});
    InitialSpec init;
    init.d0 = project_function(*ops->bundle().mesh, phi(2), Space::PressureZeroMean);
    const Trajectory full = run(ops, init, SourceSpec::none(), 0.01, 0.1, 0.5);
    ReducedInitial rinit;
    rinit.d0 = init.d0->coeffs;
    const Trajectory red = solve_reduced_biot(ops, rinit, SourceSpec::none(), 0.01, 0.1, 0.5);
    EXPECT_LT(rel_p(ops->bundle(), red.back().p, full.back().p), 1e-9);
}

TEST(ReducedBiot, SlowestModeDecaysAtModalRate)
{
    const PhysParams pp;
    const double rate = pp.elastic_modulus() * pp.kappa * pi * pi / (pp.alpha * pp.alpha);
    EXPECT_NEAR(-modal_matrix(1, pp).M(0, 0), rate, 1e-12 * rate);
    const auto ops = make_ops(1, 128, pp);
    ReducedInitial init;
    init.p0 = pressure(*ops->bundle().mesh, phi(1));
    const double T = 0.05;
    const Trajectory tr = solve_reduced_biot(ops, init, SourceSpec::none(), 5e-4, T, 0.5);
    const double measured = -std::log(mnorm(ops->bundle().Mp, tr.back().p) / mnorm(ops->bundle().Mp, *init.p0)) / T;
    EXPECT_NEAR(measured, rate, 0.01 * rate);
}

TEST(Generator, SpectrumIsStableAndConjugateSymmetric)
{
    const auto ops = make_ops(1, 32, visco(0.1, 0.5));
    const SpectrumReport rep = spectrum_report(build_first_order_generator(*ops));
    EXPECT_LT(rep.spectral_abscissa, 0.0);
    for (const auto& z : rep.eigenvalues) {
        EXPECT_LT(z.real(), 0.0);
        const bool has_conjugate = std::any_of(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                                               [&](const auto& w) { return std::abs(w - std::conj(z)) < 1e-8 * std::abs(z); });
        EXPECT_TRUE(has_conjugate);
    }
}

TEST(Generator, SingleModeMatchesQuadraticFormula)
{
    for (double c0 : {0.1, 1.0}) {
        const PhysParams pp = visco(c0, 0.5);
        const Mat W = modal_wave_generator(1, pp);
        const double tr = W.trace(), det = W.determinant();
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
        const std::complex<double> slow = 0.5 * (tr + disc);

        const auto ops = make_ops(1, 128, pp);
        const GeneratorModes modes = generator_modes(build_first_order_generator(*ops));
        Eigen::Index i = 0;
        modes.values.real().maxCoeff(&i);
        EXPECT_LT(std::abs(modes.values[i] - slow), 0.01 * std::abs(slow)) << "c0=" << c0;
    }
}

TEST(Generator, CoordinatesRoundTrip)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    const Vec p = random_pressure(*ops, 3);
    const Vec q = random_pressure(*ops, 4);
    const auto [p2, q2] = from_generator_coords(*ops, to_generator_coords(*ops, p, q));
    EXPECT_LT((p2 - p).norm(), 1e-10 * p.norm());
    EXPECT_LT((q2 - q).norm(), 1e-10 * q.norm());
}

TEST(DampedWave, MatchesExactPropagator)
{
    const auto ops = make_ops(1, 32, visco(1.0, 0.5));
    const Mesh& mesh = *ops->bundle().mesh;
    const Vec p0 = pressure(mesh, [](const Point& x) { return phi(1)(x) + 0.3 * phi(2)(x); });
    const Vec p1 = pressure(mesh, phi(1, -0.5));
    const double T = 0.2;
    const Trajectory tr = solve_strongly_damped_wave(ops, p0, p1, SourceSpec::none(), 1e-3, T, 0.5);
    const GeneratorMatrix gen = build_first_order_generator(*ops);
    const auto [pe, qe] = from_generator_coords(*ops, propagate_generator(gen, to_generator_coords(*ops, p0, p1), T));
    EXPECT_LT(rel_p(ops->bundle(), tr.back().p, pe), 1e-4);
}

TEST(QForm, SlowestRateMatchesModalSymbol)
{
    const PhysParams pp = visco(0.0, 0.5);
    const auto ops = make_ops(1, 64, pp);
    const ModalSymbols sym = modal_symbols(1, pp);
    const double r1 = sym.a / (pp.alpha * pp.alpha * sym.b + pp.delta1 * sym.a);
    const Vec r = r_spectrum(*ops);
    EXPECT_NEAR(r[0], r1, 0.01 * r1);
    EXPECT_NEAR(-modal_matrix(1, pp).M(0, 0), r1, 1e-12 * r1);
}

TEST(QForm, ThetaSchemeConvergesToExactPropagator)
{
    const auto ops = make_ops(1, 32, visco(0.0, 0.5));
    const Vec p0 = pressure(*ops->bundle().mesh, [](const Point& x) { return phi(1)(x) + 0.5 * phi(3)(x); });
    const double T = 0.2;
    const Trajectory exact = solve_ode_q_form(ops, p0, SourceSpec::none(), 0.02, T, 0.5, QFormMethod::ExactPropagator);
    std::vector<double> errs;
    for (double dt : {0.02, 0.01, 0.005}) {
        const Trajectory tr = solve_ode_q_form(ops, p0, SourceSpec::none(), dt, T, 0.5);
        errs.push_back(rel_p(ops->bundle(), tr.back().p, exact.back().p));
    }
    EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.15);
    EXPECT_NEAR(std::log2(errs[1] / errs[2]), 2.0, 0.15);
}

TEST(QForm, AgreesWithFullScheme)
{
    const auto ops = make_ops(1, 32, visco(0.0, 0.5));
    InitialSpec init;
    init.p0 = project_function(*ops->bundle().mesh, phi(1), Space::PressureZeroMean);
    init.u0 = FieldVec::displacement(consistent_displacement(*ops, init.p0->coeffs, SourceSpec::none()));
    const Trajectory full = run(ops, init, SourceSpec::none(), 0.01, 0.2, 0.5);
    const Trajectory q = solve_ode_q_form(ops, init.p0->coeffs, SourceSpec::none(), 0.01, 0.2, 0.5);
    EXPECT_LT(rel_p(ops->bundle(), q.back().p, full.back().p), 1e-8);
}

} // namespace
} // namespace pvlab::test

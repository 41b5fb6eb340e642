#include "test_support.hpp"

namespace pvlab::test {
namespace {

InitialSpec mode_one_data(const Mesh& mesh, double u_amp = 0.3)
{
    InitialSpec s;
    s.p0 = project_function(mesh, phi(1), Space::PressureZeroMean);
    s.u0 = project_function(mesh, psi(1, u_amp), Space::Displacement);
    return s;
}

TEST(InitialState, ClassicalZeroContentGivesZeroState)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    InitialSpec s;
    s.d0 = FieldVec::pressure(Vec::Zero(ops->bundle().np()));
    const InitialState st = resolve_initial_state(*ops, s, SourceSpec::none());
    EXPECT_EQ(st.p.norm(), 0.0);
    EXPECT_EQ(st.u.norm(), 0.0);
    EXPECT_EQ(st.basis, "d0");
}

TEST(InitialState, ViscoRateMatchesDenseElasticSolve)
{
    const auto ops = make_ops(1, 24, visco(1.0, 0.5));
    const OperatorBundle& b = ops->bundle();
    const InitialSpec s = mode_one_data(*b.mesh);
    const InitialState st = resolve_initial_state(*ops, s, SourceSpec::none());
    const Vec w = Mat(b.Ke).ldlt().solve(-(b.G * s.p0->coeffs));
    const Vec expected = (w - s.u0->coeffs) / 0.5;
    EXPECT_LT((st.u_dot - expected).norm(), 1e-10 * expected.norm());
    EXPECT_EQ(st.u_dot_origin, Origin::Derived);
    EXPECT_TRUE(st.has_p_dot());
}

TEST(InitialState, AdjustedContentPressureOnlyVersusFull)
{
    const auto ops = make_ops(1, 16, visco(0.0, 0.5, 0.5));
    InitialSpec s;
    s.p0 = project_function(*ops->bundle().mesh, phi(1), Space::PressureZeroMean);
    const InitialState st = resolve_initial_state(*ops, s, SourceSpec::none(), ResolveMode::PressureOnly);
    EXPECT_FALSE(st.has_u());
    EXPECT_TRUE(st.has_zeta());
    EXPECT_THROW_CODE(resolve_initial_state(*ops, s, SourceSpec::none()), ErrorCode::Underspecified);
}

TEST(InitialState, RejectsNonZeroMeanPressure)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    InitialSpec s;
    s.p0 = FieldVec::pressure(Vec::Ones(ops->bundle().np()));
    EXPECT_THROW_CODE(resolve_initial_state(*ops, s, SourceSpec::none()), ErrorCode::NonZeroMean);
}

TEST(InitialState, InconsistentExtraFieldRejected)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    InitialSpec s = mode_one_data(*ops->bundle().mesh);
    s.d0 = project_function(*ops->bundle().mesh, phi(2), Space::PressureZeroMean);
    EXPECT_THROW_CODE(resolve_initial_state(*ops, s, SourceSpec::none()), ErrorCode::OverspecifiedInconsistent);
}

TEST(InitialState, WrongSpaceRejected)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    InitialSpec s = mode_one_data(*ops->bundle().mesh);
    s.u0->space = Space::PressureZeroMean;
    EXPECT_THROW_CODE(resolve_initial_state(*ops, s, SourceSpec::none()), ErrorCode::SpaceMismatch);
}

TEST(InitialState, PressurePairRecoversDisplacement)
{
    const auto ops = make_ops(1, 24, visco(1.0, 0.5));
    const InitialState ref = resolve_initial_state(*ops, mode_one_data(*ops->bundle().mesh), SourceSpec::none());
    InitialSpec pair;
    pair.p0 = FieldVec::pressure(ref.p);
    pair.p1 = FieldVec::pressure(ref.p_dot);
    const InitialState st = resolve_initial_state(*ops, pair, SourceSpec::none());
    EXPECT_EQ(st.basis, "p0+p1");
    // the minimal-energy closure recovers u up to the part of u_t invisible to the divergence
    EXPECT_LT(mnorm(ops->bundle().Mp, st.p_dot - ref.p_dot), 1e-9 * mnorm(ops->bundle().Mp, ref.p_dot));
}

TEST(InitialState, RoundTripIsIdempotent)
{
    const auto ops = make_ops(2, 6, visco(1.0, 0.5));
    const Mesh& mesh = *ops->bundle().mesh;
    InitialSpec s;
    s.p0 = project_function(mesh, [](const Point& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1]); },
                            Space::PressureZeroMean);
    s.u0 = project_function(mesh, [](const Point& x) {
        return std::array<double, 2>{std::sin(pi * x[0]) * std::sin(pi * x[1]), 0.0};
    });
    const InitialState a = resolve_initial_state(*ops, s, SourceSpec::none());
    const InitialState b = resolve_initial_state(*ops, as_spec(a), SourceSpec::none());
    EXPECT_LE(state_difference(a, b), 1e-12);
}

TEST(InitialState, ConsistentDisplacementRemovesMassDefect)
{
    const auto ops = make_ops(1, 32, visco(0.0, 0.5));
    InitialSpec s = mode_one_data(*ops->bundle().mesh);
    EXPECT_GT(resolve_initial_state(*ops, s, SourceSpec::none()).mass_defect, 1e-3);
    s.u0 = FieldVec::displacement(consistent_displacement(*ops, s.p0->coeffs, SourceSpec::none()));
    EXPECT_LT(resolve_initial_state(*ops, s, SourceSpec::none()).mass_defect, 1e-10);
}

TEST(StepFull, ZeroStateStaysZero)
{
    const auto ops = make_ops(1, 16, visco(0.1, 0.5));
    State s;
    s.p = Vec::Zero(ops->bundle().np());
    s.u = Vec::Zero(ops->bundle().nu());
    s.u_dot = s.u;
    const State next = step_full(ops, s, 0.01, 0.5, SourceSpec::none());
    EXPECT_EQ(next.p.norm() + next.u.norm(), 0.0);
    EXPECT_DOUBLE_EQ(next.t, 0.01);
}

TEST(Run, FrozenDenseOracleCrankNicolson)
{
    // tests/oracles/frozen_values.py: visco_n16_*
    const auto ops = make_ops(1, 16, visco(0.1, 0.5));
    const OperatorBundle& b = ops->bundle();
    const Trajectory tr = run(ops, mode_one_data(*b.mesh), SourceSpec::none(), 0.01, 0.1, 0.5);
    EXPECT_NEAR(mnorm(b.Mp, tr.back().p), 0.15096743847160679, 1e-10);
    EXPECT_NEAR(mnorm(b.Mu, tr.back().u), 0.24936237796476776, 1e-10);
    EXPECT_NEAR(tr.back().p[0], 0.21418722539497045, 1e-10);
}

TEST(Run, FrozenDenseOracleBackwardEuler)
{
    const auto ops = make_ops(1, 16, visco(0.1, 0.5));
    const OperatorBundle& b = ops->bundle();
    const Trajectory tr = run(ops, mode_one_data(*b.mesh), SourceSpec::none(), 0.01, 0.1, 1.0);
    EXPECT_NEAR(mnorm(b.Mp, tr.back().p), 0.15182166074171607, 1e-10);
    EXPECT_NEAR(mnorm(b.Mu, tr.back().u), 0.24979443908624616, 1e-10);
}

TEST(Run, MatchesModalOracle)
{
    const PhysParams pp = visco(0.1, 0.5);
    const auto ops = make_ops(1, 128, pp);
    const OperatorBundle& b = ops->bundle();
    const Trajectory tr = run(ops, mode_one_data(*b.mesh), SourceSpec::none(), 1e-3, 0.1, 0.5);
    const auto [pe, ue] = oracle_field_solution(*b.mesh, pp, {OracleMode{1, 1.0, 0.3, {}}}, 0.1);
    const double err = std::hypot(mnorm(b.Mp, tr.back().p - pe.coeffs), mnorm(b.Mu, tr.back().u - ue.coeffs)) /
                       std::hypot(mnorm(b.Mp, pe.coeffs), mnorm(b.Mu, ue.coeffs));
    EXPECT_LE(err, 1e-3);
}

TEST(Run, ForcedModalOracle)
{
    const PhysParams pp = visco(0.5, 0.5);
    const auto ops = make_ops(1, 128, pp);
    const OperatorBundle& b = ops->bundle();
    OracleMode m{2, 0.5, -0.2, {}};
    m.forcing.F_amp = 1.0;
    m.forcing.F_profile = ExpPoly{1.0, 0, -2.0};
    m.forcing.S_amp = 0.7;
    m.forcing.S_profile = ExpPoly{1.0, 1, 0.0};
    const SourceSpec src = oracle_sources({m});
    InitialSpec init;
    init.p0 = project_function(*b.mesh, phi(2, 0.5), Space::PressureZeroMean);
    init.u0 = project_function(*b.mesh, psi(2, -0.2), Space::Displacement);
    const Trajectory tr = run(ops, init, src, 1e-3, 0.2, 0.5);
    const auto [pe, ue] = oracle_field_solution(*b.mesh, pp, {m}, 0.2);
    const double err = std::hypot(mnorm(b.Mp, tr.back().p - pe.coeffs), mnorm(b.Mu, tr.back().u - ue.coeffs)) /
                       std::hypot(mnorm(b.Mp, pe.coeffs), mnorm(b.Mu, ue.coeffs));
    EXPECT_LE(err, 2e-3);
}

TEST(Run, ManufacturedClassicalBiotSecondOrder)
{
    // p* = e^{-t} sqrt2 cos(pi x), u* = beta e^{-t} sqrt2 sin(pi x) with beta = 1/2
    const double beta = 0.5;
    VectorFn f = [&](const Point& x) {
        return std::array<double, 2>{(3.0 * pi * pi * beta - pi) * sqrt2 * std::sin(pi * x[0]), 0.0};
    };
    ScalarFn s = [&](const Point& x) { return (pi * pi - beta * pi) * sqrt2 * std::cos(pi * x[0]); };
    const SourceSpec src = SourceSpec::separable(f, ExpPoly{1.0, 0, -1.0}, s, ExpPoly{1.0, 0, -1.0}, "mms");
    const double T = 0.5;
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        const auto ops = make_ops(1, n, PhysParams{});
        const OperatorBundle& b = ops->bundle();
        InitialSpec init;
        init.p0 = project_function(*b.mesh, phi(1), Space::PressureZeroMean);
        const Trajectory tr = run(ops, init, src, 0.4 / n, T, 0.5);
        const Vec pe = pressure(*b.mesh, phi(1, std::exp(-T)));
        const Vec ue = displacement(*b.mesh, psi(1, beta * std::exp(-T)));
        errs.push_back(std::hypot(mnorm(b.Mp, tr.back().p - pe), mnorm(b.Mu, tr.back().u - ue)));
    }
    EXPECT_GE(std::log2(errs[0] / errs[1]), 1.8);
    EXPECT_GE(std::log2(errs[1] / errs[2]), 1.9);
}

TEST(Run, ZeroHorizonReturnsInitialState)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    const InitialSpec init = mode_one_data(*ops->bundle().mesh);
    const Trajectory tr = run(ops, init, SourceSpec::none(), 0.01, 0.0, 0.5);
    ASSERT_EQ(tr.states.size(), 1u);
    const InitialState st = resolve_initial_state(*ops, init, SourceSpec::none());
    EXPECT_EQ((tr.states[0].p - st.p).norm(), 0.0);
    EXPECT_EQ((tr.states[0].u - st.u).norm(), 0.0);
}

TEST(Run, Linearity)
{
    const auto ops = make_ops(1, 24, visco(1.0, 0.5));
    const Mesh& mesh = *ops->bundle().mesh;
    ScalarFn s = phi(2);
    const SourceSpec src = SourceSpec::separable(nullptr, ExpPoly{}, s, ExpPoly{1.0, 0, -1.0}, "S");
    const InitialSpec one = mode_one_data(mesh);
    InitialSpec two = one;
    two.p0->coeffs *= 2.0;
    two.u0->coeffs *= 2.0;
    const Trajectory a = run(ops, one, src, 0.01, 0.2, 0.5);
    const Trajectory b = run(ops, two, src.scaled(2.0), 0.01, 0.2, 0.5);
    EXPECT_LT((b.back().p - 2.0 * a.back().p).norm(), 1e-10 * b.back().p.norm());
    EXPECT_LT((b.back().u - 2.0 * a.back().u).norm(), 1e-10 * b.back().u.norm());
}

TEST(Run, TimeShiftOfAutonomousProblem)
{
    const auto ops = make_ops(1, 24, visco(1.0, 0.5));
    const Trajectory whole = run(ops, mode_one_data(*ops->bundle().mesh), SourceSpec::none(), 0.01, 0.2, 0.5);
    State mid = whole.states[10];
    const Trajectory tail = run_from_state(ops, mid, SourceSpec::none(), 0.01, 10, 0.5);
    EXPECT_LT((tail.back().p - whole.back().p).norm(), 1e-12 * whole.back().p.norm());
    EXPECT_LT((tail.back().u - whole.back().u).norm(), 1e-12 * whole.back().u.norm());
}

TEST(Run, FirstStepPolicy)
{
    {
        const auto ops = make_ops(1, 16, PhysParams{});
        InitialSpec s;
        s.d0 = project_function(*ops->bundle().mesh, phi(1), Space::PressureZeroMean);
        EXPECT_TRUE(run(ops, s, SourceSpec::none(), 0.01, 0.05, 0.5).scheme.first_step_backward_euler);
    }
    {
        const auto ops = make_ops(1, 16, visco(0.0, 0.5));
        InitialSpec s = mode_one_data(*ops->bundle().mesh);
        EXPECT_TRUE(run(ops, s, SourceSpec::none(), 0.01, 0.05, 0.5).scheme.first_step_backward_euler);
        s.u0 = FieldVec::displacement(consistent_displacement(*ops, s.p0->coeffs, SourceSpec::none()));
        EXPECT_FALSE(run(ops, s, SourceSpec::none(), 0.01, 0.05, 0.5).scheme.first_step_backward_euler);
    }
    {
        const auto ops = make_ops(1, 16, visco(1.0, 0.5));
        const Trajectory tr = run(ops, mode_one_data(*ops->bundle().mesh), SourceSpec::none(), 0.01, 0.05, 0.5);
        EXPECT_FALSE(tr.scheme.first_step_backward_euler);
        EXPECT_EQ(tr.scheme.rate_rule, RateRule::Trapezoid);
    }
}

TEST(Run, StepCountMustDivideHorizon)
{
    EXPECT_EQ(step_count(0.01, 0.1), 10);
    EXPECT_THROW_CODE(step_count(0.03, 0.1), ErrorCode::InvalidParams);
}

TEST(Run, SecondaryConsolidationTwoDimensional)
{
    PhysParams pp;
    pp.c0 = 1.0;
    pp.lambda_star = 1.0;
    const auto ops = make_ops(2, 6, pp);
    const Mesh& mesh = *ops->bundle().mesh;
    InitialSpec s;
    s.p0 = project_function(mesh, [](const Point& x) { return std::cos(pi * x[0]); }, Space::PressureZeroMean);
    s.u0 = FieldVec::displacement(Vec::Zero(ops->bundle().nu()));
    const Trajectory tr = run(ops, s, SourceSpec::none(), 0.01, 0.1, 0.5);
    EXPECT_EQ(tr.regime.kind, RegimeKind::SecondaryConsolidation);
    EXPECT_EQ(tr.scheme.rate_rule, RateRule::Backward);
    EXPECT_LT(mnorm(ops->bundle().Mp, tr.back().p), mnorm(ops->bundle().Mp, s.p0->coeffs));
}

TEST(VariationOfConstants, PureDecay)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    const Vec u0 = displacement(*ops->bundle().mesh, psi(1));
    std::vector<double> t;
    std::vector<Vec> ps;
    for (int i = 0; i <= 10; ++i) {
        t.push_back(0.05 * i);
        ps.push_back(Vec::Zero(ops->bundle().np()));
    }
    const auto u = recover_u_variation_of_constants(*ops, t, ps, u0, SourceSpec::none());
    EXPECT_LT((u.back() - std::exp(-0.5 / 0.5) * u0).norm(), 1e-14 * u0.norm());
}

TEST(VariationOfConstants, ConstantForcingClosedForm)
{
    const auto ops = make_ops(1, 16, visco(1.0, 0.5));
    const OperatorBundle& b = ops->bundle();
    const Vec p = pressure(*b.mesh, phi(1));
    std::vector<double> t;
    std::vector<Vec> ps;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(0.01 * i);
        ps.push_back(p);
    }
    const auto u = recover_u_variation_of_constants(*ops, t, ps, Vec::Zero(b.nu()), SourceSpec::none());
    const Vec target = ops->apply_Einv(-(b.G * p)); // delta1 Q
    const Vec exact = (1.0 - std::exp(-0.2 / 0.5)) * target;
    EXPECT_LT((u.back() - exact).norm(), 1e-4 * exact.norm());
}

} // namespace
} // namespace pvlab::test

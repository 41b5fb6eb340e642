#include "test_support.hpp"

namespace pvlab::test {
namespace {

TEST(ApplyEinv, ZeroLoad)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    EXPECT_EQ(ops->apply_Einv(Vec::Zero(ops->bundle().nu())).norm(), 0.0);
}

TEST(ApplyEinv, SineLoadMatchesAnalyticSolution)
{
    const auto ops = make_ops(1, 64, PhysParams{});
    const OperatorBundle& b = ops->bundle();
    const Vec s = displacement(*b.mesh, [](const Point& x) { return std::sin(pi * x[0]); });
    const Vec w = ops->apply_Einv(b.Mu * s);
    const Vec exact = s / (3.0 * pi * pi);
    const double h = b.mesh->h;
    EXPECT_LE(mnorm(b.Mu, w - exact) / mnorm(b.Mu, exact), 10.0 * h * h);
    EXPECT_LE((b.Ke * w - b.Mu * s).norm(), 1e-10 * (b.Mu * s).norm());
}

TEST(ApplyEinv, TwoDimensionalResidual)
{
    const auto ops = make_ops(2, 8, PhysParams{});
    const Vec load = Vec::LinSpaced(ops->bundle().nu(), -1.0, 2.0);
    EXPECT_LE((ops->bundle().Ke * ops->apply_Einv(load) - load).norm(), 1e-10 * load.norm());
}

TEST(ApplyB, ZeroPressure)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    EXPECT_EQ(ops->apply_B(Vec::Zero(ops->bundle().np())).norm(), 0.0);
}

TEST(ApplyB, CosineModesScaleByInverseModulus)
{
    const auto ops = make_ops(1, 128, PhysParams{});
    const OperatorBundle& b = ops->bundle();
    const double h = b.mesh->h;
    for (int k : {1, 2, 4}) {
        const Vec p = pressure(*b.mesh, phi(k));
        const double err = mnorm(b.Mp, ops->apply_B(p) - p / 3.0) / mnorm(b.Mp, p);
        EXPECT_LE(err, 20.0 * h * h * k * k) << "k = " << k;
    }
}

TEST(ApplyB, FrozenDenseOracleValue)
{
    // tests/oracles/frozen_values.py: b_identity_err_n32_k1
    const auto ops = make_ops(1, 32, PhysParams{});
    const OperatorBundle& b = ops->bundle();
    const Vec p = pressure(*b.mesh, phi(1));
    const double err = mnorm(b.Mp, ops->apply_B(p) - p / 3.0) / mnorm(b.Mp, p);
    EXPECT_NEAR(err, 0.0002679452614356082, 1e-10 * 0.0002679452614356082);
}

TEST(ApplyB, SelfAdjointOnRandomPressures)
{
    for (int dim : {1, 2}) {
        const auto ops = make_ops(dim, dim == 1 ? 40 : 8, PhysParams{});
        const SpMat& Mp = ops->bundle().Mp;
        const Vec p = random_pressure(*ops, 1), q = random_pressure(*ops, 2);
        const double lhs = q.dot(Mp * ops->apply_B(p));
        const double rhs = p.dot(Mp * ops->apply_B(q));
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs)) << "dim " << dim;
        EXPECT_GE(p.dot(ops->apply_B_dual(p)), -1e-14);
    }
}

TEST(ApplyCalB, CompressibleWithoutCouplingIsIdentity)
{
    PhysParams pp;
    pp.c0 = 1.0;
    pp.alpha = 0.0;
    const auto ops = make_ops(1, 16, pp);
    const Vec p = random_pressure(*ops, 3);
    EXPECT_LT((ops->apply_calB(p) - p).norm(), 1e-12 * p.norm());
}

TEST(ApplyCalB, IncompressibleMatchesOneDimensionalIdentity)
{
    const auto ops = make_ops(1, 128, PhysParams{});
    const OperatorBundle& b = ops->bundle();
    const Vec p = pressure(*b.mesh, phi(1));
    EXPECT_LE(mnorm(b.Mp, ops->apply_calB(p) - p / 3.0) / mnorm(b.Mp, p), 20.0 * b.mesh->h * b.mesh->h);
}

TEST(SolveCalB, CompressibleRandomData)
{
    const auto ops = make_ops(2, 10, visco(1.0, 0.0));
    const Vec d = random_pressure(*ops, 4);
    CalBSolveInfo info;
    const Vec x = ops->solve_calB(d, &info);
    EXPECT_LE(mnorm(ops->bundle().Mp, ops->apply_calB(x) - d) / mnorm(ops->bundle().Mp, d), 1e-9);
    EXPECT_NEAR(info.unrepresentable_fraction, 0.0, 1e-12);
}

TEST(SolveCalB, IncompressibleRepresentableData)
{
    for (auto dense : {false, true}) {
        SolverConfig cfg;
        cfg.dense_threshold = dense ? 512 : 0;
        const auto ops = make_ops(1, 64, PhysParams{}, cfg);
        const Vec d = ops->apply_B(random_pressure(*ops, 5));
        CalBSolveInfo info;
        const Vec x = ops->solve_calB(d, &info);
        EXPECT_EQ(info.dense, dense);
        EXPECT_LE(mnorm(ops->bundle().Mp, ops->apply_calB(x) - d) / mnorm(ops->bundle().Mp, d), 1e-9);
        EXPECT_LT(info.unrepresentable_fraction, 1e-8);
    }
}

TEST(SolveCalB, IncompressibleRoughDataReportsUnrepresentablePart)
{
    const auto ops = make_ops(1, 32, PhysParams{});
    CalBSolveInfo info;
    ops->solve_calB(random_pressure(*ops, 6), &info);
    EXPECT_GT(info.unrepresentable_fraction, 1e-6);
    EXPECT_LT(info.unrepresentable_fraction, 1.0);
}

TEST(DampingD, ZeroAndABoundedness)
{
    const auto ops = make_ops(1, 48, visco(0.5, 0.5));
    const OperatorBundle& b = ops->bundle();
    EXPECT_EQ(ops->apply_damping_D(Vec::Zero(b.np())).norm(), 0.0);
    const double cp_a = 1.0 / (pi * pi); // Poincare constant of A on zero-mean fields
    for (std::uint64_t s = 10; s < 15; ++s) {
        const Vec p = random_pressure(*ops, s);
        const double ratio = p.dot(ops->apply_damping_D(p)) / p.dot(b.Ap * p);
        EXPECT_GE(ratio, 1.0);
        EXPECT_LE(ratio, 1.0 + (0.5 + 1.0 / 3.0) / 0.5 * cp_a * 1.01);
    }
}

TEST(DampingD, RequiresViscoelasticity)
{
    const auto ops = make_ops(1, 8, PhysParams{});
    EXPECT_THROW_CODE(ops->apply_damping_D(Vec::Zero(ops->bundle().np())), ErrorCode::InvalidRegime);
}

TEST(DampingD, ApproachesAAsCouplingVanishes)
{
    const Vec base = [] {
        const auto ops = make_ops(1, 16, visco(0.0, 0.5));
        return random_pressure(*ops, 20);
    }();
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1e-1, 1e-2, 1e-3}) {
        PhysParams pp = visco(0.0, 0.5);
        pp.alpha = alpha;
        const auto ops = make_ops(1, 16, pp);
        const double gap = (ops->apply_damping_D(base) - ops->bundle().Ap * base).norm();
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(ApplyR, CosineSymbol)
{
    const PhysParams pp = visco(0.0, 0.5);
    const auto ops = make_ops(1, 128, pp);
    const OperatorBundle& b = ops->bundle();
    const double h = b.mesh->h;
    for (int k : {1, 2, 4}) {
        const double a = std::pow(k * pi, 2);
        const double symbol = a / (1.0 / 3.0 + 0.5 * a);
        const Vec q = pressure(*b.mesh, phi(k));
        const double err = mnorm(b.Mp, ops->apply_R(q) - symbol * q) / (symbol * mnorm(b.Mp, q));
        EXPECT_LE(err, 20.0 * h * h * k * k) << "k = " << k;
    }
    EXPECT_EQ(ops->apply_R(Vec::Zero(b.np())).norm(), 0.0);
}

TEST(ApplyR, ZerothOrderBound)
{
    const auto ops = make_ops(1, 32, visco(0.0, 0.5));
    const Vec r = r_spectrum(*ops);
    EXPECT_LE(r.maxCoeff(), (1.0 / 0.5) * (1.0 + 1e-10));
    EXPECT_GT(r.minCoeff(), 0.0);
    for (std::uint64_t s = 30; s < 33; ++s) {
        const Vec q = random_pressure(*ops, s);
        EXPECT_LE(mnorm(ops->bundle().Mp, ops->apply_R(q)), 2.0 * mnorm(ops->bundle().Mp, q) * (1 + 1e-8));
    }
}

TEST(ZeroMeanBasis, OrthonormalAndDiagonalizing)
{
    const auto ops = make_ops(2, 6, PhysParams{});
    const ZeroMeanBasis& zb = ops->zero_mean_basis();
    const Mat& Q = zb.Q;
    const Mat I = Q.transpose() * ops->bundle().Mp * Q;
    EXPECT_LT((I - Mat::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff(), 1e-10);
    const Mat A = Q.transpose() * ops->bundle().Ap * Q;
    EXPECT_LT((A - Mat(zb.lambda.asDiagonal())).cwiseAbs().maxCoeff(), 1e-9 * zb.lambda.maxCoeff());
    EXPECT_EQ(Q.cols(), ops->bundle().np() - 1);
}

TEST(ZeroMeanBasis, UnavailableAboveThreshold)
{
    SolverConfig cfg;
    cfg.dense_threshold = 10;
    const auto ops = make_ops(1, 32, PhysParams{}, cfg);
    EXPECT_THROW_CODE(ops->zero_mean_basis(), ErrorCode::DenseModeUnavailable);
}

TEST(OperatorProperties, SymmetricMonotoneWithCheckerboardKernelIn1D)
{
    const auto ops = make_ops(1, 64, PhysParams{});
    const PropertyReport r = ops->check_operator_properties();
    EXPECT_LE(r.b_symmetry_defect, 1e-10);
    EXPECT_GE(r.b_min_ritz, -1e-10);
    const double h = ops->bundle().mesh->h;
    EXPECT_LE(std::abs(r.b_max_ritz - 1.0 / 3.0), 20.0 * h * h);
    // P1-P1 pairs leave the alternating pressure mode invisible to the divergence
    EXPECT_GE(r.b_numerical_kernel, 1);
    EXPECT_GE(r.coercivity_constant, 1.0 - 1e-10);
}

TEST(OperatorProperties, TwoDimensional)
{
    SolverConfig cfg;
    cfg.dense_threshold = 1024;
    const auto ops = make_ops(2, 12, visco(1.0, 0.0), cfg);
    const PropertyReport r = ops->check_operator_properties();
    EXPECT_LE(r.b_symmetry_defect, 1e-10);
    EXPECT_GE(r.b_min_ritz, -1e-10);
    EXPECT_GE(r.calb_min_ritz, 1.0 - 1e-10);
    EXPECT_TRUE(std::isfinite(r.calb_condition));
}

TEST(OperatorProperties, FaultInjectionBreaksSymmetry)
{
    const auto ops = make_ops(1, 16, PhysParams{});
    EXPECT_GT(ops->check_operator_properties(1e-6).b_symmetry_defect, 1e-10);
}

TEST(PressurePreconditioner, InvertsShiftedOperator)
{
    const auto ops = make_ops(1, 24, PhysParams{});
    const OperatorBundle& b = ops->bundle();
    const LinearMap P = ops->pressure_preconditioner(2.0, 0.5);
    const Vec x = random_pressure(*ops, 40);
    const Vec r = 2.0 * (b.Mp * x) + 0.5 * (b.Ap * x);
    EXPECT_LT((P(r) - x).norm(), 1e-10 * x.norm());
}

TEST(Krylov, PcgSolvesSpdSystem)
{
    Mat A = Mat::Random(20, 20);
    A = A * A.transpose() + 20.0 * Mat::Identity(20, 20);
    const Vec rhs = Vec::LinSpaced(20, 1.0, 2.0);
    CgOptions o;
    o.rel_tol = 1e-12;
    const CgResult r = pcg([&](const Vec& v) { return Vec(A * v); }, rhs, [](const Vec& v) { return v; }, o);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((A * r.x - rhs).norm(), 1e-11 * rhs.norm());
}

} // namespace
} // namespace pvlab::test

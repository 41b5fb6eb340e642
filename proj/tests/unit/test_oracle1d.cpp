#include "test_support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace pvlab::test {
namespace {

TEST(ModalOracle, InitialTimeReturnsInitialState)
{
    const ModalSystem ms = modal_matrix(2, visco(0.5, 0.5));
    const Vec x0 = modal_state(ms, 0.7, -0.2);
    const auto [P, U] = modal_outputs(ms, exact_modal_solution(ms, x0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(P, 0.7);
    EXPECT_DOUBLE_EQ(U, -0.2);
}

TEST(ModalOracle, ClassicalDecay)
{
    const PhysParams pp;
    const ModalSystem ms = modal_matrix(1, pp);
    ASSERT_EQ(ms.dim(), 1);
    const double t = 0.03;
    const auto [P, U] = modal_outputs(ms, exact_modal_solution(ms, modal_state(ms, 1.0, 0.0), t), t);
    EXPECT_NEAR(P, std::exp(-3.0 * pi * pi * t), 1e-14);
    EXPECT_NEAR(U, pp.alpha * modal_symbols(1, pp).g / modal_symbols(1, pp).e * P, 1e-14);
}

TEST(ModalOracle, ExponentialMatchesMatrixFunctions)
{
    std::vector<Mat> cases;
    Mat jordan(2, 2);
    jordan << -1.0, 1.0, -1.0, -3.0; // double root -2, not diagonalizable
    cases.push_back(jordan);
    Mat complex_pair(2, 2);
    complex_pair << -1.0, 4.0, -5.0, -2.0;
    cases.push_back(complex_pair);
    Mat real_pair(2, 2);
    real_pair << -10.0, 1.0, 2.0, -0.5;
    cases.push_back(real_pair);
    Mat scalar(1, 1);
    scalar << -3.5;
    cases.push_back(scalar);
    for (const Mat& M : cases) {
        for (double t : {0.0, 0.1, 1.3}) {
            const Mat ref = (M * t).exp();
            EXPECT_LT((modal_exponential(M, t) - ref).norm(), 1e-10 * std::max(1.0, ref.norm()));
        }
    }
}

TEST(ModalOracle, StateAndWaveFormsShareCharacteristicPolynomial)
{
    for (double c0 : {0.1, 1.0, 10.0}) {
        const PhysParams pp = visco(c0, 0.5);
        const ModalSystem ms = modal_matrix(3, pp);
        const Mat W = modal_wave_generator(3, pp);
        ASSERT_EQ(ms.dim(), 2);
        EXPECT_NEAR(ms.M.trace(), W.trace(), 1e-10 * std::abs(W.trace()));
        EXPECT_NEAR(ms.M.determinant(), W.determinant(), 1e-10 * std::abs(W.determinant()));
    }
}

TEST(ModalOracle, RightHandSideMatchesFiniteDifference)
{
    const PhysParams pp = visco(0.5, 0.5, 0.25);
    const ModalSystem ms = modal_matrix(1, pp);
    ModalForcing f;
    f.F_amp = 1.0;
    f.F_profile = ExpPoly{1.0, 1, -1.0};
    f.S_amp = 0.3;
    f.S_profile = ExpPoly{1.0, 0, -0.5};
    const Vec x0 = modal_state(ms, 1.0, 0.2);
    const double t = 0.4, h = 1e-5;
    const Vec deriv = (exact_modal_solution(ms, x0, t + h, f) - exact_modal_solution(ms, x0, t - h, f)) / (2.0 * h);
    const Vec rhs = modal_rhs(ms, exact_modal_solution(ms, x0, t, f), t, f);
    EXPECT_LT((deriv - rhs).norm(), 1e-7 * rhs.norm());
}

TEST(ModalOracle, SuperpositionIsLinear)
{
    const PhysParams pp = visco(0.1, 0.5);
    const auto mesh_ptr = build_mesh(1, 32);
    const Mesh& mesh = *mesh_ptr;
    const OracleMode a{1, 1.0, 0.3, {}};
    const OracleMode b{3, -0.5, 0.1, {}};
    const auto [pa, ua] = oracle_field_solution(mesh, pp, {a}, 0.05);
    const auto [pb, ub] = oracle_field_solution(mesh, pp, {b}, 0.05);
    const auto [pab, uab] = oracle_field_solution(mesh, pp, {a, b}, 0.05);
    EXPECT_LT((pab.coeffs - pa.coeffs - pb.coeffs).norm(), 1e-13);
    EXPECT_LT((uab.coeffs - ua.coeffs - ub.coeffs).norm(), 1e-13);
}

TEST(ModalOracle, EmptyModeListIsZero)
{
    const auto mesh_ptr = build_mesh(1, 8);
    const auto [p, u] = oracle_field_solution(*mesh_ptr, visco(0.1, 0.5), {}, 0.3);
    EXPECT_EQ(p.coeffs.norm() + u.coeffs.norm(), 0.0);
}

TEST(ModalOracle, RejectsInvalidMode)
{
    EXPECT_THROW_CODE(modal_matrix(0, PhysParams{}), ErrorCode::InvalidRegime);
}

} // namespace
} // namespace pvlab::test

#include "test_support.hpp"

namespace pvlab::test {
namespace {

TEST(ClassifyRegime, ZeroPatternIsClassicalIncompressible)
{
    const RegimeTag t = classify_regime(PhysParams{});
    EXPECT_EQ(t.kind, RegimeKind::ClassicalBiot);
    EXPECT_EQ(t.compressibility, Compressibility::Incompressible);
}

TEST(ClassifyRegime, ViscoStandardCompressible)
{
    const RegimeTag t = classify_regime(visco(1.0, 0.5));
    EXPECT_EQ(t.kind, RegimeKind::ViscoStandardContent);
    EXPECT_EQ(t.compressibility, Compressibility::Compressible);
}

TEST(ClassifyRegime, ViscoAdjustedIncompressible)
{
    const RegimeTag t = classify_regime(visco(0.0, 0.5, 0.5));
    EXPECT_EQ(t.kind, RegimeKind::ViscoAdjustedContent);
    EXPECT_EQ(t.compressibility, Compressibility::Incompressible);
}

TEST(ClassifyRegime, SecondaryConsolidation)
{
    PhysParams pp;
    pp.lambda_star = 1.0;
    EXPECT_EQ(classify_regime(pp).kind, RegimeKind::SecondaryConsolidation);
}

TEST(ValidateParams, AdjustedContentWithExactIdentityIsValid)
{
    const ValidationReport r = validate_params(visco(0.0, 0.5, 0.5));
    EXPECT_TRUE(r.valid());
}

TEST(ValidateParams, MismatchedDelta2CitesIdentity)
{
    const ValidationReport r = validate_params(visco(0.0, 0.5, 0.4));
    ASSERT_FALSE(r.valid());
    EXPECT_NE(r.violations.front().find("delta2 = alpha*delta1"), std::string::npos);
}

TEST(ValidateParams, ZeroShearModulusRejected)
{
    PhysParams pp;
    pp.mu = 0.0;
    const ValidationReport r = validate_params(pp);
    ASSERT_FALSE(r.valid());
    EXPECT_EQ(r.violations.front(), "mu > 0 required");
    EXPECT_THROW_CODE(require_valid(pp), ErrorCode::InvalidParams);
}

TEST(ValidateParams, CreepWithViscoelasticityRejected)
{
    PhysParams pp = visco(0.0, 0.5);
    pp.lambda_star = 1.0;
    EXPECT_FALSE(validate_params(pp).valid());
}

TEST(ValidateParams, IncompressibleClassicalWithAlphaBelowOneWarns)
{
    PhysParams pp;
    pp.alpha = 0.8;
    const ValidationReport r = validate_params(pp);
    EXPECT_TRUE(r.valid());
    EXPECT_FALSE(r.warnings.empty());
}

TEST(ValidateParams, NonFiniteRejected)
{
    PhysParams pp;
    pp.kappa = std::nan("");
    EXPECT_FALSE(validate_params(pp).valid());
}

} // namespace
} // namespace pvlab::test

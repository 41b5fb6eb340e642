#include "pvlab/model_config.hpp"

#include "pvlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace pvlab {

std::string to_string(RegimeKind kind)
{
    switch (kind) {
    case RegimeKind::ClassicalBiot: return "ClassicalBiot";
    case RegimeKind::ViscoStandardContent: return "ViscoStandardContent";
    case RegimeKind::ViscoAdjustedContent: return "ViscoAdjustedContent";
    case RegimeKind::SecondaryConsolidation: return "SecondaryConsolidation";
    }
    return "Unknown";
}

std::string to_string(Compressibility c)
{
    return c == Compressibility::Compressible ? "Compressible" : "Incompressible";
}

std::string to_string(const RegimeTag& tag)
{
    return to_string(tag.kind) + "/" + to_string(tag.compressibility);
}

RegimeTag classify_regime(const PhysParams& p)
{
    if (p.delta2 > 0.0 && p.delta1 <= 0.0)
        throw Error(ErrorCode::InvalidParams, "delta2 > 0 requires delta1 > 0");
    if (p.lambda_star > 0.0 && p.delta1 > 0.0)
        throw Error(ErrorCode::InvalidParams, "lambda_star > 0 requires delta1 = 0");

    RegimeTag tag;
    tag.compressibility = p.c0 > 0.0 ? Compressibility::Compressible : Compressibility::Incompressible;
    if (p.lambda_star > 0.0)
        tag.kind = RegimeKind::SecondaryConsolidation;
    else if (p.delta1 > 0.0)
        tag.kind = p.delta2 > 0.0 ? RegimeKind::ViscoAdjustedContent : RegimeKind::ViscoStandardContent;
    else
        tag.kind = RegimeKind::ClassicalBiot;
    return tag;
}

ValidationReport validate_params(const PhysParams& p)
{
    ValidationReport r;
    auto finite = [&](double v, const char* name) {
        if (!std::isfinite(v))
            r.violations.push_back(std::string(name) + " must be finite");
    };
    finite(p.lambda_e, "lambda_e");
    finite(p.mu, "mu");
    finite(p.alpha, "alpha");
    finite(p.c0, "c0");
    finite(p.kappa, "kappa");
    finite(p.delta1, "delta1");
    finite(p.delta2, "delta2");
    finite(p.lambda_star, "lambda_star");

    if (!(p.mu > 0.0)) r.violations.push_back("mu > 0 required");
    if (!(p.lambda_e > 0.0)) r.violations.push_back("lambda_e > 0 required");
    if (!(p.alpha > 0.0)) r.violations.push_back("alpha > 0 required");
    if (!(p.kappa > 0.0)) r.violations.push_back("kappa > 0 required");
    if (p.c0 < 0.0) r.violations.push_back("c0 >= 0 required");
    if (p.delta1 < 0.0) r.violations.push_back("delta1 >= 0 required");
    if (p.delta2 < 0.0) r.violations.push_back("delta2 >= 0 required");
    if (p.lambda_star < 0.0) r.violations.push_back("lambda_star >= 0 required");

    if (p.delta2 > 0.0) {
        if (!(p.delta1 > 0.0)) {
            r.violations.push_back("delta2 > 0 requires delta1 > 0");
        } else if (std::abs(p.delta2 - p.alpha * p.delta1) > 1e-12 * p.alpha * p.delta1) {
            std::ostringstream os;
            os.precision(17);
            os << "delta2 != alpha*delta1 (delta2 = " << p.delta2 << ", alpha*delta1 = " << p.alpha * p.delta1
               << "); the adjusted fluid content requires delta2 = alpha*delta1";
            r.violations.push_back(os.str());
        }
    }
    if (p.lambda_star > 0.0 && p.delta1 > 0.0)
        r.violations.push_back("lambda_star > 0 requires delta1 = 0");

    if (p.c0 == 0.0 && p.delta1 == 0.0 && p.alpha != 1.0)
        r.warnings.push_back("c0 = 0 with delta1 = 0: incompressible constituents usually have alpha = 1");
    if (p.c0 == 0.0 && p.delta2 > 0.0)
        r.warnings.push_back("c0 = 0 with delta2 > 0 is admissible mathematically but physically questionable");
    return r;
}

void require_valid(const PhysParams& params)
{
    const ValidationReport r = validate_params(params);
    if (r.valid())
        return;
    std::string msg;
    for (const auto& v : r.violations) {
        if (!msg.empty())
            msg += "; ";
        msg += v;
    }
    throw Error(ErrorCode::InvalidParams, msg);
}

} // namespace pvlab

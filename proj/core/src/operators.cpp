#include "pvlab/operators.hpp"

#include "pvlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace pvlab {

struct Operators::Cache {
    std::once_flag once;
    std::exception_ptr failure;
    ZeroMeanBasis basis;
    Mat bhat_raw;
    Vec bhat_eval; ///< eigenvalues of Bhat, ascending
    Mat bhat_evec;
};

Operators::Operators(std::shared_ptr<const OperatorBundle> bundle, SolverConfig cfg)
    : bundle_(std::move(bundle)), cfg_(cfg), cache_(std::make_shared<Cache>())
{
    ke_solver_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(bundle_->Ke);
    if (ke_solver_->info() != Eigen::Success)
        throw Error(ErrorCode::SolveFailure, "elastic stiffness factorization failed");
    mp_solver_ = std::make_shared<Eigen::SimplicialLLT<SpMat>>(bundle_->Mp);
    if (mp_solver_->info() != Eigen::Success)
        throw Error(ErrorCode::SolveFailure, "pressure mass factorization failed");
}

Vec Operators::apply_Einv(const Vec& load) const
{
    if (load.size() != bundle_->nu())
        throw Error(ErrorCode::SpaceMismatch, "load is not a displacement dual vector");
    Vec w = ke_solver_->solve(load);
    const double lnorm = load.norm();
    if (lnorm > 0.0 && (bundle_->Ke * w - load).norm() > cfg_.inner_tol * lnorm)
        throw Error(ErrorCode::SolveFailure, "elastic solve residual above tolerance");
    return w;
}

Vec Operators::mass_solve(const Vec& dual) const
{
    return mp_solver_->solve(dual);
}

Vec Operators::project_primal(const Vec& p) const
{
    return pvlab::project_primal(p, bundle_->meanvec);
}

Vec Operators::project_dual(const Vec& r) const
{
    return pvlab::project_dual(r, bundle_->meanvec);
}

Vec Operators::apply_B_dual(const Vec& p) const
{
    const Vec g = bundle_->G * p;
    return -(bundle_->Ddiv * apply_Einv(g));
}

Vec Operators::apply_B(const Vec& p) const
{
    return project_primal(mass_solve(apply_B_dual(p)));
}

Vec Operators::apply_calB_dual(const Vec& p) const
{
    const PhysParams& pp = params();
    Vec r = pp.alpha * pp.alpha * apply_B_dual(p);
    if (pp.c0 != 0.0)
        r += pp.c0 * (bundle_->Mp * p);
    return r;
}

Vec Operators::apply_calB(const Vec& p) const
{
    return project_primal(mass_solve(apply_calB_dual(p)));
}

Vec Operators::apply_damping_D(const Vec& p) const
{
    const PhysParams& pp = params();
    if (!(pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "damping operator requires delta1 > 0");
    return bundle_->Ap * p + apply_calB_dual(p) / pp.delta1;
}

LinearMap Operators::pressure_preconditioner(double zeta, double eta) const
{
    zeta = std::max(zeta, 1e-8 * std::abs(eta));
    if (zeta <= 0.0)
        zeta = 1.0;
    SpMat M = zeta * bundle_->Mp + eta * bundle_->Ap;
    auto llt = std::make_shared<Eigen::SimplicialLLT<SpMat>>(M);
    if (llt->info() != Eigen::Success)
        throw Error(ErrorCode::SolveFailure, "preconditioner factorization failed");
    return [llt](const Vec& r) -> Vec { return llt->solve(r); };
}

Vec Operators::solve_q_map(const Vec& rhs_dual) const
{
    const PhysParams& pp = params();
    const double a2 = pp.alpha * pp.alpha;
    const double d1 = pp.delta1;
    auto op = [&](const Vec& x) -> Vec { return a2 * apply_B_dual(x) + d1 * (bundle_->Ap * x); };
    CgOptions o{cfg_.inner_tol, cfg_.max_iter, &bundle_->meanvec};
    const CgResult r = pcg(op, rhs_dual, pressure_preconditioner(a2 / pp.elastic_modulus(), d1), o);
    if (!r.converged)
        throw Error(ErrorCode::SolveFailure, "inner solve with alpha^2 B + delta1 A did not converge");
    return r.x;
}

Vec Operators::apply_R(const Vec& q) const
{
    const PhysParams& pp = params();
    if (!(pp.delta1 > 0.0) || pp.c0 != 0.0)
        throw Error(ErrorCode::InvalidRegime, "R is defined for c0 = 0 and delta1 > 0");
    const Vec x = solve_q_map(bundle_->Mp * q);
    return project_primal(mass_solve(bundle_->Ap * x));
}

const ZeroMeanBasis& Operators::zero_mean_basis() const
{
    if (!dense_available())
        throw Error(ErrorCode::DenseModeUnavailable,
                    "pressure dimension " + std::to_string(bundle_->np()) + " exceeds dense threshold " +
                        std::to_string(cfg_.dense_threshold));
    Cache& c = *cache_;
    std::call_once(c.once, [&] {
        try {
            const Mat Ap = Mat(bundle_->Ap);
            const Mat Mp = Mat(bundle_->Mp);
            Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(Ap, Mp);
            if (ges.info() != Eigen::Success)
                throw Error(ErrorCode::EigenFailure, "generalized eigensolve (Ap, Mp) failed");
            const int N = bundle_->np() - 1;
            c.basis.Q = ges.eigenvectors().rightCols(N);
            c.basis.lambda = ges.eigenvalues().tail(N);

            const Mat Y = bundle_->Ddiv.transpose() * c.basis.Q;
            const Mat Z = ke_solver_->solve(Y);
            c.bhat_raw = Y.transpose() * Z;
            c.basis.Bhat = 0.5 * (c.bhat_raw + c.bhat_raw.transpose());

            Eigen::SelfAdjointEigenSolver<Mat> es(c.basis.Bhat);
            if (es.info() != Eigen::Success)
                throw Error(ErrorCode::EigenFailure, "eigensolve of B failed");
            c.bhat_eval = es.eigenvalues();
            c.bhat_evec = es.eigenvectors();
        } catch (...) {
            c.failure = std::current_exception();
        }
    });
    if (c.failure)
        std::rethrow_exception(c.failure);
    return c.basis;
}

Vec Operators::solve_calB(const Vec& d, CalBSolveInfo* info) const
{
    return solve_calB_dual(bundle_->Mp * d, info);
}

Vec Operators::solve_calB_dual(const Vec& rhs, CalBSolveInfo* info) const
{
    const PhysParams& pp = params();
    return solve_shifted_B_dual(pp.c0, pp.alpha * pp.alpha, rhs, info);
}

Vec Operators::solve_shifted_B_dual(double c, double a, const Vec& rhs_in, CalBSolveInfo* info) const
{
    const Vec rhs = project_dual(rhs_in);
    CalBSolveInfo local;
    CalBSolveInfo& inf = info ? *info : local;
    inf = CalBSolveInfo{};
    if (rhs.norm() == 0.0)
        return Vec::Zero(rhs.size());

    if (dense_available()) {
        const ZeroMeanBasis& zb = zero_mean_basis();
        const Cache& ch = *cache_;
        const Vec chat = zb.Q.transpose() * rhs;
        const Vec coef = ch.bhat_evec.transpose() * chat;
        const Vec s = (c + a * ch.bhat_eval.array()).matrix();
        const double smax = s.cwiseAbs().maxCoeff();
        Vec y = Vec::Zero(coef.size());
        Vec kept = Vec::Zero(coef.size());
        double lost = 0.0;
        for (int i = 0; i < coef.size(); ++i) {
            if (s[i] > 1e-10 * smax) {
                y[i] = coef[i] / s[i];
                kept[i] = coef[i];
            } else {
                lost += coef[i] * coef[i];
            }
        }
        const Vec x = zb.Q * (ch.bhat_evec * y);
        const Vec chat_rep = ch.bhat_evec * kept;
        inf.dense = true;
        inf.unrepresentable_fraction = std::sqrt(lost) / chat.norm();
        Vec applied = a * apply_B_dual(x);
        if (c != 0.0)
            applied += c * (bundle_->Mp * x);
        const double rep_norm = chat_rep.norm();
        inf.rel_residual = rep_norm > 0.0 ? (zb.Q.transpose() * applied - chat_rep).norm() / rep_norm : 0.0;
        return x;
    }

    const PhysParams& pp = params();
    Vec target = rhs;
    if (c == 0.0) {
        // least-squares projection of the data onto range(Ddiv) in the Mp^{-1} metric
        auto normal = [&](const Vec& w) -> Vec { return bundle_->Ddiv.transpose() * mass_solve(bundle_->Ddiv * w); };
        auto prec = [&](const Vec& r) -> Vec { return pp.elastic_modulus() * apply_Einv(r); };
        CgOptions o{cfg_.inner_tol * 1e-2, cfg_.max_iter, nullptr};
        const CgResult pr = pcg(normal, bundle_->Ddiv.transpose() * mass_solve(rhs), prec, o);
        target = project_dual(bundle_->Ddiv * pr.x);
        const Vec lostv = rhs - target;
        inf.unrepresentable_fraction =
            std::sqrt(std::max(0.0, lostv.dot(mass_solve(lostv))) / rhs.dot(mass_solve(rhs)));
    }
    auto op = [&](const Vec& x) -> Vec {
        Vec r = a * apply_B_dual(x);
        if (c != 0.0)
            r += c * (bundle_->Mp * x);
        return r;
    };
    CgOptions o{cfg_.inner_tol, cfg_.max_iter, &bundle_->meanvec};
    const CgResult r = pcg(op, target, pressure_preconditioner(c + a / pp.elastic_modulus(), 0.0), o);
    inf.iterations = r.iterations;
    inf.rel_residual = r.rel_residual;
    if (!r.converged)
        throw Error(ErrorCode::SolveFailure,
                    "calB solve did not converge (relative residual " + std::to_string(r.rel_residual) + ")");
    return r.x;
}

PropertyReport Operators::check_operator_properties(double asymmetry_injection) const
{
    const ZeroMeanBasis& zb = zero_mean_basis();
    const PhysParams& pp = params();
    Mat B = cache_->bhat_raw;
    const int N = static_cast<int>(B.rows());
    const double bmax = B.cwiseAbs().maxCoeff();
    if (asymmetry_injection != 0.0) {
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                B(i, j) += asymmetry_injection * bmax * std::sin(1.0 + i + 2.0 * j);
    }

    PropertyReport rep;
    rep.b_symmetry_defect = (B - B.transpose()).cwiseAbs().maxCoeff() / bmax;

    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "eigensolve of B failed");
    const Vec ev = es.eigenvalues();
    rep.b_min_ritz = ev.minCoeff();
    rep.b_max_ritz = ev.maxCoeff();
    for (int i = 0; i < N; ++i)
        if (std::abs(ev[i]) < 1e-10 * rep.b_max_ritz)
            ++rep.b_numerical_kernel;

    const double a2 = pp.alpha * pp.alpha;
    const double cmin = pp.c0 + a2 * rep.b_min_ritz;
    const double cmax = pp.c0 + a2 * rep.b_max_ritz;
    rep.calb_min_ritz = cmin;
    rep.calb_condition = cmin > 1e-12 * cmax ? cmax / cmin : std::numeric_limits<double>::infinity();

    Eigen::BDCSVD<Mat> svd(B);
    rep.b_min_singular = svd.singularValues().minCoeff();

    const Vec isq = zb.lambda.cwiseSqrt().cwiseInverse();
    const Mat calb = pp.c0 * Mat::Identity(N, N) + a2 * zb.Bhat;
    const Mat scaled = isq.asDiagonal() * calb * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> cs(scaled, Eigen::EigenvaluesOnly);
    rep.coercivity_constant = 2.0 + cs.eigenvalues().minCoeff();
    return rep;
}

} // namespace pvlab

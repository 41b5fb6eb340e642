#include "pvlab/reductions.hpp"

#include "pvlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace pvlab {

namespace {

Vec coupling_of_load_rate(const Operators& ops, const SourceSpec& src, double t)
{
    if (!src.has_F())
        return Vec::Zero(ops.bundle().np());
    const Vec Ft = load_rate_vector(ops.bundle(), src, t);
    if (Ft.norm() == 0.0)
        return Vec::Zero(ops.bundle().np());
    return ops.params().alpha * (ops.bundle().Ddiv * ops.apply_Einv(Ft));
}

Vec solve_pressure_system(const Operators& ops, const LinearMap& op, const Vec& rhs, const LinearMap& prec,
                          double tol, const char* what)
{
    CgOptions o{tol, ops.config().max_iter, &ops.bundle().meanvec};
    const CgResult r = pcg(op, rhs, prec, o);
    if (!r.converged)
        throw Error(ErrorCode::SolveFailure, std::string(what) + " did not converge (relative residual " +
                                                 std::to_string(r.rel_residual) + ")");
    return r.x;
}

Trajectory pressure_trajectory(const Operators& ops, const SourceSpec& sources, double dt, double theta,
                               const std::string& method)
{
    Trajectory tr;
    tr.params = ops.params();
    tr.regime = classify_regime(ops.params());
    tr.scheme.method = method;
    tr.scheme.theta = theta;
    tr.scheme.dt = dt;
    tr.scheme.mesh_id = ops.bundle().mesh->id();
    tr.source_descriptor = sources.descriptor;
    return tr;
}

void require_theta(double theta)
{
    if (!(theta >= 0.5 && theta <= 1.0))
        throw Error(ErrorCode::InvalidParams, "theta must lie in [1/2, 1]");
}

} // namespace

Vec reduced_source_tilde(const Operators& ops, const SourceSpec& src, double t)
{
    return source_vector(ops.bundle(), src, t) - coupling_of_load_rate(ops, src, t);
}

Vec reduced_source_hat(const Operators& ops, const SourceSpec& src, double t)
{
    const double d1 = ops.params().delta1;
    return reduced_source_tilde(ops, src, t) / d1 + source_rate_vector(ops.bundle(), src, t);
}

Vec reduced_source_bar(const Operators& ops, const SourceSpec& src, double t)
{
    const double d1 = ops.params().delta1;
    return reduced_source_tilde(ops, src, t) + d1 * source_rate_vector(ops.bundle(), src, t);
}

Trajectory solve_reduced_biot(std::shared_ptr<const Operators> ops_ptr, const ReducedInitial& init,
                              const SourceSpec& sources, double dt, double T, double theta, ReducedOptions opts)
{
    const Operators& ops = *ops_ptr;
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    require_valid(pp);
    require_theta(theta);
    const int steps = step_count(dt, T);
    if (init.p0.has_value() == init.d0.has_value())
        throw Error(ErrorCode::Underspecified, "reduced solve needs exactly one of p0, d0");

    auto content_offset = [&](double t) -> Vec {
        if (!sources.has_F())
            return Vec::Zero(b.np());
        return pp.alpha * (b.Ddiv * ops.apply_Einv(load_vector(b, sources, t)));
    };

    Vec p;
    if (init.p0) {
        p = ops.project_primal(*init.p0);
    } else {
        p = ops.solve_calB_dual(b.Mp * *init.d0 - content_offset(0.0));
    }

    Trajectory tr = pressure_trajectory(ops, sources, dt, theta, "reduced-theta");
    const bool damp = opts.damp_first_step && init.d0.has_value() && theta < 1.0 && steps > 0;
    tr.scheme.first_step_backward_euler = damp;
    if (damp)
        tr.scheme.first_step_reason = "initial pressure recovered from fluid content only";

    auto make_state = [&](double t, const Vec& pressure) {
        State s;
        s.t = t;
        s.p = pressure;
        s.zeta = ops.project_primal(ops.mass_solve(ops.apply_calB_dual(pressure) + content_offset(t)));
        return s;
    };
    tr.states.push_back(make_state(0.0, p));

    const double b_el = 1.0 / pp.elastic_modulus();
    Vec s_prev = reduced_source_tilde(ops, sources, 0.0);
    for (int n = 0; n < steps; ++n) {
        const double th = (n == 0 && damp) ? 1.0 : theta;
        const double t1 = (n + 1) * dt;
        const Vec s_next = reduced_source_tilde(ops, sources, t1);
        auto op = [&](const Vec& x) -> Vec { return ops.apply_calB_dual(x) + (th * dt) * (b.Ap * x); };
        const Vec rhs = dt * (th * s_next + (1.0 - th) * s_prev) - dt * (b.Ap * p);
        const Vec inc = solve_pressure_system(
            ops, op, rhs, ops.pressure_preconditioner(pp.c0 + pp.alpha * pp.alpha * b_el, th * dt), opts.cg_tol,
            "reduced Biot step");
        p = ops.project_primal(p + inc);
        tr.states.push_back(make_state(t1, p));
        s_prev = s_next;
    }
    return tr;
}

GeneratorMatrix build_first_order_generator(const Operators& ops)
{
    const PhysParams& pp = ops.params();
    if (!(pp.c0 > 0.0 && pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "the first-order generator needs c0 > 0 and delta1 > 0");
    const ZeroMeanBasis& zb = ops.zero_mean_basis();
    const int N = static_cast<int>(zb.lambda.size());
    const Mat Lambda = zb.lambda.asDiagonal();
    const Mat D = Lambda + (pp.c0 * Mat::Identity(N, N) + pp.alpha * pp.alpha * zb.Bhat) / pp.delta1;

    GeneratorMatrix g;
    g.N = N;
    g.params = pp;
    g.A = Mat::Zero(2 * N, 2 * N);
    g.A.topRightCorner(N, N) = Mat::Identity(N, N);
    g.A.bottomLeftCorner(N, N) = -Lambda / (pp.delta1 * pp.c0);
    g.A.bottomRightCorner(N, N) = -D / pp.c0;
    return g;
}

GeneratorModes generator_modes(const GeneratorMatrix& gen)
{
    Eigen::EigenSolver<Mat> es(gen.A, true);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "generator eigensolve failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

SpectrumReport spectrum_report(const GeneratorMatrix& gen)
{
    Eigen::EigenSolver<Mat> es(gen.A, false);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "generator eigensolve failed");
    SpectrumReport rep;
    rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorCode::EigenFailure, "non-finite generator eigenvalue");
        rep.eigenvalues.push_back(z);
        rep.spectral_abscissa = std::max(rep.spectral_abscissa, z.real());
        const double ratio = z.real() != 0.0 ? std::abs(z.imag()) / std::abs(z.real())
                                             : (z.imag() != 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        rep.sector_ratio = std::max(rep.sector_ratio, ratio);
    }
    rep.min_real_gap = -rep.spectral_abscissa;
    return rep;
}

Vec to_generator_coords(const Operators& ops, const Vec& p, const Vec& p_t)
{
    const ZeroMeanBasis& zb = ops.zero_mean_basis();
    const int N = static_cast<int>(zb.lambda.size());
    Vec y(2 * N);
    y.head(N) = zb.Q.transpose() * (ops.bundle().Mp * p);
    y.tail(N) = zb.Q.transpose() * (ops.bundle().Mp * p_t);
    return y;
}

std::pair<Vec, Vec> from_generator_coords(const Operators& ops, const Vec& y)
{
    const ZeroMeanBasis& zb = ops.zero_mean_basis();
    const int N = static_cast<int>(zb.lambda.size());
    return {zb.Q * y.head(N), zb.Q * y.tail(N)};
}

Vec propagate_generator(const GeneratorMatrix& gen, const Vec& y0, double t)
{
    const Mat E = (gen.A * t).exp();
    return E * y0;
}

Trajectory solve_strongly_damped_wave(std::shared_ptr<const Operators> ops_ptr, const Vec& p0, const Vec& p1,
                                      const SourceSpec& sources, double dt, double T, double theta, double cg_tol)
{
    const Operators& ops = *ops_ptr;
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    if (!(pp.c0 > 0.0 && pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "the strongly damped wave form needs c0 > 0 and delta1 > 0");
    require_theta(theta);
    const int steps = step_count(dt, T);
    const double d1 = pp.delta1;
    const double b_el = 1.0 / pp.elastic_modulus();

    Trajectory tr = pressure_trajectory(ops, sources, dt, theta, "damped-wave-theta");
    Vec p = ops.project_primal(p0);
    Vec r = ops.project_primal(p1);
    auto push = [&](double t) {
        State s;
        s.t = t;
        s.p = p;
        s.p_dot = r;
        tr.states.push_back(std::move(s));
    };
    push(0.0);

    const double th = theta;
    auto op = [&](const Vec& x) -> Vec {
        return pp.c0 * (b.Mp * x) + (th * dt) * ops.apply_damping_D(x) + (th * th * dt * dt / d1) * (b.Ap * x);
    };
    const LinearMap prec = ops.pressure_preconditioner(pp.c0 + th * dt * (pp.c0 + pp.alpha * pp.alpha * b_el) / d1,
                                                       th * dt + th * th * dt * dt / d1);
    Vec s_prev = reduced_source_hat(ops, sources, 0.0);
    for (int n = 0; n < steps; ++n) {
        const double t1 = (n + 1) * dt;
        const Vec s_next = reduced_source_hat(ops, sources, t1);
        const Vec rhs = -dt * ops.apply_damping_D(r) - (dt / d1) * (b.Ap * (p + (th * dt) * r)) +
                        dt * (th * s_next + (1.0 - th) * s_prev);
        const Vec inc = solve_pressure_system(ops, op, rhs, prec, cg_tol, "damped wave step");
        const Vec r_next = ops.project_primal(r + inc);
        p = ops.project_primal(p + dt * (th * r_next + (1.0 - th) * r));
        r = r_next;
        push(t1);
        s_prev = s_next;
    }
    return tr;
}

namespace {

struct QPencil {
    Vec rates;
    Mat Z;
    Mat Qm;
};

QPencil q_pencil(const Operators& ops)
{
    const PhysParams& pp = ops.params();
    const ZeroMeanBasis& zb = ops.zero_mean_basis();
    QPencil qp;
    qp.Qm = pp.alpha * pp.alpha * zb.Bhat;
    qp.Qm.diagonal() += pp.delta1 * zb.lambda;
    const Mat L = zb.lambda.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(L, qp.Qm);
    if (ges.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "eigensolve of R failed");
    qp.rates = ges.eigenvalues();
    qp.Z = ges.eigenvectors();
    return qp;
}

void require_q_regime(const PhysParams& pp)
{
    if (!(pp.delta1 > 0.0) || pp.c0 != 0.0)
        throw Error(ErrorCode::InvalidRegime, "the q-form needs c0 = 0 and delta1 > 0");
}

} // namespace

Vec r_spectrum(const Operators& ops)
{
    require_q_regime(ops.params());
    return q_pencil(ops).rates;
}

Trajectory solve_ode_q_form(std::shared_ptr<const Operators> ops_ptr, const Vec& p0, const SourceSpec& sources,
                            double dt, double T, double theta, QFormMethod method, double cg_tol)
{
    const Operators& ops = *ops_ptr;
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    require_q_regime(pp);
    require_theta(theta);
    const int steps = step_count(dt, T);

    Trajectory tr = pressure_trajectory(ops, sources, dt, theta,
                                        method == QFormMethod::Theta ? "q-form-theta" : "q-form-exact");
    Vec p = ops.project_primal(p0);
    auto push = [&](double t) {
        State s;
        s.t = t;
        s.p = p;
        tr.states.push_back(std::move(s));
    };
    push(0.0);

    if (method == QFormMethod::ExactPropagator) {
        if (sources.has_F() || sources.has_S())
            throw Error(ErrorCode::UnsupportedSource, "the exact q-form propagator handles homogeneous data only");
        const ZeroMeanBasis& zb = ops.zero_mean_basis();
        const QPencil qp = q_pencil(ops);
        const Vec c = qp.Z.transpose() * (qp.Qm * (zb.Q.transpose() * (b.Mp * p)));
        for (int n = 0; n < steps; ++n) {
            const double t = (n + 1) * dt;
            const Vec decay = (-qp.rates.array() * t).exp().matrix();
            p = ops.project_primal(zb.Q * (qp.Z * decay.cwiseProduct(c)));
            push(t);
        }
        tr.scheme.theta = 0.0;
        return tr;
    }

    const double a2 = pp.alpha * pp.alpha;
    const double b_el = 1.0 / pp.elastic_modulus();
    Vec s_prev = reduced_source_bar(ops, sources, 0.0);
    auto op = [&](const Vec& x) -> Vec {
        return a2 * ops.apply_B_dual(x) + (pp.delta1 + theta * dt) * (b.Ap * x);
    };
    const LinearMap prec = ops.pressure_preconditioner(a2 * b_el, pp.delta1 + theta * dt);
    for (int n = 0; n < steps; ++n) {
        const double t1 = (n + 1) * dt;
        const Vec s_next = reduced_source_bar(ops, sources, t1);
        const Vec rhs = dt * (theta * s_next + (1.0 - theta) * s_prev) - dt * (b.Ap * p);
        const Vec inc = solve_pressure_system(ops, op, rhs, prec, cg_tol, "q-form step");
        p = ops.project_primal(p + inc);
        push(t1);
        s_prev = s_next;
    }
    return tr;
}

} // namespace pvlab

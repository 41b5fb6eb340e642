#include "pvlab/timestepper.hpp"

#include "pvlab/errors.hpp"

#include <cmath>

namespace pvlab {

std::vector<double> Trajectory::times() const
{
    std::vector<double> t;
    t.reserve(states.size());
    for (const State& s : states)
        t.push_back(s.t);
    return t;
}

std::string to_string(RateRule r)
{
    switch (r) {
    case RateRule::Trapezoid:
        return "trapezoid";
    case RateRule::Backward:
        return "backward-difference";
    case RateRule::None:
        return "none";
    }
    return "unknown";
}

int step_count(double dt, double T)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidParams, "time step must be positive");
    if (T < 0.0)
        throw Error(ErrorCode::InvalidParams, "final time must be nonnegative");
    const double n = std::round(T / dt);
    if (std::abs(n * dt - T) > 1e-9 * std::max(T, dt))
        throw Error(ErrorCode::InvalidParams, "final time is not an integer multiple of the time step");
    return static_cast<int>(n);
}

FullStepper::FullStepper(std::shared_ptr<const Operators> ops, SourceSpec sources, double dt)
    : ops_(std::move(ops)), sources_(std::move(sources)), dt_(dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidParams, "time step must be positive");
    const PhysParams& pp = ops_->params();
    const OperatorBundle& b = ops_->bundle();
    damping_ = SpMat(b.nu(), b.nu());
    if (pp.delta1 > 0.0)
        damping_ += pp.delta1 * b.Ke;
    if (pp.lambda_star > 0.0)
        damping_ += pp.lambda_star * b.Kdivdiv;
    rate_rule_ = pp.delta1 > 0.0 ? RateRule::Trapezoid : RateRule::Backward;
}

const FullStepper::LU& FullStepper::factor(double theta) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = factors_.find(theta);
    if (it != factors_.end())
        return *it->second;

    const OperatorBundle& b = ops_->bundle();
    const PhysParams& pp = ops_->params();
    const int nu = b.nu();
    const int np = b.np();
    const double dt = dt_;

    const SpMat K11 = SpMat(damping_ / dt) + theta * b.Ke;
    const SpMat K12 = (theta * pp.alpha) * b.G;
    const SpMat K21 = (pp.alpha + pp.delta2 / (theta * dt)) * b.Ddiv;
    SpMat K22 = (theta * dt) * b.Ap;
    if (pp.c0 != 0.0)
        K22 += pp.c0 * b.Mp;

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(K11.nonZeros() + K12.nonZeros() + K21.nonZeros() + K22.nonZeros() + 2 * np);
    auto add = [&t](const SpMat& m, int r0, int c0) {
        for (int k = 0; k < m.outerSize(); ++k)
            for (SpMat::InnerIterator it(m, k); it; ++it)
                t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    };
    add(K11, 0, 0);
    add(K12, 0, nu);
    add(K21, nu, 0);
    add(K22, nu, nu);
    for (int i = 0; i < np; ++i) {
        t.emplace_back(nu + i, nu + np, b.meanvec[i]);
        t.emplace_back(nu + np, nu + i, b.meanvec[i]);
    }
    SpMat K(nu + np + 1, nu + np + 1);
    K.setFromTriplets(t.begin(), t.end());
    K.makeCompressed();

    auto lu = std::make_shared<LU>();
    lu->analyzePattern(K);
    lu->factorize(K);
    if (lu->info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "block system factorization failed (theta = " + std::to_string(theta) +
                                                   "): " + lu->lastErrorMessage());
    factors_.emplace(theta, lu);
    return *lu;
}

State FullStepper::step(const State& s, double theta) const
{
    if (!(theta >= 0.5 && theta <= 1.0))
        throw Error(ErrorCode::InvalidParams, "theta must lie in [1/2, 1]");
    const OperatorBundle& b = ops_->bundle();
    const PhysParams& pp = ops_->params();
    const int nu = b.nu();
    const int np = b.np();
    const double dt = dt_;
    const double t0 = s.t;
    const double t1 = s.t + dt;
    const bool has_damping = damping_.nonZeros() > 0;

    const Vec v0 = s.has_u_dot() ? s.u_dot : Vec::Zero(nu);
    const Vec F0 = load_vector(b, sources_, t0);
    const Vec F1 = load_vector(b, sources_, t1);
    const Vec S0 = source_vector(b, sources_, t0);
    const Vec S1 = source_vector(b, sources_, t1);

    Vec rhs(nu + np + 1);
    Vec r1 = theta * F1;
    if (has_damping) {
        const Vec m0 = F0 - b.Ke * s.u - pp.alpha * (b.G * s.p);
        r1 += (1.0 - theta) * m0 + damping_ * s.u / dt;
    }
    Vec r2 = dt * (theta * S1 + (1.0 - theta) * S0) + fluid_content_dual(*ops_, s.p, s.u, v0) -
             ((1.0 - theta) * dt) * (b.Ap * s.p);
    if (pp.delta2 != 0.0)
        r2 += pp.delta2 * (b.Ddiv * (s.u / (theta * dt) + ((1.0 - theta) / theta) * v0));
    rhs << r1, r2, 0.0;

    const LU& lu = factor(theta);
    const Vec x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw Error(ErrorCode::SolveFailure, "block solve failed");

    State out;
    out.t = t1;
    out.u = x.head(nu);
    out.p = ops_->project_primal(x.segment(nu, np));
    if (rate_rule_ == RateRule::Trapezoid)
        out.u_dot = ((out.u - s.u) / dt - (1.0 - theta) * v0) / theta;
    else
        out.u_dot = (out.u - s.u) / dt;
    out.zeta = ops_->project_primal(ops_->mass_solve(fluid_content_dual(*ops_, out.p, out.u, out.u_dot)));
    return out;
}

State step_full(std::shared_ptr<const Operators> ops, const State& s, double dt, double theta,
                const SourceSpec& sources)
{
    FullStepper stepper(std::move(ops), sources, dt);
    return stepper.step(s, theta);
}

State state_from_initial(const InitialState& init)
{
    if (!init.has_u())
        throw Error(ErrorCode::Underspecified, "the full system needs an initial displacement");
    State s;
    s.t = 0.0;
    s.p = init.p;
    s.u = init.u;
    s.u_dot = init.u_dot;
    s.zeta = init.zeta;
    return s;
}

namespace {

Trajectory make_trajectory(const Operators& ops, const SourceSpec& sources, double dt, double theta, RateRule rule)
{
    Trajectory tr;
    tr.params = ops.params();
    tr.regime = classify_regime(ops.params());
    tr.scheme.theta = theta;
    tr.scheme.dt = dt;
    tr.scheme.mesh_id = ops.bundle().mesh->id();
    tr.scheme.rate_rule = rule;
    tr.source_descriptor = sources.descriptor;
    return tr;
}

} // namespace

Trajectory run(std::shared_ptr<const Operators> ops, const InitialSpec& initial, const SourceSpec& sources, double dt,
               double T, double theta, RunOptions opts)
{
    const int steps = step_count(dt, T);
    const InitialState init = resolve_initial_state(*ops, initial, sources, ResolveMode::Full);
    const PhysParams& pp = ops->params();

    FullStepper stepper(ops, sources, dt);
    Trajectory tr = make_trajectory(*ops, sources, dt, theta, stepper.rate_rule());

    std::string reason;
    if (init.regime.kind == RegimeKind::ClassicalBiot && init.basis == "d0")
        reason = "initial pressure recovered from fluid content only";
    else if (pp.c0 == 0.0 && pp.delta2 == 0.0 && pp.delta1 > 0.0 && init.mass_defect > 1e-10)
        reason = "initial data violates the incompressible mass balance";
    else if (init.regime.kind == RegimeKind::SecondaryConsolidation && pp.c0 == 0.0)
        reason = "initial displacement rate is not determined by the data";
    const bool damp = opts.damp_first_step && theta < 1.0 && !reason.empty() && steps > 0;
    tr.scheme.first_step_backward_euler = damp;
    if (damp)
        tr.scheme.first_step_reason = reason;

    tr.states.reserve(steps + 1);
    tr.states.push_back(state_from_initial(init));
    for (int n = 0; n < steps; ++n) {
        State next = stepper.step(tr.states.back(), (n == 0 && damp) ? 1.0 : theta);
        next.t = (n + 1) * dt;
        tr.states.push_back(std::move(next));
    }
    return tr;
}

Trajectory run_from_state(std::shared_ptr<const Operators> ops, const State& start, const SourceSpec& sources,
                          double dt, int steps, double theta)
{
    FullStepper stepper(ops, sources, dt);
    Trajectory tr = make_trajectory(*ops, sources, dt, theta, stepper.rate_rule());
    tr.states.reserve(steps + 1);
    tr.states.push_back(start);
    for (int n = 0; n < steps; ++n) {
        State next = stepper.step(tr.states.back(), theta);
        next.t = start.t + (n + 1) * dt;
        tr.states.push_back(std::move(next));
    }
    return tr;
}

std::vector<Vec> recover_u_variation_of_constants(const Operators& ops, const std::vector<double>& times,
                                                  const std::vector<Vec>& pressures, const Vec& u0,
                                                  const SourceSpec& sources)
{
    const PhysParams& pp = ops.params();
    if (!(pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "variation of constants needs delta1 > 0");
    if (times.size() != pressures.size() || times.empty())
        throw Error(ErrorCode::InvalidParams, "pressure trajectory and time grid differ in length");
    const OperatorBundle& b = ops.bundle();
    const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    for (std::size_t n = 1; n < times.size(); ++n)
        if (std::abs(times[n] - times[n - 1] - dt) > 1e-9 * std::max(dt, 1.0))
            throw Error(ErrorCode::InvalidParams, "pressure trajectory is not on a uniform grid");

    auto forcing = [&](std::size_t n) -> Vec {
        return ops.apply_Einv(load_vector(b, sources, times[n]) - pp.alpha * (b.G * pressures[n])) / pp.delta1;
    };
    const double decay = std::exp(-dt / pp.delta1);
    std::vector<Vec> u;
    u.reserve(times.size());
    u.push_back(u0);
    Vec q_prev = forcing(0);
    for (std::size_t n = 1; n < times.size(); ++n) {
        const Vec q = forcing(n);
        u.push_back(decay * u.back() + (0.5 * dt) * (decay * q_prev + q));
        q_prev = q;
    }
    return u;
}

} // namespace pvlab

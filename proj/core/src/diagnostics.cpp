#include "pvlab/diagnostics.hpp"

#include "pvlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pvlab {

namespace {

double quad(const Vec& x, const SpMat& M, const Vec& y)
{
    return x.dot(M * y);
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f)
{
    std::vector<double> c(f.size(), 0.0);
    for (std::size_t n = 1; n < f.size(); ++n)
        c[n] = c[n - 1] + 0.5 * (t[n] - t[n - 1]) * (f[n - 1] + f[n]);
    return c;
}

[[noreturn]] void mismatch(Identity id, const std::string& why)
{
    throw Error(ErrorCode::RegimeMismatch, to_string(id) + ": " + why);
}

/// u_dot at every state; a missing initial rate is replaced by the first difference quotient.
std::vector<Vec> rates(const Trajectory& traj, int nu)
{
    std::vector<Vec> v(traj.states.size());
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const State& s = traj.states[n];
        if (s.has_u_dot())
            v[n] = s.u_dot;
        else if (n + 1 < traj.states.size() && s.has_u() && traj.states[n + 1].has_u())
            v[n] = (traj.states[n + 1].u - s.u) / (traj.states[n + 1].t - s.t);
        else
            v[n] = Vec::Zero(nu);
    }
    return v;
}

void require_displacement(const Trajectory& traj, Identity id)
{
    for (const State& s : traj.states)
        if (!s.has_u())
            mismatch(id, "the trajectory carries no displacement");
}

void require_homogeneous(const SourceSpec& src, Identity id)
{
    if (src.has_F() || src.has_S())
        mismatch(id, "the identity holds for F = S = 0 only");
}

void require_incompressible_visco(const PhysParams& pp, Identity id)
{
    if (pp.c0 != 0.0 || !(pp.delta1 > 0.0) || pp.delta2 != 0.0 || pp.lambda_star != 0.0)
        mismatch(id, "needs c0 = 0, delta1 > 0, delta2 = 0, lambda* = 0");
}

} // namespace

double EnergyLedger::initial_energy() const
{
    return rows.empty() ? 0.0 : rows.front().elastic + rows.front().storage;
}

double EnergyLedger::max_abs_residual() const
{
    double m = 0.0;
    for (const auto& r : rows)
        m = std::max(m, std::abs(r.balance_residual));
    return m;
}

EnergyLedger energy_ledger(const Operators& ops, const Trajectory& traj, const SourceSpec& sources)
{
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    EnergyLedger led;
    const auto& st = traj.states;
    if (st.empty())
        return led;
    const std::vector<Vec> v = rates(traj, b.nu());
    auto disp = [&](const State& s) { return s.has_u() ? s.u : Vec(Vec::Zero(b.nu())); };

    EnergyLedgerRow row;
    for (std::size_t n = 0; n < st.size(); ++n) {
        const Vec u = disp(st[n]);
        const double elastic = 0.5 * quad(u, b.Ke, u);
        const double storage = 0.5 * pp.c0 * quad(st[n].p, b.Mp, st[n].p);
        if (n == 0) {
            row.t = st[0].t;
            row.elastic = elastic;
            row.storage = storage;
            led.rows.push_back(row);
            continue;
        }
        const double dt = st[n].t - st[n - 1].t;
        const Vec u0 = disp(st[n - 1]);
        const Vec ut = (u - u0) / dt;
        const Vec ph = 0.5 * (st[n].p + st[n - 1].p);
        const Vec Fh = 0.5 * (load_vector(b, sources, st[n - 1].t) + load_vector(b, sources, st[n].t));
        const Vec Sh = 0.5 * (source_vector(b, sources, st[n - 1].t) + source_vector(b, sources, st[n].t));

        const double visc = dt * pp.delta1 * quad(ut, b.Ke, ut);
        const double cons = dt * pp.lambda_star * quad(ut, b.Kdivdiv, ut);
        const double darcy = dt * quad(ph, b.Ap, ph);
        const double work = dt * (ut.dot(Fh) + ph.dot(Sh));
        const double exch = pp.delta2 != 0.0 ? pp.delta2 * ph.dot(b.Ddiv * (v[n] - v[n - 1])) : 0.0;
        const double dE = (elastic + storage) - (led.rows.back().elastic + led.rows.back().storage);

        row.t = st[n].t;
        row.elastic = elastic;
        row.storage = storage;
        row.viscous += visc;
        row.consolidation += cons;
        row.darcy += darcy;
        row.source_work += work;
        row.content_exchange += exch;
        row.balance_residual = dE + visc + cons + darcy - work + exch;
        led.rows.push_back(row);
    }
    return led;
}

std::string to_string(Identity id)
{
    switch (id) {
    case Identity::EnergyEst:
        return "energyest";
    case Identity::EED1C0:
        return "EED1C0";
    case Identity::FirstOne:
        return "firstone";
    case Identity::SecondOne:
        return "secondone";
    case Identity::ThirdOne:
        return "thirdone";
    case Identity::Finest:
        return "finest";
    case Identity::Mod2:
        return "mod2";
    }
    return "unknown";
}

Identity identity_from_string(const std::string& name)
{
    for (Identity id : {Identity::EnergyEst, Identity::EED1C0, Identity::FirstOne, Identity::SecondOne,
                        Identity::ThirdOne, Identity::Finest, Identity::Mod2})
        if (to_string(id) == name)
            return id;
    throw Error(ErrorCode::ConfigError, "unknown identity '" + name + "'");
}

double IdentitySeries::max_abs() const
{
    double m = 0.0;
    for (double r : residual)
        m = std::max(m, std::abs(r));
    return m;
}

double IdentitySeries::max_value() const
{
    double m = -std::numeric_limits<double>::infinity();
    for (double r : residual)
        m = std::max(m, r);
    return m;
}

IdentitySeries identity_residual(const Operators& ops, const Trajectory& traj, const SourceSpec& sources,
                                 Identity which, IdentityOptions opts)
{
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    const auto& st = traj.states;
    IdentitySeries out;
    out.which = which;
    out.t = traj.times();
    const std::size_t n = st.size();
    out.residual.assign(n, 0.0);
    if (n == 0)
        return out;

    std::vector<double> energy(n), diss(n), work_rate(n);
    std::vector<double> boundary_work(n, 0.0);

    switch (which) {
    case Identity::EnergyEst: {
        require_displacement(traj, which);
        if (pp.delta2 != 0.0)
            mismatch(which, "the content exchange term needs the adjusted identity (finest)");
        const auto v = rates(traj, b.nu());
        for (std::size_t i = 0; i < n; ++i) {
            const State& s = st[i];
            energy[i] = 0.5 * quad(s.u, b.Ke, s.u) + 0.5 * pp.c0 * quad(s.p, b.Mp, s.p);
            diss[i] = pp.delta1 * quad(v[i], b.Ke, v[i]) + pp.lambda_star * quad(v[i], b.Kdivdiv, v[i]) +
                      quad(s.p, b.Ap, s.p);
            work_rate[i] = v[i].dot(load_vector(b, sources, s.t)) + s.p.dot(source_vector(b, sources, s.t));
        }
        break;
    }
    case Identity::EED1C0: {
        if (!(pp.delta1 > 0.0) || pp.delta2 != 0.0 || pp.lambda_star != 0.0)
            mismatch(which, "needs delta1 > 0, delta2 = 0, lambda* = 0");
        std::vector<Vec> v;
        bool need_v = false;
        for (const State& s : st)
            need_v = need_v || !s.has_p_dot();
        if (need_v) {
            require_displacement(traj, which);
            v = rates(traj, b.nu());
        }
        for (std::size_t i = 0; i < n; ++i) {
            const State& s = st[i];
            Vec pt;
            if (s.has_p_dot()) {
                pt = s.p_dot;
            } else if (pp.c0 > 0.0) {
                const Vec r = source_vector(b, sources, s.t) - b.Ap * s.p - pp.alpha * (b.Ddiv * v[i]);
                pt = ops.project_primal(ops.mass_solve(ops.project_dual(r)) / pp.c0);
            } else {
                Vec r = pp.alpha * (b.Ddiv * v[i]) + pp.delta1 * source_rate_vector(b, sources, s.t);
                if (sources.has_F())
                    r -= pp.alpha * (b.Ddiv * ops.apply_Einv(load_rate_vector(b, sources, s.t)));
                pt = ops.solve_q_map(r);
            }
            energy[i] = 0.5 * (pp.c0 * quad(pt, b.Mp, pt) + quad(s.p, b.Ap, s.p) / pp.delta1);
            diss[i] = quad(pt, b.Ap, pt) + pt.dot(ops.apply_calB_dual(pt)) / pp.delta1;
            work_rate[i] = pt.dot(reduced_source_hat(ops, sources, s.t));
        }
        break;
    }
    case Identity::FirstOne:
    case Identity::SecondOne: {
        require_incompressible_visco(pp, which);
        require_homogeneous(sources, which);
        require_displacement(traj, which);
        const auto v = rates(traj, b.nu());
        for (std::size_t i = 0; i < n; ++i) {
            const State& s = st[i];
            if (which == Identity::FirstOne) {
                energy[i] = 0.5 * quad(s.u, b.Ke, s.u);
                diss[i] = pp.delta1 * quad(v[i], b.Ke, v[i]) + quad(s.p, b.Ap, s.p);
            } else {
                energy[i] = 0.5 * pp.delta1 * quad(v[i], b.Ke, v[i]) + 0.5 * quad(s.p, b.Ap, s.p);
                diss[i] = quad(v[i], b.Ke, v[i]);
            }
            work_rate[i] = 0.0;
        }
        break;
    }
    case Identity::ThirdOne: {
        require_incompressible_visco(pp, which);
        require_homogeneous(sources, which);
        require_displacement(traj, which);
        if (!(opts.poincare_korn > 0.0))
            throw Error(ErrorCode::InvalidParams, "thirdone needs the Poincare-Korn constant");
        const auto v = rates(traj, b.nu());
        const double w = pp.kappa / (pp.alpha * pp.alpha * opts.poincare_korn);
        out.inequality = true;
        for (std::size_t i = 0; i < n; ++i) {
            const State& s = st[i];
            const double lhs = 0.5 * w * quad(s.u, b.Ke, s.u) + pp.delta1 * w * quad(s.u, b.Ke, v[i]);
            const double rhs = 0.5 * quad(s.p, b.Ap, s.p);
            out.residual[i] = lhs - rhs;
            out.scale = std::max({out.scale, std::abs(lhs), std::abs(rhs)});
        }
        return out;
    }
    case Identity::Finest: {
        if (!(pp.delta2 > 0.0))
            mismatch(which, "needs the adjusted content (delta2 > 0)");
        require_displacement(traj, which);
        const auto v = rates(traj, b.nu());
        for (std::size_t i = 0; i < n; ++i) {
            const State& s = st[i];
            const Vec w = s.u + pp.delta1 * v[i];
            energy[i] = 0.5 * quad(w, b.Ke, w) + 0.5 * pp.c0 * quad(s.p, b.Mp, s.p);
            diss[i] = quad(s.p, b.Ap, s.p);
            work_rate[i] = s.p.dot(source_vector(b, sources, s.t));
            if (sources.has_F()) {
                // int (F, w_t) = [(F, w)] - int (F_t, w)
                boundary_work[i] = load_vector(b, sources, s.t).dot(w);
                work_rate[i] -= load_rate_vector(b, sources, s.t).dot(w);
            }
        }
        break;
    }
    case Identity::Mod2: {
        if (!(classify_regime(pp).kind == RegimeKind::ClassicalBiot))
            mismatch(which, "needs the classical Biot regime");
        double cum = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double dt = st[i].t - st[i - 1].t;
            const Vec pt = (st[i].p - st[i - 1].p) / dt;
            const Vec Sh = 0.5 * (reduced_source_tilde(ops, sources, st[i - 1].t) +
                                  reduced_source_tilde(ops, sources, st[i].t));
            const double dE = 0.5 * (quad(st[i].p, b.Ap, st[i].p) - quad(st[i - 1].p, b.Ap, st[i - 1].p));
            const double d = dt * pt.dot(ops.apply_calB_dual(pt));
            const double wk = dt * Sh.dot(pt);
            cum += dE + d - wk;
            out.residual[i] = cum;
            out.scale = std::max({out.scale, 0.5 * quad(st[i].p, b.Ap, st[i].p), std::abs(d), std::abs(wk)});
        }
        out.scale = std::max(out.scale, 0.5 * quad(st[0].p, b.Ap, st[0].p));
        return out;
    }
    }

    const auto cd = cumulative_trapezoid(out.t, diss);
    const auto cw = cumulative_trapezoid(out.t, work_rate);
    for (std::size_t i = 0; i < n; ++i) {
        const double bw = boundary_work[i] - boundary_work[0];
        out.residual[i] = energy[i] - energy[0] + cd[i] - cw[i] - bw;
        out.scale = std::max({out.scale, std::abs(energy[i]), std::abs(cd[i]), std::abs(cw[i]) + std::abs(bw)});
    }
    return out;
}

double poincare_korn_constant(const Operators& ops)
{
    const OperatorBundle& b = ops.bundle();
    if (b.nu() <= 2048) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(Mat(b.Ke), Mat(b.Mu), Eigen::EigenvaluesOnly);
        if (ges.info() != Eigen::Success)
            throw Error(ErrorCode::EigenFailure, "eigensolve of (Ke, Mu) failed");
        return 1.0 / ges.eigenvalues().minCoeff();
    }
    // power iteration on Ke^{-1} Mu
    Vec x = Vec::Ones(b.nu());
    double est = 0.0;
    for (int it = 0; it < 20000; ++it) {
        Vec y = ops.apply_Einv(b.Mu * x);
        const double next = quad(y, b.Mu, y) / quad(y, b.Ke, y);
        x = y / std::sqrt(quad(y, b.Mu, y));
        if (it > 0 && std::abs(next - est) <= 1e-13 * next)
            return next;
        est = next;
    }
    throw Error(ErrorCode::EigenFailure, "power iteration for the Poincare-Korn constant did not converge");
}

double gamma_bound(const PhysParams& pp, double poincare_korn)
{
    if (pp.c0 != 0.0 || !(pp.delta1 > 0.0))
        throw Error(ErrorCode::InvalidRegime, "the decay bound applies to c0 = 0, delta1 > 0");
    return 0.99 * std::min(1.0, pp.kappa / (pp.delta1 * pp.kappa + pp.alpha * pp.alpha * poincare_korn));
}

std::vector<double> gronwall_energy(const Operators& ops, const Trajectory& traj, double poincare_korn, bool plain)
{
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    const auto v = rates(traj, b.nu());
    const double weight = plain ? 1.0 : 1.0 + pp.delta1 * pp.kappa / (pp.alpha * pp.alpha * poincare_korn);
    std::vector<double> E;
    E.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        E.push_back(0.5 * (weight * quad(s.u, b.Ke, s.u) + pp.delta1 * quad(v[i], b.Ke, v[i]) +
                           quad(s.p, b.Ap, s.p)));
    }
    return E;
}

double y_norm(const Operators& ops, const Vec& p, const Vec& p_t)
{
    const OperatorBundle& b = ops.bundle();
    return std::sqrt(quad(p, b.Ap, p) + ops.params().c0 * quad(p_t, b.Mp, p_t));
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& values, double t_start,
                        double t_end, std::string quantity)
{
    DecayFit fit;
    fit.quantity = std::move(quantity);
    const double from = t_start + 0.1 * (t_end - t_start);
    fit.t_start = from;
    fit.t_end = t_end;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size() && i < values.size(); ++i) {
        if (t[i] < from - 1e-12 * std::abs(t_end) || t[i] > t_end + 1e-12 * std::abs(t_end))
            continue;
        if (!(values[i] > 0.0))
            throw Error(ErrorCode::NonPositiveSeries, "decay fit needs positive values (t = " + std::to_string(t[i]) + ")");
        x.push_back(t[i]);
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 2)
        throw Error(ErrorCode::InvalidParams, "decay fit window holds fewer than two samples");
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    fit.gamma_fit = -slope;
    fit.rsquared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
    return fit;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t m = std::min(x.size(), y.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

SmoothingReport smoothing_rate_check(std::shared_ptr<const Operators> ops_ptr, const Vec& d0,
                                     const std::vector<double>& T_list, int steps_per_T)
{
    const Operators& ops = *ops_ptr;
    const OperatorBundle& b = ops.bundle();
    const PhysParams& pp = ops.params();
    if (classify_regime(pp).kind != RegimeKind::ClassicalBiot)
        throw Error(ErrorCode::RegimeMismatch, "smoothing check applies to the classical Biot regime");
    if (T_list.size() < 2)
        throw Error(ErrorCode::UnresolvedRange, "at least two final times are needed");
    const auto [tmin_it, tmax_it] = std::minmax_element(T_list.begin(), T_list.end());
    const double Tmin = *tmin_it, Tmax = *tmax_it;
    if (!(Tmin > 0.0) || std::log10(Tmax / Tmin) < 1.5 - 1e-9)
        throw Error(ErrorCode::UnresolvedRange, "final times must be positive and span at least 1.5 decades");

    const ZeroMeanBasis& zb = ops.zero_mean_basis();
    const Vec c = zb.Q.transpose() * (b.Mp * d0);
    const double cmax = c.cwiseAbs().maxCoeff();
    SmoothingReport rep;
    int last = -1;
    for (int i = 0; i < c.size(); ++i) {
        if (std::abs(c[i]) > 1e-8 * cmax) {
            ++rep.significant_modes;
            last = i;
        }
    }
    if (rep.significant_modes < 3)
        throw Error(ErrorCode::InsufficientBandwidth,
                    "d0 needs broadband content; a few modes decay exponentially, not algebraically");
    rep.finest_rate = zb.lambda[last] / (pp.c0 + pp.alpha * pp.alpha * zb.Bhat(last, last));
    if (Tmin * rep.finest_rate < 1.0)
        throw Error(ErrorCode::UnresolvedRange, "the smallest final time resolves modes beyond the data's band");

    const double d0norm = std::sqrt(quad(d0, b.Mp, d0));
    for (double T : T_list) {
        const double dt = T / steps_per_T;
        ReducedInitial init;
        init.d0 = d0;
        const Trajectory tr = solve_reduced_biot(ops_ptr, init, SourceSpec::none(), dt, steps_per_T * dt, 1.0);
        const Vec Ap = b.Ap * tr.back().p;
        const double nrm = std::sqrt(std::max(0.0, Ap.dot(ops.mass_solve(Ap))));
        rep.T.push_back(T);
        rep.ap_norm.push_back(nrm);
        rep.sup_ratio = std::max(rep.sup_ratio, T * nrm / d0norm);
    }
    rep.slope = loglog_slope(rep.T, rep.ap_norm);
    return rep;
}

double elliptic_time_norm(const Operators& ops, const Trajectory& traj)
{
    const OperatorBundle& b = ops.bundle();
    std::vector<double> f;
    for (const State& s : traj.states) {
        const Vec Ap = b.Ap * s.p;
        f.push_back(std::max(0.0, Ap.dot(ops.mass_solve(Ap))));
    }
    const auto c = cumulative_trapezoid(traj.times(), f);
    return std::sqrt(c.empty() ? 0.0 : c.back());
}

} // namespace pvlab

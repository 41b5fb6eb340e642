#pragma once

#include "pvlab/reductions.hpp"

#include <string>
#include <vector>

namespace pvlab {

struct EnergyLedgerRow {
    double t = 0.0;
    double elastic = 0.0;         ///< (1/2) e(u, u)
    double storage = 0.0;         ///< (c0/2) |p|^2
    double viscous = 0.0;         ///< delta1 int e(u_t, u_t)
    double darcy = 0.0;           ///< int a(p, p)
    double consolidation = 0.0;   ///< lambda* int |div u_t|^2
    double source_work = 0.0;     ///< int (F, u_t) + (S, p)
    double content_exchange = 0.0;///< delta2 sum p^ . Ddiv (u_t^{n+1} - u_t^n)
    double balance_residual = 0.0;///< per interval, zero in the first row
};

/// Cumulative energy bookkeeping with interval-midpoint values, for which
/// the theta = 1/2 scheme balances exactly. Missing displacement counts as zero.
struct EnergyLedger {
    std::vector<EnergyLedgerRow> rows;

    double initial_energy() const;
    double max_abs_residual() const;
};

EnergyLedger energy_ledger(const Operators& ops, const Trajectory& traj, const SourceSpec& sources);

enum class Identity { EnergyEst, EED1C0, FirstOne, SecondOne, ThirdOne, Finest, Mod2 };

std::string to_string(Identity id);
Identity identity_from_string(const std::string& name);

struct IdentityOptions {
    double poincare_korn = 0.0; ///< required by ThirdOne
};

/// Cumulative residual of an energy identity at every stored time (time
/// integrals by the trapezoid rule on nodal values), or the pointwise slack
/// of an inequality (must stay <= 0).
struct IdentitySeries {
    Identity which = Identity::EnergyEst;
    bool inequality = false;
    std::vector<double> t;
    std::vector<double> residual;
    double scale = 0.0; ///< magnitude of the largest term, for relative reporting

    double max_abs() const;
    double max_value() const;
};

IdentitySeries identity_residual(const Operators& ops, const Trajectory& traj, const SourceSpec& sources,
                                 Identity which, IdentityOptions opts = {});

/// Optimal discrete constant in |u|^2 <= C_P e(u, u).
double poincare_korn_constant(const Operators& ops);

/// 0.99 min{1, kappa / (delta1 kappa + alpha^2 C_P)}.
double gamma_bound(const PhysParams& params, double poincare_korn);

/// E(t) = (1/2)[(1 + delta1 kappa/(alpha^2 C_P)) e(u,u) + delta1 e(u_t,u_t) + a(p,p)];
/// the plain variant drops the weight on e(u,u).
std::vector<double> gronwall_energy(const Operators& ops, const Trajectory& traj, double poincare_korn,
                                    bool plain = false);

/// sqrt(a(p,p) + c0 |p_t|^2)
double y_norm(const Operators& ops, const Vec& p, const Vec& p_t);

struct DecayFit {
    double gamma_fit = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double rsquared = 0.0;
    std::string quantity;
};

/// Least-squares slope of log(values) over the window minus its first 10%.
/// NonPositiveSeries if a value in the window is not positive.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& values, double t_start,
                        double t_end, std::string quantity = "");

struct SmoothingReport {
    std::vector<double> T;
    std::vector<double> ap_norm; ///< |A p(T)| in L2
    double slope = 0.0;
    double sup_ratio = 0.0;      ///< max T |A p(T)| / |d0|
    int significant_modes = 0;
    double finest_rate = 0.0;
};

/// Runs the reduced Biot solve (backward Euler, steps_per_T steps) from a
/// broadband d0 for each T and fits log |A p(T)| against log T.
SmoothingReport smoothing_rate_check(std::shared_ptr<const Operators> ops, const Vec& d0,
                                     const std::vector<double>& T_list, int steps_per_T = 100);

/// sqrt(int_0^T |A p|^2 dt), trapezoid rule.
double elliptic_time_norm(const Operators& ops, const Trajectory& traj);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace pvlab

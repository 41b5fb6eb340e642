#pragma once

#include "pvlab/initial_state.hpp"

#include <Eigen/SparseLU>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace pvlab {

/// Time-stamped coefficient vectors; empty vectors mark absent fields.
struct State {
    double t = 0.0;
    Vec p;     ///< primal, zero mean
    Vec u;     ///< interior displacement dofs
    Vec u_dot;
    Vec p_dot;
    Vec zeta;  ///< primal fluid content

    bool has_u() const { return u.size() > 0; }
    bool has_u_dot() const { return u_dot.size() > 0; }
    bool has_p_dot() const { return p_dot.size() > 0; }
    bool has_zeta() const { return zeta.size() > 0; }
};

/// How u_dot is advanced. Trapezoid keeps C u_dot equal to the momentum
/// residual at every level; Backward is the plain difference quotient.
enum class RateRule { Trapezoid, Backward, None };

struct SchemeInfo {
    std::string method = "theta";
    double theta = 0.5;
    double dt = 0.0;
    std::string mesh_id;
    RateRule rate_rule = RateRule::None;
    bool first_step_backward_euler = false;
    std::string first_step_reason;
};

struct Trajectory {
    std::vector<State> states;
    PhysParams params;
    RegimeTag regime;
    SchemeInfo scheme;
    std::string source_descriptor;

    const State& back() const { return states.back(); }
    std::vector<double> times() const;
};

std::string to_string(RateRule r);

/// Monolithic theta scheme for the coupled system. The block system for
/// (u, p, mean multiplier) is factorized once per theta value.
class FullStepper {
public:
    FullStepper(std::shared_ptr<const Operators> ops, SourceSpec sources, double dt);

    State step(const State& s, double theta) const;
    RateRule rate_rule() const { return rate_rule_; }
    double dt() const { return dt_; }
    const Operators& ops() const { return *ops_; }

private:
    using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;
    const LU& factor(double theta) const;

    std::shared_ptr<const Operators> ops_;
    SourceSpec sources_;
    double dt_;
    RateRule rate_rule_;
    SpMat damping_; ///< delta1 Ke + lambda* Kdivdiv
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<LU>> factors_;
};

/// One step of the theta scheme (builds and factorizes the system; use
/// FullStepper for repeated steps).
State step_full(std::shared_ptr<const Operators> ops, const State& s, double dt, double theta,
                const SourceSpec& sources);

struct RunOptions {
    /// Apply the backward Euler first step where incompatible data calls for it.
    bool damp_first_step = true;
};

/// Integrate from the resolved initial state to T in round(T/dt) steps.
Trajectory run(std::shared_ptr<const Operators> ops, const InitialSpec& initial, const SourceSpec& sources, double dt,
               double T, double theta, RunOptions opts = {});

/// Integrate from an arbitrary state (no first-step policy).
Trajectory run_from_state(std::shared_ptr<const Operators> ops, const State& start, const SourceSpec& sources,
                          double dt, int steps, double theta);

State state_from_initial(const InitialState& init);

/// u(t) = e^{-t/delta1} u0 + int_0^t e^{(s-t)/delta1} Q(s) ds with
/// Q = Ke^{-1}(F - alpha G p) / delta1, trapezoid rule on the pressure grid.
std::vector<Vec> recover_u_variation_of_constants(const Operators& ops, const std::vector<double>& times,
                                                  const std::vector<Vec>& pressures, const Vec& u0,
                                                  const SourceSpec& sources);

/// Number of steps for [0, T]; InvalidParams unless T is a multiple of dt.
int step_count(double dt, double T);

} // namespace pvlab

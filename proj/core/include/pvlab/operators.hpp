#pragma once

#include "pvlab/discretization.hpp"
#include "pvlab/krylov.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <mutex>

namespace pvlab {

struct SolverConfig {
    double inner_tol = 1e-10; ///< elastic and preconditioned Krylov solves
    int max_iter = 5000;
    int dense_threshold = 512; ///< largest pressure dimension for dense work
};

enum class OpTag { Einv, B, CalB, DampingD, R };

/// Mp-orthonormal basis of the zero-mean pressure space diagonalizing Ap.
/// Columns of Q satisfy Q'MpQ = I and Q'ApQ = diag(lambda).
struct ZeroMeanBasis {
    Mat Q;
    Vec lambda;
    Mat Bhat; ///< Q' Bd Q, the discrete B in this basis (symmetrized)
};

struct PropertyReport {
    double b_symmetry_defect = 0.0;   ///< max|Bhat - Bhat'| / max|Bhat|
    double b_min_ritz = 0.0;
    double b_max_ritz = 0.0;
    double calb_min_ritz = 0.0;
    double calb_condition = 0.0;      ///< +inf when calB is singular on the discrete space
    double b_min_singular = 0.0;      ///< injectivity proxy
    int b_numerical_kernel = 0;       ///< eigenvalues below 1e-10 * max
    double coercivity_constant = 0.0; ///< min Ritz value of 2A + calB against A
};

struct CalBSolveInfo {
    int iterations = 0;
    double rel_residual = 0.0;
    double unrepresentable_fraction = 0.0; ///< share of the data outside range(calB)
    bool dense = false;
};

/// Discrete actions of E^{-1}, B = -div E^{-1} grad, calB = c0 I + alpha^2 B,
/// D = A + calB / delta1 and R = A (alpha^2 B + delta1 A)^{-1}.
///
/// Pressure vectors come in two flavors: primal (nodal coefficients with
/// w.p = 0) and dual (tested against the basis, 1.r = 0). Every method says
/// which one it returns.
class Operators {
public:
    explicit Operators(std::shared_ptr<const OperatorBundle> bundle, SolverConfig cfg = {});

    const OperatorBundle& bundle() const { return *bundle_; }
    std::shared_ptr<const OperatorBundle> bundle_ptr() const { return bundle_; }
    const PhysParams& params() const { return bundle_->params; }
    const SolverConfig& config() const { return cfg_; }
    bool dense_available() const { return bundle_->np() <= cfg_.dense_threshold; }

    /// Ke w = load. Throws SolveFailure if the residual exceeds inner_tol.
    Vec apply_Einv(const Vec& load) const;
    /// Primal Mp^{-1} r.
    Vec mass_solve(const Vec& dual) const;
    Vec project_primal(const Vec& p) const;
    Vec project_dual(const Vec& r) const;

    /// Bd p = Ddiv Ke^{-1} Ddiv' p (dual).
    Vec apply_B_dual(const Vec& p) const;
    /// Zero-mean primal representation of B p.
    Vec apply_B(const Vec& p) const;
    /// c0 Mp p + alpha^2 Bd p (dual).
    Vec apply_calB_dual(const Vec& p) const;
    Vec apply_calB(const Vec& p) const;
    /// Ap p + Mp calB p / delta1 (dual). InvalidRegime for delta1 = 0.
    Vec apply_damping_D(const Vec& p) const;
    /// Primal R q for a primal zero-mean q. InvalidRegime unless c0 = 0 < delta1.
    Vec apply_R(const Vec& q) const;
    /// (alpha^2 Bd + delta1 Ap) x = rhs_dual, primal result.
    Vec solve_q_map(const Vec& rhs_dual) const;

    /// calB x = d for a primal zero-mean d. With c0 = 0 the data is first
    /// projected onto the discrete range (P1-P1 pairs carry spurious pressure
    /// modes in the kernel of Bd) and the minimal-norm solution is returned.
    Vec solve_calB(const Vec& d, CalBSolveInfo* info = nullptr) const;
    /// Same, with the right-hand side already in dual form.
    Vec solve_calB_dual(const Vec& rhs, CalBSolveInfo* info = nullptr) const;
    /// (c Mp + a Bd) x = rhs for c >= 0, a > 0, with the same range handling.
    Vec solve_shifted_B_dual(double c, double a, const Vec& rhs, CalBSolveInfo* info = nullptr) const;

    /// Dense basis, computed once. DenseModeUnavailable above the threshold.
    const ZeroMeanBasis& zero_mean_basis() const;

    /// Sparse SPD factor of zeta Mp + eta Ap; used as a preconditioner.
    LinearMap pressure_preconditioner(double zeta, double eta) const;

    /// Dense property checks. asymmetry_injection perturbs Bhat by a
    /// non-symmetric term of that relative size (fault injection only).
    PropertyReport check_operator_properties(double asymmetry_injection = 0.0) const;

private:
    struct Cache;

    std::shared_ptr<const OperatorBundle> bundle_;
    SolverConfig cfg_;
    std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ke_solver_;
    std::shared_ptr<Eigen::SimplicialLLT<SpMat>> mp_solver_;
    std::shared_ptr<Cache> cache_;
};

} // namespace pvlab

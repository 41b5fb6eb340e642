#pragma once

#include <Eigen/Dense>

#include <functional>

namespace pvlab {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct CgOptions {
    double rel_tol = 1e-10;
    int max_iter = 2000;
    /// When set, iterates are kept mass-weighted mean free (w . x = 0) and
    /// residuals orthogonal to constants (1 . r = 0). w is the mean functional.
    const Eigen::VectorXd* mean_weights = nullptr;
};

struct CgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator mapping primal vectors to dual vectors. The preconditioner maps
/// dual to primal. Starts from zero, so on a consistent semidefinite system
/// the result is the solution orthogonal to the kernel.
CgResult pcg(const LinearMap& op, const Eigen::VectorXd& rhs, const LinearMap& precond, const CgOptions& opts);

/// x - (w.x / sum w) 1
Eigen::VectorXd project_primal(const Eigen::VectorXd& x, const Eigen::VectorXd& w);
/// r - (sum r / sum w) w
Eigen::VectorXd project_dual(const Eigen::VectorXd& r, const Eigen::VectorXd& w);

} // namespace pvlab

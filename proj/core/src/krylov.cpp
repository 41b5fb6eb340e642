#include "pvlab/krylov.hpp"

#include <cmath>

namespace pvlab {

Eigen::VectorXd project_primal(const Eigen::VectorXd& x, const Eigen::VectorXd& w)
{
    Eigen::VectorXd y = x;
    y.array() -= w.dot(x) / w.sum();
    return y;
}

Eigen::VectorXd project_dual(const Eigen::VectorXd& r, const Eigen::VectorXd& w)
{
    return r - (r.sum() / w.sum()) * w;
}

CgResult pcg(const LinearMap& op, const Eigen::VectorXd& rhs, const LinearMap& precond, const CgOptions& opts)
{
    const Eigen::VectorXd* w = opts.mean_weights;
    auto primal = [w](Eigen::VectorXd v) { return w ? project_primal(v, *w) : v; };
    auto dual = [w](Eigen::VectorXd v) { return w ? project_dual(v, *w) : v; };

    CgResult res;
    Eigen::VectorXd b = dual(rhs);
    res.x = Eigen::VectorXd::Zero(rhs.size());
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = primal(precond(r));
    Eigen::VectorXd d = z;
    double rz = r.dot(z);
    for (int it = 1; it <= opts.max_iter; ++it) {
        const Eigen::VectorXd q = dual(op(d));
        const double dq = d.dot(q);
        if (!(dq > 0.0)) {
            res.iterations = it;
            res.rel_residual = r.norm() / bnorm;
            res.converged = res.rel_residual <= opts.rel_tol;
            return res;
        }
        const double step = rz / dq;
        res.x += step * d;
        r -= step * q;
        res.iterations = it;
        res.rel_residual = r.norm() / bnorm;
        if (res.rel_residual <= opts.rel_tol) {
            // guard against drift of the recursive residual
            const Eigen::VectorXd true_r = b - dual(op(res.x));
            res.rel_residual = true_r.norm() / bnorm;
            if (res.rel_residual <= opts.rel_tol) {
                res.converged = true;
                break;
            }
            r = true_r;
        }
        z = primal(precond(r));
        const double rz_new = r.dot(z);
        d = z + (rz_new / rz) * d;
        rz = rz_new;
    }
    res.x = primal(res.x);
    return res;
}

} // namespace pvlab

#pragma once

#include "pvlab/diagnostics.hpp"
#include "pvlab/errors.hpp"
#include "pvlab/oracle1d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace pvlab::test {

using std::numbers::pi;
using std::numbers::sqrt2;

inline ScalarFn phi(int k, double amp = 1.0)
{
    return [k, amp](const Point& x) { return amp * sqrt2 * std::cos(k * pi * x[0]); };
}

inline ScalarFn psi(int k, double amp = 1.0)
{
    return [k, amp](const Point& x) { return amp * sqrt2 * std::sin(k * pi * x[0]); };
}

inline std::shared_ptr<const Operators> make_ops(int dim, int n, const PhysParams& pp, SolverConfig cfg = {})
{
    return std::make_shared<const Operators>(assemble_forms(build_mesh(dim, n), pp), cfg);
}

inline PhysParams visco(double c0, double delta1, double delta2 = 0.0)
{
    PhysParams pp;
    pp.c0 = c0;
    pp.delta1 = delta1;
    pp.delta2 = delta2;
    return pp;
}

inline double mnorm(const SpMat& M, const Vec& v)
{
    return std::sqrt(std::max(0.0, v.dot(M * v)));
}

/// Random zero-mean pressure vector.
inline Vec random_pressure(const Operators& ops, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(ops.bundle().np());
    for (auto& x : v)
        x = u(rng);
    return ops.project_primal(v);
}

inline Vec pressure(const Mesh& mesh, const ScalarFn& f)
{
    return project_function(mesh, f, Space::PressureZeroMean).coeffs;
}

inline Vec displacement(const Mesh& mesh, const ScalarFn& f)
{
    return project_function(mesh, f, Space::Displacement).coeffs;
}

#define EXPECT_THROW_CODE(stmt, expected)                                                                             \
    do {                                                                                                             \
        try {                                                                                                        \
            stmt;                                                                                                    \
            ADD_FAILURE() << "expected " << ::pvlab::to_string(expected);                                            \
        } catch (const ::pvlab::Error& e) {                                                                          \
            EXPECT_EQ(e.code(), expected) << e.what();                                                               \
        }                                                                                                            \
    } while (0)

} // namespace pvlab::test

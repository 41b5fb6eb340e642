#pragma once

#include "pvlab/discretization.hpp"
#include "pvlab/sources.hpp"

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace pvlab {

/// Symbols of the 1D operators on phi_k = sqrt2 cos(k pi x), psi_k = sqrt2 sin(k pi x).
struct ModalSymbols {
    int k = 1;
    double a = 0.0; ///< kappa (k pi)^2
    double e = 0.0; ///< (lambda + 2 mu) (k pi)^2
    double g = 0.0; ///< k pi, so div psi_k = g phi_k and grad phi_k = -g psi_k
    double b = 0.0; ///< 1 / (lambda + 2 mu)
};

ModalSymbols modal_symbols(int k, const PhysParams& params);

/// Per-mode first-order system x' = M x + N f(t) with f = (F_k, F_k', S_k),
/// outputs (P_k, U_k) = C x + D f. The state is the smallest set of
/// coefficients that is not fixed by an algebraic relation: P alone for
/// classical Biot, U alone for incompressible visco and creep, (P, U) otherwise.
struct ModalSystem {
    ModalSymbols sym;
    PhysParams params;
    RegimeTag regime;
    std::vector<std::string> labels;
    Mat M;
    Mat N;
    Mat C;
    Mat D;

    int dim() const { return static_cast<int>(M.rows()); }
};

/// InvalidRegime when k < 1 or the tag does not match the parameters.
ModalSystem modal_matrix(int k, const PhysParams& params, const RegimeTag& regime);
ModalSystem modal_matrix(int k, const PhysParams& params);

/// Generator in (P_k, P_k') for c0 > 0, delta1 > 0, delta2 = 0.
Mat modal_wave_generator(int k, const PhysParams& params);

/// Time-separable modal data: F_k(t) = F_amp F_profile(t), S_k(t) = S_amp S_profile(t).
struct ModalForcing {
    double F_amp = 0.0;
    double S_amp = 0.0;
    ExpPoly F_profile;
    ExpPoly S_profile;

    Vec at(double t) const; ///< (F_k, F_k', S_k)
};

/// State vector from (P0, U0); coordinates not in the state are ignored.
Vec modal_state(const ModalSystem& ms, double P0, double U0);

/// x(t) by the closed-form 2x2 exponential plus exact particular solutions
/// for exponential-polynomial forcing. UnsupportedSource on resonance.
Vec exact_modal_solution(const ModalSystem& ms, const Vec& x0, double t, const ModalForcing& forcing = {});

/// (P_k, U_k) at time t.
std::pair<double, double> modal_outputs(const ModalSystem& ms, const Vec& x, double t, const ModalForcing& forcing = {});

/// M x + N f(t).
Vec modal_rhs(const ModalSystem& ms, const Vec& x, double t, const ModalForcing& forcing = {});

/// exp(M t) for a 1x1 or 2x2 real matrix, robust at repeated roots.
Mat modal_exponential(const Mat& M, double t);

struct OracleMode {
    int k = 1;
    double P0 = 0.0;
    double U0 = 0.0;
    ModalForcing forcing;
};

/// Superposition of exact modal solutions interpolated onto a 1D mesh.
std::pair<FieldVec, FieldVec> oracle_field_solution(const Mesh& mesh, const PhysParams& params,
                                                    const std::vector<OracleMode>& modes, double t);

/// The matching space-time sources, ready for the time stepper.
SourceSpec oracle_sources(const std::vector<OracleMode>& modes);

} // namespace pvlab

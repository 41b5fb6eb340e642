#pragma once

#include "pvlab/timestepper.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace pvlab {

/// S - alpha Ddiv Ke^{-1} F_t (dual): the source of [calB p]_t + A p = S~.
Vec reduced_source_tilde(const Operators& ops, const SourceSpec& src, double t);
/// (S - alpha Ddiv Ke^{-1} F_t) / delta1 + S_t: the damped-wave source.
Vec reduced_source_hat(const Operators& ops, const SourceSpec& src, double t);
/// S + delta1 S_t - alpha Ddiv Ke^{-1} F_t: the source of [alpha^2 B + delta1 A] p_t + A p = S-bar.
Vec reduced_source_bar(const Operators& ops, const SourceSpec& src, double t);

struct ReducedOptions {
    double cg_tol = 1e-12;
    /// Backward Euler first step when started from fluid content only.
    bool damp_first_step = true;
};

/// Exactly one of p0 / d0.
struct ReducedInitial {
    std::optional<Vec> p0;
    std::optional<Vec> d0;
};

/// Theta scheme for [calB p]_t + A p = S~ with matrix-free calB. States carry
/// p and the content zeta = calB p + alpha Ddiv Ke^{-1} F (primal).
Trajectory solve_reduced_biot(std::shared_ptr<const Operators> ops, const ReducedInitial& init,
                              const SourceSpec& sources, double dt, double T, double theta, ReducedOptions opts = {});

/// First-order generator [[0, I], [-A/(delta1 c0), -D/c0]] in the
/// Mp-orthonormal zero-mean basis (A diagonal there).
struct GeneratorMatrix {
    Mat A;
    int N = 0;
    PhysParams params;
};

GeneratorMatrix build_first_order_generator(const Operators& ops);

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    double spectral_abscissa = 0.0;
    double sector_ratio = 0.0;
    double min_real_gap = 0.0;
};

SpectrumReport spectrum_report(const GeneratorMatrix& gen);

struct GeneratorModes {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

GeneratorModes generator_modes(const GeneratorMatrix& gen);

/// Modal coordinates (Q' Mp p, Q' Mp p_t) and back.
Vec to_generator_coords(const Operators& ops, const Vec& p, const Vec& p_t);
std::pair<Vec, Vec> from_generator_coords(const Operators& ops, const Vec& y);

/// exp(A t) y0 by dense matrix exponential.
Vec propagate_generator(const GeneratorMatrix& gen, const Vec& y0, double t);

/// c0 p_tt + D p_t + A p / delta1 = S^ as a first-order system in (p, p_t),
/// theta scheme (theta = 1/2 is the midpoint rule). States carry p and p_dot.
Trajectory solve_strongly_damped_wave(std::shared_ptr<const Operators> ops, const Vec& p0, const Vec& p1,
                                      const SourceSpec& sources, double dt, double T, double theta = 0.5,
                                      double cg_tol = 1e-12);

enum class QFormMethod { Theta, ExactPropagator };

/// q_t + R q = S-bar with q = (alpha^2 B + delta1 A) p; returns p. The exact
/// propagator requires dense mode and S-bar = 0.
Trajectory solve_ode_q_form(std::shared_ptr<const Operators> ops, const Vec& p0, const SourceSpec& sources,
                            double dt, double T, double theta = 0.5, QFormMethod method = QFormMethod::Theta,
                            double cg_tol = 1e-12);

/// Dense eigenvalues of R on the zero-mean space, ascending.
Vec r_spectrum(const Operators& ops);

} // namespace pvlab

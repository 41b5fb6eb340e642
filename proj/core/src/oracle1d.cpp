#include "pvlab/oracle1d.hpp"

#include "pvlab/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace pvlab {

namespace {

using cd = std::complex<double>;

/// (exp(z t) - 1) / z, continuous at z = 0.
cd expm1_ratio(cd z, double t)
{
    const cd zt = z * t;
    if (std::abs(zt) < 1e-3)
        return t * (1.0 + zt / 2.0 + zt * zt / 6.0 + zt * zt * zt / 24.0);
    return (std::exp(zt) - 1.0) / z;
}

double phi(int k, double x)
{
    return std::numbers::sqrt2 * std::cos(k * std::numbers::pi * x);
}

double psi(int k, double x)
{
    return std::numbers::sqrt2 * std::sin(k * std::numbers::pi * x);
}

struct Term {
    Vec g;
    int power;
    double rate;
};

/// Particular solution e^{rate t} sum_j c_j t^j of x' = M x + g t^m e^{rate t}.
std::vector<Vec> particular_coefficients(const Mat& M, const Term& term)
{
    const int n = static_cast<int>(M.rows());
    const Mat S = term.rate * Mat::Identity(n, n) - M;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (std::abs(S.determinant()) <= 1e-12 * std::pow(scale, n))
        throw Error(ErrorCode::UnsupportedSource, "forcing rate resonates with a modal eigenvalue");
    const Eigen::PartialPivLU<Mat> lu(S);
    std::vector<Vec> c(term.power + 1, Vec::Zero(n));
    c[term.power] = lu.solve(term.g);
    for (int j = term.power - 1; j >= 0; --j)
        c[j] = lu.solve(-(j + 1) * c[j + 1]);
    return c;
}

Vec evaluate_particular(const std::vector<Vec>& c, double rate, double t)
{
    Vec x = Vec::Zero(c.front().size());
    double tp = 1.0;
    for (const Vec& cj : c) {
        x += tp * cj;
        tp *= t;
    }
    return std::exp(rate * t) * x;
}

std::vector<Term> forcing_terms(const ModalSystem& ms, const ModalForcing& f)
{
    std::vector<Term> terms;
    auto push = [&](const Vec& g, int power, double rate) {
        if (g.cwiseAbs().maxCoeff() != 0.0)
            terms.push_back({g, power, rate});
    };
    if (f.F_amp != 0.0) {
        const ExpPoly& p = f.F_profile;
        push(ms.N.col(0) * f.F_amp * p.coeff, p.power, p.rate);
        push(ms.N.col(1) * f.F_amp * p.coeff * p.rate, p.power, p.rate);
        if (p.power > 0)
            push(ms.N.col(1) * f.F_amp * p.coeff * p.power, p.power - 1, p.rate);
    }
    if (f.S_amp != 0.0) {
        const ExpPoly& p = f.S_profile;
        push(ms.N.col(2) * f.S_amp * p.coeff, p.power, p.rate);
    }
    return terms;
}

} // namespace

ModalSymbols modal_symbols(int k, const PhysParams& pp)
{
    if (k < 1)
        throw Error(ErrorCode::InvalidRegime, "mode index must be at least 1");
    ModalSymbols s;
    s.k = k;
    s.g = k * std::numbers::pi;
    s.a = pp.kappa * s.g * s.g;
    s.e = pp.elastic_modulus() * s.g * s.g;
    s.b = 1.0 / pp.elastic_modulus();
    return s;
}

ModalSystem modal_matrix(int k, const PhysParams& pp)
{
    return modal_matrix(k, pp, classify_regime(pp));
}

ModalSystem modal_matrix(int k, const PhysParams& pp, const RegimeTag& regime)
{
    if (!(regime == classify_regime(pp)))
        throw Error(ErrorCode::InvalidRegime, "regime tag " + to_string(regime) + " does not match the parameters");
    ModalSystem ms;
    ms.sym = modal_symbols(k, pp);
    ms.params = pp;
    ms.regime = regime;
    const double a = ms.sym.a, e = ms.sym.e, g = ms.sym.g, b = ms.sym.b;
    const double al = pp.alpha, c0 = pp.c0;

    switch (regime.kind) {
    case RegimeKind::ClassicalBiot: {
        const double cb = c0 + al * al * b;
        ms.labels = {"P"};
        ms.M = Mat::Constant(1, 1, -a / cb);
        ms.N = Mat(1, 3);
        ms.N << 0.0, -al * g / (e * cb), 1.0 / cb;
        ms.C = Mat(2, 1);
        ms.C << 1.0, al * g / e;
        ms.D = Mat::Zero(2, 3);
        ms.D(1, 0) = 1.0 / e;
        break;
    }
    case RegimeKind::ViscoAdjustedContent: {
        const double cb = c0 + al * al * b;
        const double d1 = pp.delta1;
        ms.labels = {"P", "U"};
        ms.M = Mat(2, 2);
        ms.M << -a / cb, 0.0, al * g / (e * d1), -1.0 / d1;
        ms.N = Mat(2, 3);
        ms.N << 0.0, -al * g / (e * cb), 1.0 / cb, 1.0 / (e * d1), 0.0, 0.0;
        ms.C = Mat::Identity(2, 2);
        ms.D = Mat::Zero(2, 3);
        break;
    }
    case RegimeKind::ViscoStandardContent:
    case RegimeKind::SecondaryConsolidation: {
        const double eta = e * pp.delta1 + pp.lambda_star * g * g;
        if (c0 > 0.0) {
            ms.labels = {"P", "U"};
            ms.M = Mat(2, 2);
            ms.M << -(a + al * al * g * g / eta) / c0, al * g * e / (eta * c0), al * g / eta, -e / eta;
            ms.N = Mat(2, 3);
            ms.N << -al * g / (eta * c0), 0.0, 1.0 / c0, 1.0 / eta, 0.0, 0.0;
            ms.C = Mat::Identity(2, 2);
            ms.D = Mat::Zero(2, 3);
        } else {
            const double den = a + al * al * g * g / eta;
            const double pU = al * g * e / (eta * den);
            const double pF = -al * g / (eta * den);
            const double pS = 1.0 / den;
            ms.labels = {"U"};
            ms.M = Mat::Constant(1, 1, (al * g * pU - e) / eta);
            ms.N = Mat(1, 3);
            ms.N << (1.0 + al * g * pF) / eta, 0.0, al * g * pS / eta;
            ms.C = Mat(2, 1);
            ms.C << pU, 1.0;
            ms.D = Mat::Zero(2, 3);
            ms.D(0, 0) = pF;
            ms.D(0, 2) = pS;
        }
        break;
    }
    }
    return ms;
}

Mat modal_wave_generator(int k, const PhysParams& pp)
{
    if (!(pp.c0 > 0.0 && pp.delta1 > 0.0) || pp.delta2 != 0.0)
        throw Error(ErrorCode::InvalidRegime, "the modal wave generator needs c0 > 0, delta1 > 0, delta2 = 0");
    const ModalSymbols s = modal_symbols(k, pp);
    Mat A(2, 2);
    A << 0.0, 1.0, -s.a / (pp.delta1 * pp.c0),
        -(s.a + (pp.c0 + pp.alpha * pp.alpha * s.b) / pp.delta1) / pp.c0;
    return A;
}

Vec ModalForcing::at(double t) const
{
    Vec f(3);
    f << F_amp * F_profile.value(t), F_amp * F_profile.derivative(t), S_amp * S_profile.value(t);
    return f;
}

Vec modal_state(const ModalSystem& ms, double P0, double U0)
{
    Vec x(ms.dim());
    for (int i = 0; i < ms.dim(); ++i)
        x[i] = ms.labels[i] == "P" ? P0 : U0;
    return x;
}

Mat modal_exponential(const Mat& M, double t)
{
    if (M.rows() == 1)
        return Mat::Constant(1, 1, std::exp(M(0, 0) * t));
    if (M.rows() != 2 || M.cols() != 2)
        throw Error(ErrorCode::InvalidParams, "modal exponential handles 1x1 and 2x2 matrices");
    const double tr = M.trace();
    const double det = M.determinant();
    const cd disc = std::sqrt(cd(tr * tr / 4.0 - det, 0.0));
    cd lead = tr / 2.0 + disc;
    cd other = tr / 2.0 - disc;
    if (other.real() > lead.real())
        std::swap(lead, other);
    // exp(Mt) = e^{lead t} [I + (e^{(other-lead)t} - 1)/(other - lead) (M - lead I)]
    const cd ratio = expm1_ratio(other - lead, t);
    const cd scale = std::exp(lead * t);
    Eigen::Matrix2cd Mc = M.cast<cd>();
    Eigen::Matrix2cd E = scale * (Eigen::Matrix2cd::Identity() + ratio * (Mc - lead * Eigen::Matrix2cd::Identity()));
    return E.real();
}

Vec exact_modal_solution(const ModalSystem& ms, const Vec& x0, double t, const ModalForcing& forcing)
{
    Vec xp0 = Vec::Zero(ms.dim());
    Vec xpt = Vec::Zero(ms.dim());
    for (const Term& term : forcing_terms(ms, forcing)) {
        const auto c = particular_coefficients(ms.M, term);
        xp0 += evaluate_particular(c, term.rate, 0.0);
        xpt += evaluate_particular(c, term.rate, t);
    }
    return modal_exponential(ms.M, t) * (x0 - xp0) + xpt;
}

std::pair<double, double> modal_outputs(const ModalSystem& ms, const Vec& x, double t, const ModalForcing& forcing)
{
    const Vec y = ms.C * x + ms.D * forcing.at(t);
    return {y[0], y[1]};
}

Vec modal_rhs(const ModalSystem& ms, const Vec& x, double t, const ModalForcing& forcing)
{
    return ms.M * x + ms.N * forcing.at(t);
}

std::pair<FieldVec, FieldVec> oracle_field_solution(const Mesh& mesh, const PhysParams& params,
                                                    const std::vector<OracleMode>& modes, double t)
{
    if (mesh.dim != 1)
        throw Error(ErrorCode::InvalidResolution, "modal oracle fields exist on 1D meshes only");
    Vec p = Vec::Zero(mesh.num_nodes());
    Vec u = Vec::Zero(mesh.displacement_dofs());
    for (const OracleMode& m : modes) {
        const ModalSystem ms = modal_matrix(m.k, params);
        const Vec x = exact_modal_solution(ms, modal_state(ms, m.P0, m.U0), t, m.forcing);
        const auto [P, U] = modal_outputs(ms, x, t, m.forcing);
        const int k = m.k;
        p += P * project_function(mesh, ScalarFn([k](const Point& x) { return phi(k, x[0]); }),
                                  Space::PressureZeroMean).coeffs;
        u += U * project_function(mesh, ScalarFn([k](const Point& x) { return psi(k, x[0]); }), Space::Displacement)
                     .coeffs;
    }
    return {FieldVec::pressure(std::move(p)), FieldVec::displacement(std::move(u))};
}

SourceSpec oracle_sources(const std::vector<OracleMode>& modes)
{
    SourceSpec spec;
    spec.descriptor = "modal";
    bool anyF = false, anyS = false, F_const = true, S_const = true;
    for (const OracleMode& m : modes) {
        if (m.forcing.F_amp != 0.0) {
            anyF = true;
            F_const = F_const && m.forcing.F_profile.power == 0 && m.forcing.F_profile.rate == 0.0;
        }
        if (m.forcing.S_amp != 0.0) {
            anyS = true;
            S_const = S_const && m.forcing.S_profile.power == 0 && m.forcing.S_profile.rate == 0.0;
        }
    }
    if (anyF) {
        spec.F = [modes](const Point& x, double t) {
            double v = 0.0;
            for (const OracleMode& m : modes)
                v += m.forcing.F_amp * m.forcing.F_profile.value(t) * psi(m.k, x[0]);
            return std::array<double, 2>{v, 0.0};
        };
        spec.F_t = [modes](const Point& x, double t) {
            double v = 0.0;
            for (const OracleMode& m : modes)
                v += m.forcing.F_amp * m.forcing.F_profile.derivative(t) * psi(m.k, x[0]);
            return std::array<double, 2>{v, 0.0};
        };
        spec.F_constant_in_time = F_const;
    }
    if (anyS) {
        spec.S = [modes](const Point& x, double t) {
            double v = 0.0;
            for (const OracleMode& m : modes)
                v += m.forcing.S_amp * m.forcing.S_profile.value(t) * phi(m.k, x[0]);
            return v;
        };
        spec.S_t = [modes](const Point& x, double t) {
            double v = 0.0;
            for (const OracleMode& m : modes)
                v += m.forcing.S_amp * m.forcing.S_profile.derivative(t) * phi(m.k, x[0]);
            return v;
        };
        spec.S_constant_in_time = S_const;
    }
    return spec;
}

} // namespace pvlab

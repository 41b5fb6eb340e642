#include "pvlab/discretization.hpp"

#include "pvlab/errors.hpp"

#include <cmath>

namespace pvlab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementGeometry {
    double measure = 0.0;
    double grad[3][2] = {};
};

ElementGeometry element_geometry(const Mesh& mesh, const std::array<int, 3>& el)
{
    ElementGeometry g;
    if (mesh.dim == 1) {
        const double h = mesh.nodes[el[1]][0] - mesh.nodes[el[0]][0];
        g.measure = h;
        g.grad[0][0] = -1.0 / h;
        g.grad[1][0] = 1.0 / h;
        return g;
    }
    const Point& x0 = mesh.nodes[el[0]];
    const Point& x1 = mesh.nodes[el[1]];
    const Point& x2 = mesh.nodes[el[2]];
    const double j11 = x1[0] - x0[0], j12 = x2[0] - x0[0];
    const double j21 = x1[1] - x0[1], j22 = x2[1] - x0[1];
    const double det = j11 * j22 - j12 * j21;
    g.measure = 0.5 * std::abs(det);
    // rows of J^{-1} are the gradients of the barycentric coordinates 1 and 2
    g.grad[1][0] = j22 / det;
    g.grad[1][1] = -j12 / det;
    g.grad[2][0] = -j21 / det;
    g.grad[2][1] = j11 / det;
    g.grad[0][0] = -(g.grad[1][0] + g.grad[2][0]);
    g.grad[0][1] = -(g.grad[1][1] + g.grad[2][1]);
    return g;
}

SpMat from_triplets(int rows, int cols, const Triplets& t)
{
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

} // namespace

std::string Mesh::id() const
{
    return std::to_string(dim) + "d-n" + std::to_string(n);
}

Vec Mesh::node_weights() const
{
    Vec w = Vec::Zero(num_nodes());
    const int nloc = dim + 1;
    for (const auto& el : elements) {
        const double share = element_geometry(*this, el).measure / nloc;
        for (int a = 0; a < nloc; ++a)
            w[el[a]] += share;
    }
    return w;
}

std::shared_ptr<const Mesh> build_mesh(int dim, int n)
{
    if (dim != 1 && dim != 2)
        throw Error(ErrorCode::InvalidResolution, "dimension must be 1 or 2");
    if (n < 2)
        throw Error(ErrorCode::InvalidResolution, "at least 2 subdivisions required, got " + std::to_string(n));

    auto mesh = std::make_shared<Mesh>();
    mesh->dim = dim;
    mesh->n = n;
    const double h = 1.0 / n;

    if (dim == 1) {
        mesh->h = h;
        for (int i = 0; i <= n; ++i)
            mesh->nodes.push_back({i * h, 0.0});
        for (int e = 0; e < n; ++e)
            mesh->elements.push_back({e, e + 1, -1});
        mesh->boundary_nodes = {0, n};
    } else {
        mesh->h = std::sqrt(2.0) * h;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                mesh->nodes.push_back({i * h, j * h});
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int n0 = j * (n + 1) + i;
                const int n1 = n0 + 1;
                const int n3 = n0 + (n + 1);
                const int n2 = n3 + 1;
                mesh->elements.push_back({n0, n1, n2});
                mesh->elements.push_back({n0, n2, n3});
            }
        }
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                if (i == 0 || j == 0 || i == n || j == n)
                    mesh->boundary_nodes.push_back(j * (n + 1) + i);
    }

    mesh->interior_index.assign(mesh->nodes.size(), -1);
    std::vector<bool> on_boundary(mesh->nodes.size(), false);
    for (int b : mesh->boundary_nodes)
        on_boundary[b] = true;
    int next = 0;
    for (int i = 0; i < mesh->num_nodes(); ++i)
        if (!on_boundary[i])
            mesh->interior_index[i] = next++;
    return mesh;
}

std::shared_ptr<const OperatorBundle> assemble_forms(std::shared_ptr<const Mesh> mesh, const PhysParams& params)
{
    const Mesh& m = *mesh;
    const int d = m.dim;
    const int nloc = d + 1;
    const int np = m.num_nodes();
    const int nu = m.displacement_dofs();
    const double lam = params.lambda_e;
    const double mu = params.mu;

    Triplets tMp, tAp, tKe, tMu, tMuL, tG, tD, tKdd;
    const double mass_scale = 1.0 / ((d + 1) * (d + 2));

    for (const auto& el : m.elements) {
        const ElementGeometry g = element_geometry(m, el);
        const double meas = g.measure;

        for (int a = 0; a < nloc; ++a) {
            for (int b = 0; b < nloc; ++b) {
                const double mab = meas * mass_scale * (a == b ? 2.0 : 1.0);
                double gg = 0.0;
                for (int c = 0; c < d; ++c)
                    gg += g.grad[a][c] * g.grad[b][c];
                tMp.emplace_back(el[a], el[b], mab);
                tAp.emplace_back(el[a], el[b], params.kappa * meas * gg);

                const int ia = m.interior_index[el[a]];
                const int ib = m.interior_index[el[b]];
                for (int c = 0; c < d; ++c) {
                    if (ia >= 0) {
                        tMuL.emplace_back(d * ia + c, d * el[b] + c, mab);
                        if (ib >= 0)
                            tMu.emplace_back(d * ia + c, d * ib + c, mab);
                    }
                }
                if (ia < 0 || ib < 0)
                    continue;
                for (int c = 0; c < d; ++c) {
                    for (int e = 0; e < d; ++e) {
                        const double div_div = g.grad[a][c] * g.grad[b][e];
                        double k = mu * g.grad[a][e] * g.grad[b][c] + lam * div_div;
                        if (c == e)
                            k += mu * gg;
                        tKe.emplace_back(d * ia + c, d * ib + e, meas * k);
                        tKdd.emplace_back(d * ia + c, d * ib + e, meas * div_div);
                    }
                }
            }
        }

        // (div psi_{a,c}, phi_b) and its negative transpose share one value
        for (int a = 0; a < nloc; ++a) {
            const int ia = m.interior_index[el[a]];
            if (ia < 0)
                continue;
            for (int c = 0; c < d; ++c) {
                const double v = g.grad[a][c] * meas / nloc;
                for (int b = 0; b < nloc; ++b) {
                    tD.emplace_back(el[b], d * ia + c, v);
                    tG.emplace_back(d * ia + c, el[b], -v);
                }
            }
        }
    }

    auto bundle = std::make_shared<OperatorBundle>();
    bundle->mesh = mesh;
    bundle->params = params;
    bundle->Mp = from_triplets(np, np, tMp);
    bundle->Ap = from_triplets(np, np, tAp);
    bundle->Ke = from_triplets(nu, nu, tKe);
    bundle->Mu = from_triplets(nu, nu, tMu);
    bundle->Mu_load = from_triplets(nu, d * np, tMuL);
    bundle->G = from_triplets(nu, np, tG);
    bundle->Ddiv = from_triplets(np, nu, tD);
    bundle->Kdivdiv = from_triplets(nu, nu, tKdd);
    bundle->meanvec = bundle->Mp * Vec::Ones(np);
    return bundle;
}

Vec nodal_values(const Mesh& mesh, const ScalarFn& f)
{
    Vec v(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        v[i] = f(mesh.nodes[i]);
    return v;
}

Vec nodal_values(const Mesh& mesh, const VectorFn& f)
{
    const int d = mesh.dim;
    Vec v(d * mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const auto val = f(mesh.nodes[i]);
        for (int c = 0; c < d; ++c)
            v[d * i + c] = val[c];
    }
    return v;
}

double mean_value(const Mesh& mesh, const Vec& p)
{
    return mesh.node_weights().dot(p) / mesh.volume();
}

Vec remove_mean(const Mesh& mesh, Vec p)
{
    p.array() -= mean_value(mesh, p);
    return p;
}

bool has_zero_mean(const Mesh& mesh, const Vec& p, double rel_tol)
{
    return std::abs(mesh.node_weights().dot(p)) <= rel_tol * p.norm();
}

FieldVec project_function(const Mesh& mesh, const ScalarFn& f, Space space)
{
    if (space == Space::PressureZeroMean)
        return FieldVec::pressure(remove_mean(mesh, nodal_values(mesh, f)));
    if (mesh.dim != 1)
        throw Error(ErrorCode::SpaceMismatch, "scalar displacement fields exist only in 1D");
    Vec u(mesh.num_interior());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.interior_index[i] >= 0)
            u[mesh.interior_index[i]] = f(mesh.nodes[i]);
    return FieldVec::displacement(std::move(u));
}

FieldVec project_function(const Mesh& mesh, const VectorFn& f)
{
    const int d = mesh.dim;
    Vec u(mesh.displacement_dofs());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const int ii = mesh.interior_index[i];
        if (ii < 0)
            continue;
        const auto val = f(mesh.nodes[i]);
        for (int c = 0; c < d; ++c)
            u[d * ii + c] = val[c];
    }
    return FieldVec::displacement(std::move(u));
}

Vec expand_displacement(const Mesh& mesh, const Vec& interior)
{
    const int d = mesh.dim;
    Vec full = Vec::Zero(d * mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const int ii = mesh.interior_index[i];
        if (ii < 0)
            continue;
        for (int c = 0; c < d; ++c)
            full[d * i + c] = interior[d * ii + c];
    }
    return full;
}

double norm(const OperatorBundle& bundle, const FieldVec& v, NormKind which)
{
    const bool pressure = v.space == Space::PressureZeroMean;
    const int expected = pressure ? bundle.np() : bundle.nu();
    if (v.coeffs.size() != expected)
        throw Error(ErrorCode::SpaceMismatch, "coefficient vector length does not match its space");
    const SpMat* M = nullptr;
    switch (which) {
    case NormKind::L2:
        M = pressure ? &bundle.Mp : &bundle.Mu;
        break;
    case NormKind::Vnorm:
        if (!pressure)
            throw Error(ErrorCode::SpaceMismatch, "Vnorm is defined on the pressure space");
        M = &bundle.Ap;
        break;
    case NormKind::Enorm:
        if (pressure)
            throw Error(ErrorCode::SpaceMismatch, "Enorm is defined on the displacement space");
        M = &bundle.Ke;
        break;
    }
    const double q = v.coeffs.dot(*M * v.coeffs);
    return std::sqrt(std::max(q, 0.0));
}

} // namespace pvlab

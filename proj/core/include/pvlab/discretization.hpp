#pragma once

#include "pvlab/model_config.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Point = std::array<double, 2>;

/// Uniform simplicial mesh of the unit interval (dim 1) or unit square (dim 2).
struct Mesh {
    int dim = 1;
    int n = 0; ///< subdivisions per side
    double h = 0.0;
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> elements; ///< first dim+1 entries used
    std::vector<int> boundary_nodes;
    std::vector<int> interior_index; ///< node -> interior slot, -1 on the boundary

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }
    int num_interior() const { return num_nodes() - static_cast<int>(boundary_nodes.size()); }
    int displacement_dofs() const { return dim * num_interior(); }
    std::string id() const;

    /// Integral of each nodal basis function; the mean-value functional.
    Vec node_weights() const;
    double volume() const { return 1.0; }
};

/// Throws InvalidResolution for n < 2 or dim outside {1, 2}.
std::shared_ptr<const Mesh> build_mesh(int dim, int n);

/// Discrete bilinear forms. Displacement unknowns are the interior nodes only
/// (Dirichlet rows/columns eliminated), interleaved by component in 2D.
/// Pressure unknowns are all nodes.
struct OperatorBundle {
    std::shared_ptr<const Mesh> mesh;
    PhysParams params;

    SpMat Ke;      ///< e(u, v) = (sigma(u), eps(v))
    SpMat Ap;      ///< a(p, q) = (kappa grad p, grad q)
    SpMat Mp;      ///< pressure mass
    SpMat Mu;      ///< displacement mass
    SpMat Mu_load; ///< displacement mass, interior rows by all-node columns (load assembly)
    SpMat G;       ///< (grad p, v), rows displacement, columns pressure
    SpMat Ddiv;    ///< (div u, q), rows pressure, columns displacement
    SpMat Kdivdiv; ///< (div u, div v)
    Vec meanvec;   ///< Mp * 1

    int np() const { return static_cast<int>(Mp.rows()); }
    int nu() const { return static_cast<int>(Ke.rows()); }
};

std::shared_ptr<const OperatorBundle> assemble_forms(std::shared_ptr<const Mesh> mesh, const PhysParams& params);

enum class Space { PressureZeroMean, Displacement };

struct FieldVec {
    Vec coeffs;
    Space space = Space::PressureZeroMean;

    static FieldVec pressure(Vec c) { return {std::move(c), Space::PressureZeroMean}; }
    static FieldVec displacement(Vec c) { return {std::move(c), Space::Displacement}; }
};

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<std::array<double, 2>(const Point&)>;

/// Nodal interpolation. PressureZeroMean subtracts the mass-weighted mean;
/// Displacement keeps interior nodes only (scalar form requires dim 1).
FieldVec project_function(const Mesh& mesh, const ScalarFn& f, Space space);
FieldVec project_function(const Mesh& mesh, const VectorFn& f);

/// Interpolant of f on every node, no mean removal (load assembly).
Vec nodal_values(const Mesh& mesh, const ScalarFn& f);
/// Interpolant of a vector field on every node, interleaved by component.
Vec nodal_values(const Mesh& mesh, const VectorFn& f);

/// Displacement coefficients expanded to all nodes with exact zeros on the boundary.
Vec expand_displacement(const Mesh& mesh, const Vec& interior);

double mean_value(const Mesh& mesh, const Vec& p);
Vec remove_mean(const Mesh& mesh, Vec p);
bool has_zero_mean(const Mesh& mesh, const Vec& p, double rel_tol = 1e-12);

enum class NormKind { L2, Vnorm, Enorm };

/// L2 = sqrt(v'Mv), Vnorm = sqrt(p'Ap p), Enorm = sqrt(u'Ke u).
double norm(const OperatorBundle& bundle, const FieldVec& v, NormKind which);

} // namespace pvlab

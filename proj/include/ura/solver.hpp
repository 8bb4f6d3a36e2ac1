// Cell-centered finite-volume discretization of L = -div(A grad u) with a
// possibly non-symmetric coefficient matrix: Dirichlet solves, elliptic
// measure, Green functions, the representation-identity residual, and
// coefficient utilities (ellipticity, Carleson norm, pullbacks).
#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <memory>

#include "ura/geometry.hpp"

namespace ura {

// ---------------------------------------------------------------------------
// Coefficients

struct CoefficientField {
  Grid grid;
  std::vector<double> a;  // 9 doubles per cell, row-major 3x3 block
  // Optional lower-order data (used by the monotonicity diagnostics only;
  // the discrete operator itself is pure divergence form).
  std::vector<double> b;  // 3 per cell
  std::vector<double> e;  // 3 per cell
  std::vector<double> d;  // 1 per cell
  double lambda = 1.0;    // declared ellipticity constant

  bool has_lower_order() const { return !b.empty() || !e.empty() || !d.empty(); }
  Mat at(long c) const {
    Mat m;
    std::copy(a.begin() + 9 * c, a.begin() + 9 * c + 9, m.m.begin());
    return m;
  }
  void set(long c, const Mat& m) { std::copy(m.m.begin(), m.m.end(), a.begin() + 9 * c); }
  Vec b_at(long c) const {
    return b.empty() ? Vec{} : Vec{{b[3 * c], b[3 * c + 1], b[3 * c + 2]}};
  }
  Vec e_at(long c) const {
    return e.empty() ? Vec{} : Vec{{e[3 * c], e[3 * c + 1], e[3 * c + 2]}};
  }
  double d_at(long c) const { return d.empty() ? 0.0 : d[c]; }
};

CoefficientField identity_coefficients(const Grid& grid);
CoefficientField constant_coefficients(const Grid& grid, const Mat& m);
// A(y) = Id + theta * |y - x0| * E  (E fixed; supply unit operator norm for
// a modulus that reads theta * r).
CoefficientField radial_linear_coefficients(const Grid& grid, double theta, const Mat& E,
                                            const Vec& x0);
// A(y) = Id + theta * delta(y) * E, delta from the domain's distance field.
CoefficientField delta_linear_coefficients(const Domain& domain, double theta, const Mat& E);
// A(y) = Id + amp * S(y) with S random symmetric per cell (rough, non-Carleson).
CoefficientField noise_coefficients(const Grid& grid, double amp, std::uint64_t seed);

// Largest of the two ellipticity ratios over sampled cells and directions:
// |xi|^2 / <A xi, xi>  and  |A xi| / |xi|.  Throws NotElliptic when a sampled
// quadratic form is non-positive.
double check_ellipticity(const CoefficientField& A, int samples, std::uint64_t seed);

// sup over sampled boundary balls B of r^-n Int_{B cap Omega} Lip(y) dy where
// Lip(y) bounds the local Lipschitz quotient of the entries over
// B(y, M delta(y)) restricted to delta(z) >= delta(y)/4.
struct CarlesonNormReport {
  double norm = 0;
  double worst_radius = 0;
};
CarlesonNormReport coefficient_carleson_norm(const CoefficientField& A, const BoundarySet& set,
                                             const Domain& domain, int ball_samples, double M,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Discrete operator

struct DiscreteOperator {
  Grid grid;
  int dim = 2;
  std::vector<long> interior_cells;  // ascending cell ids
  std::vector<long> boundary_cells;  // ascending cell ids (the set's cells)
  std::vector<std::int32_t> interior_index;  // per grid cell, -1 when not interior
  std::vector<std::int32_t> boundary_index;
  Eigen::SparseMatrix<double> A_ii;  // operator-scaled interior block
  Eigen::SparseMatrix<double> A_ib;  // coupling to boundary values

  // Shared lazily-built factorizations (direct or preconditioned Krylov).
  struct Backend;
  std::shared_ptr<Backend> backend;

  long n_interior() const { return static_cast<long>(interior_cells.size()); }

  // Solve A_ii x = rhs (or the transpose system).  Relative residual is
  // checked against 1e-10; SolveFailure otherwise.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, bool transpose) const;
};

DiscreteOperator assemble_operator(const CoefficientField& A, const Domain& domain);

// Dirichlet solve: boundary data g given per boundary cell (aligned with
// op.boundary_cells).  Returns the full grid field (g on boundary cells).
struct DirichletReport {
  GridField u;
  double residual = 0;         // relative algebraic residual
  double max_principle_violation = 0;  // how far u exits [min g, max g]
};
DirichletReport solve_dirichlet(const DiscreteOperator& op, const std::vector<double>& g);

// Convenience: data given as a function of the boundary-cell center.
DirichletReport solve_dirichlet(const DiscreteOperator& op,
                                const std::function<double(const Vec&)>& g);

// ---------------------------------------------------------------------------
// Elliptic measure and Green function

struct EllipticMeasure {
  Vec pole;
  long pole_cell = -1;
  std::vector<double> omega;  // aligned with op.boundary_cells == set.cells
  double mass_error = 0;      // |sum - 1| before renormalization
  double worst_negative = 0;  // most negative raw entry (clamped afterwards)
  bool adjoint = false;       // measure of the transpose operator

  double total() const;
  // Measure of the cells within the closed ball B(x,r).
  double of_ball(const BoundarySet& set, const Vec& x, double r) const;
  // Measure of a list of set-cell ordinals.
  double of_cells(const std::vector<int>& ordinals) const;
};

// One transpose (resp. direct) solve yields the measure on every boundary
// cell simultaneously.  adjoint=true gives the measure of L^T.
EllipticMeasure elliptic_measure(const DiscreteOperator& op, const Domain& domain, const Vec& pole,
                                 bool adjoint = false);

struct GreenTable {
  Vec pole;
  long pole_cell = -1;
  GridField values;
  bool adjoint = false;  // table of G_{L^T}(pole, .) instead of G_L(pole, .)
  double min_value = 0;  // most negative entry (diagnostic)
};

// G(pole, y) as a field in y; vanishes on boundary cells by construction and
// satisfies the discrete transpose identity G_L(x,y) = G_{L^T}(y,x) exactly.
GreenTable green_function(const DiscreteOperator& op, const Domain& domain, const Vec& pole,
                          bool adjoint = false);

// |Int phi d omega^pole - phi(pole) + Int A^T grad_y G(pole,y) . grad phi dy|
// normalized by max |phi|.
double riesz_identity_residual(const CoefficientField& A, const DiscreteOperator& op,
                               const Domain& domain, const Vec& pole, const GridField& phi);

// ---------------------------------------------------------------------------
// Pullbacks

struct LinearMap {
  Mat M;       // Phi(z) = M z + shift
  Vec shift;
};

// A-tilde = |det M| M^-1 (A o Phi) M^-T on the pulled-back grid.
CoefficientField pullback_matrix(const CoefficientField& A, const LinearMap& Phi);

struct NormalizedPullback {
  Mat S;                   // sqrt of A_s(y0)
  CoefficientField field;  // S^-1 (A o S)(.) S^-1
  Vec z0;                  // S^-1 y0, where the symmetric part is Id
};
NormalizedPullback pullback_normalize(const CoefficientField& A, const Vec& y0);

// ---------------------------------------------------------------------------
// Binary grid-field format (header: dims, h, origin; row-major f64 payload)

void save_grid_field(const GridField& f, const std::string& path);
GridField load_grid_field(const std::string& path);

}  // namespace ura

#pragma once

#include <functional>
#include <vector>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "pwdarcy/geometry.hpp"
#include "pwdarcy/gfield.hpp"
#include "pwdarcy/grid.hpp"

namespace pwdarcy {

/// Piecewise log-permeability u^a = sum_i u_i 1_{A_i(a)} as nodal values plus
/// the owning region index per node.
struct PiecewiseField {
  Eigen::MatrixXd values;
  Eigen::MatrixXi region;
};

PiecewiseField construct(const std::vector<SpectralField>& fields,
                         const RegionMasks& masks, const Grid& grid);
PiecewiseField construct(const std::vector<SpectralField>& fields,
                         const GeometryModel& model, const Eigen::VectorXd& a,
                         const Grid& grid);

/// Source and Dirichlet boundary data for the pressure equation. The
/// coefficient map sigma is fixed to exp.
struct PdeProblem {
  enum class GKind { coord_x, coord_y, constant };
  double f_value = 0.0;        // constant source term
  GKind g_kind = GKind::coord_x;
  double g_value = 1.0;        // scale for coordinate kinds, value for constant

  Eigen::MatrixXd nodal_f(const Grid& grid) const;
  Eigen::MatrixXd nodal_g(const Grid& grid) const;
};

/// Five-point finite-difference operator -div(kappa grad p) with Dirichlet
/// rows eliminated and harmonic-mean edge conductivities. Holds the sparse
/// factorization so repeated solves with one kappa (forward plus adjoints)
/// factorize once.
class DarcyOperator {
 public:
  explicit DarcyOperator(const Grid& grid);

  // copies start unfactorized; the factorization itself is never shared
  DarcyOperator(const DarcyOperator& other) : DarcyOperator(other.grid_) {}
  DarcyOperator& operator=(const DarcyOperator&) = delete;

  /// Assemble and factorize for the given nodal permeability (> 0 everywhere).
  void factorize(const Eigen::MatrixXd& kappa);

  /// Solve with nodal source f and Dirichlet data g; returns full nodal
  /// pressure. Fails if the relative residual exceeds 1e-10.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const;

  /// Solve A q = rhs restricted to interior nodes, zero Dirichlet boundary.
  Eigen::MatrixXd adjoint_solve(const Eigen::MatrixXd& rhs) const;

  const Eigen::MatrixXd& kappa() const { return kappa_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::MatrixXd kappa_;
  Eigen::MatrixXd wx_, wy_;  // harmonic edge conductivities
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

/// One-shot pressure solve.
Eigen::MatrixXd solve_pressure(const Grid& grid, const Eigen::MatrixXd& kappa,
                               const Eigen::MatrixXd& f, const Eigen::MatrixXd& g);

/// dPhi/dkappa at every node given pressure p and an adjoint state lam
/// (zero on the boundary): the edge-wise sensitivity of the assembled system.
Eigen::MatrixXd kappa_sensitivity(const DarcyOperator& op, const Eigen::MatrixXd& p,
                                  const Eigen::MatrixXd& lam);

/// Mollified point observations, Eq.-(4) style Gaussian weights with variance
/// epsilon, renormalized so a constant pressure is observed exactly.
struct ObservationSetup {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  double epsilon = 0.05;
  double gamma = 0.01;

  /// count = k^2 interior lattice points at (i/(k+1), j/(k+1)), y-major order.
  static ObservationSetup lattice(int count, double epsilon, double gamma);
  void validate() const;
};

class Observer {
 public:
  Observer(const ObservationSetup& setup, const Grid& grid);

  Eigen::VectorXd observe(const Eigen::MatrixXd& pressure) const;
  const Eigen::MatrixXd& weight(int j) const { return weights_[j]; }
  int count() const { return static_cast<int>(weights_.size()); }
  const ObservationSetup& setup() const { return setup_; }

 private:
  ObservationSetup setup_;
  std::vector<Eigen::MatrixXd> weights_;
};

struct BoundCheck {
  double lhs = 0, rhs = 0;
  double f_dual = 0, g_norm = 0, kappa_min = 0, kappa_max = 0;
  bool holds = false;
};

/// The composed forward map (u, a) -> u^a -> kappa = exp(u^a) -> p -> l(p)
/// on one grid. Not safe for concurrent calls on one instance; parallel
/// callers each take a copy.
class ForwardModel {
 public:
  ForwardModel(const Grid& grid, const GeometryModel& model, const PdeProblem& problem,
               const ObservationSetup& obs);

  const Grid& grid() const { return grid_; }
  const GeometryModel& geometry() const { return model_; }
  const Observer& observer() const { return observer_; }
  double gamma() const { return observer_.setup().gamma; }
  const PdeProblem& problem() const { return problem_; }

  Eigen::MatrixXd construct_ua(const std::vector<SpectralField>& fields,
                               const Eigen::VectorXd& a) const;

  Eigen::VectorXd predict(const std::vector<SpectralField>& fields,
                          const Eigen::VectorXd& a);
  Eigen::VectorXd predict_from_ua(const Eigen::MatrixXd& u_a);

  double potential(const std::vector<SpectralField>& fields, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& y);
  double potential_from_ua(const Eigen::MatrixXd& u_a, const Eigen::VectorXd& y);

  /// Closure evaluating Phi(u^a; y); what the samplers and optimizers consume.
  std::function<double(const Eigen::MatrixXd&)> potential_fn(const Eigen::VectorXd& y);

  /// Coefficient-space gradient of Phi for every field: one combined adjoint
  /// solve, edge sensitivity, chain rule through exp and the region masks,
  /// projection onto the cosine basis.
  std::vector<Eigen::MatrixXd> grad_phi_fields(const std::vector<SpectralField>& fields,
                                               const Eigen::VectorXd& a,
                                               const Eigen::VectorXd& y);

  /// Jacobian of the observations with respect to the fluctuation
  /// coefficients of one field (row j from the adjoint solve for point j).
  /// Columns follow flatten_fluctuation ordering.
  Eigen::MatrixXd observation_jacobian(const std::vector<SpectralField>& fields,
                                       const Eigen::VectorXd& a, int field_index);

  /// Numerical check of the a-priori solution bound
  /// ||p||_V <= (||f||_{V*} + ||sigma(u^a)||_inf ||G||_V) / kappa_min + ||G||_V
  /// with G the discrete harmonic extension of g.
  BoundCheck solution_bound_check(const std::vector<SpectralField>& fields,
                                  const Eigen::VectorXd& a);

  long solve_count() const { return solves_; }

 private:
  Grid grid_;
  GeometryModel model_;
  PdeProblem problem_;
  Observer observer_;
  Eigen::MatrixXd f_nodal_, g_nodal_;
  Eigen::MatrixXd harmonic_g_;  // discrete harmonic extension of g
  double g_norm_ = 0, f_dual_ = 0;
  DarcyOperator op_;
  long solves_ = 0;
};

/// Fluctuation coefficients as a vector, row-major with the (0,0) slot
/// dropped: entry q <-> (k,l) with q = k*(M+1) + l - 1.
Eigen::VectorXd flatten_fluctuation(const Eigen::MatrixXd& coeffs);
Eigen::MatrixXd unflatten_fluctuation(const Eigen::VectorXd& v, int truncation);

}  // namespace pwdarcy

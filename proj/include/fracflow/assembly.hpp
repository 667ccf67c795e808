#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracflow/levelset.hpp"
#include "fracflow/mesh.hpp"
#include "fracflow/scenario.hpp"
#include "fracflow/solve.hpp"
#include "fracflow/solution.hpp"
#include "fracflow/sparse.hpp"

namespace fracflow {

/// Stabilization alpha_h on one cell. Positive for any admissible input.
double stabilization(CellClass cls, double h, const PenaltyParams& params,
                     double Km);

/// The four local equation rows of the scheme on one cell, kept as written:
///
///   (a) Auu  u  + Auut ut                          = 0
///   (b)            Autut ut + Bup p + Buf phat     = 0
///   (c) Cpu  u             + Cpp p + Cpf phat      = load
///   (d) Du   u             + Dp  p + Df  phat        (cell's share of the
///                                                      facet equation)
///
/// u is the total velocity, ut the matrix velocity -K grad p, p the cell
/// pressure (vector DOF layout [x-components; y-components]), phat the
/// facet pressures of the cell's three facets stacked in cell_facets order.
/// Row (a) carries the fracture surface terms: the blocking form
/// (eps/k)(u.n)(v.n) on the left, the conductive tangential form
/// eps k (K^-1 u)_t . (K^-1 v)_t on the right; classification guarantees a
/// cell never carries both.
struct LocalSystem {
  int degree = 1;
  int m = 0;   // scalar cell space dimension
  int nf = 0;  // 3 * (degree + 1)
  std::array<int, 3> facet_ids{};

  Eigen::MatrixXd Auu, Auut;
  Eigen::MatrixXd Autut, Bup, Buf;
  Eigen::MatrixXd Cpu, Cpp, Cpf;
  Eigen::VectorXd load;
  Eigen::MatrixXd Du, Dp, Df;
};

LocalSystem build_local(const Mesh& mesh, int cell,
                        const CellClassification& classes,
                        const Scenario& scenario, const PenaltyParams& params,
                        int degree);

/// Dense per-cell recovery of the eliminated unknowns from the facet values:
///   p  = Rp phat + sp
///   u  = Wp p + Wf phat
///   ut = Tp p + Tf phat
struct CellRecovery {
  Eigen::MatrixXd Rp, Wp, Wf, Tp, Tf;
  Eigen::VectorXd sp;
};

/// Cell contribution to the condensed facet problem: the global system is
/// sum_K S_K (positive semidefinite blocks) with right-hand side
/// sum_K t_K minus the Neumann data term.
struct CondensedCell {
  Eigen::MatrixXd S;
  Eigen::VectorXd t;
  CellRecovery recovery;
};

/// Eliminates (u, ut, p) cell by cell. Throws NumericalError if a local
/// block is not invertible (degenerate data such as K_m <= 0).
CondensedCell condense(const LocalSystem& local);

struct CondensedSystem {
  const Mesh* mesh = nullptr;
  const CellClassification* classes = nullptr;
  const Scenario* scenario = nullptr;
  PenaltyParams params;
  int degree = 1;

  int ndof_total = 0;  // n_facets * (degree + 1)
  int ndof_free = 0;
  SparseSym A;            // reduced SPD facet system
  std::vector<double> b;
  std::vector<int> dof_map;              // full dof -> reduced index, -1 Dirichlet
  std::vector<double> dirichlet_values;  // full length; datum projections
  std::vector<CellRecovery> recovery;
  std::vector<double> alpha;  // per-cell stabilization
};

/// Builds and condenses all local systems, projects Dirichlet data onto the
/// facet spaces, eliminates Dirichlet DOFs and adds Neumann data. Requires
/// every boundary facet to carry a tag known to the scenario.
CondensedSystem assemble(const Mesh& mesh, const CellClassification& classes,
                         const Scenario& scenario, const PenaltyParams& params,
                         int degree);

/// Expands the facet solution of the reduced system into cellwise
/// (u, ut, p) plus the full facet pressure (Dirichlet values included).
HDGSolution recover(const CondensedSystem& sys,
                    std::span<const double> facet_solution);

}  // namespace fracflow

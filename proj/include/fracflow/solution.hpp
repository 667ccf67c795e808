#pragma once

#include <vector>

#include "fracflow/levelset.hpp"
#include "fracflow/mesh.hpp"
#include "fracflow/scenario.hpp"

namespace fracflow {

/// Discrete solution in coefficient form. Cell fields are stored
/// contiguously per cell: u and u_tilde use 2m coefficients per cell
/// ([x block; y block] against the scalar cell basis), p uses m, p_hat uses
/// degree+1 per facet, p_star (filled by the postprocessor) uses the
/// dimension of P_{degree+1}. The referenced mesh, classification and
/// scenario must outlive the solution.
struct HDGSolution {
  const Mesh* mesh = nullptr;
  const CellClassification* classes = nullptr;
  const Scenario* scenario = nullptr;
  PenaltyParams params;
  int degree = 1;

  std::vector<double> u;
  std::vector<double> u_tilde;
  std::vector<double> p;
  std::vector<double> p_hat;
  std::vector<double> p_star;
  std::vector<double> alpha;  // per cell

  int cell_dim() const;    // m
  int star_dim() const;    // dim P_{degree+1}
  int facet_dim() const;   // degree + 1
};

}  // namespace fracflow

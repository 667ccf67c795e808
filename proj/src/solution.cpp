#include "fracflow/solution.hpp"

#include "fracflow/basis.hpp"

namespace fracflow {

int HDGSolution::cell_dim() const { return cell_space_dim(degree); }
int HDGSolution::star_dim() const { return cell_space_dim(degree + 1); }
int HDGSolution::facet_dim() const { return degree + 1; }

}  // namespace fracflow

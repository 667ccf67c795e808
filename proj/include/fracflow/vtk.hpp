#pragma once

#include <iosfwd>

#include "fracflow/solution.hpp"

namespace fracflow {

/// Legacy ASCII VTK field dump: cell data p_star (cell mean), cell class
/// (0 regular, 1 blocking, 2 conductive), |u| (magnitude of the cell mean),
/// plus vertex-averaged p_star as point data for contouring.
void write_fields_vtk(const HDGSolution& sol, std::ostream& out);

}  // namespace fracflow

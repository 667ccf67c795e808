#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fracflow/geometry2d.hpp"
#include "fracflow/mesh.hpp"

namespace fracflow {

enum class FractureKind { blocking, conductive };

/// A straight fracture segment with aperture (thickness) and tangential
/// permeability. The segment carries a fixed unit normal n = perp(t) with
/// t = (b - a)/|b - a|.
struct FractureSpec {
  Vec2 a;
  Vec2 b;
  double thickness = 0.0;     // epsilon_i
  double permeability = 0.0;  // k_i
  FractureKind kind = FractureKind::conductive;

  Vec2 tangent() const { return normalized(b - a); }
  Vec2 normal() const { return perp(tangent()); }
  double length() const { return dist(a, b); }
};

/// Piecewise-linear level-set representation of one fracture on a mesh:
/// phi is the signed distance to the fracture's infinite line, and the two
/// clip functions psi cut the line down to the segment:
///   psi1(x) = (a - x) . t,  psi2(x) = (x - b) . t,
/// so the fracture is { phi = 0 } intersected with { psi1 < 0, psi2 < 0 }.
/// Nodal values within eps_perturb of zero are pushed to +eps_perturb so that
/// cuts through vertices and mesh-aligned fractures are handled
/// deterministically without double counting. Chords shorter than eps_geom
/// are treated as no cut: vertex-touching cells otherwise acquire
/// O(eps_perturb)-length cuts whose surface integrals are negligible but
/// whose cell classification would flip the stabilization by orders of
/// magnitude. eps_geom is chosen several orders above eps_perturb so those
/// artifacts are dropped with a wide margin.
struct DiscreteFracture {
  std::vector<double> phi;               // one value per mesh vertex
  std::array<std::vector<double>, 2> psi;
  Vec2 a;  // physical segment endpoints, kept for touch classification
  Vec2 b;
  Vec2 normal;
  Vec2 tangent;
  double eps_perturb = 0.0;
  double eps_geom = 0.0;
};

DiscreteFracture discretize_fracture(const FractureSpec& spec,
                                     const Mesh& mesh);

struct CutSegment {
  Vec2 p0;
  Vec2 p1;
  double length = 0.0;
};

/// Intersection of one fracture with one cell: a straight segment (the level
/// sets are affine per cell). Empty when the cell is not crossed, when the
/// psi clips remove the whole chord, or when the clipped piece is shorter
/// than eps_geom.
std::optional<CutSegment> cut_segment(const Mesh& mesh, int cell,
                                      const DiscreteFracture& fracture);

enum class CellClass { regular, blocking, conductive };

struct FractureCut {
  int fracture = -1;  // index into the scenario's fracture list
  Vec2 p0;
  Vec2 p1;
  double length = 0.0;
};

struct CellClassification {
  std::vector<CellClass> class_of;            // per cell
  std::vector<std::vector<FractureCut>> cuts; // per cell

  int n_of(CellClass c) const;
};

/// Splits T_h into regular / blocking / conductive cells. A cell counts as
/// cut by a fracture when its closed triangle meets the closed physical
/// segment: either the level sets produce a chord, or the segment merely
/// touches the cell at a vertex or runs along one of its edges. Touching
/// cells record a zero-length cut (no surface term, classification only).
/// Classifying them is essential for fractures aligned with mesh facets:
/// the chord always lands on one side of the facet, and without the
/// touching neighbours the stabilization band around the fracture would be
/// connected only through vertices, throttling the along-fracture flow.
/// A cell crossed by any blocking fracture is blocking and keeps only its
/// blocking cuts (conductive cuts in such cells are dropped); otherwise a
/// crossed cell is conductive. The result is independent of cell and
/// fracture ordering.
CellClassification classify_cells(const Mesh& mesh,
                                  std::span<const DiscreteFracture> fractures,
                                  std::span<const FractureKind> kinds);

/// Debug dump: one line per cut, "cell,fracture,x0,y0,x1,y1,length".
void dump_cuts_csv(const CellClassification& classes, std::ostream& out);

}  // namespace fracflow

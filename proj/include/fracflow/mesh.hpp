#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fracflow/geometry2d.hpp"

namespace fracflow {

struct FractureSpec;

/// One edge of the triangulation. Interior facets belong to two cells,
/// boundary facets to one. The global facet parameterization used for facet
/// polynomial spaces runs from vertex v0 to vertex v1 with v0 < v1, so both
/// incident cells see the same facet basis.
struct Facet {
  int v0 = -1;
  int v1 = -1;
  std::array<int, 2> cells{-1, -1};

  bool is_boundary() const { return cells[1] < 0; }
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;  // counterclockwise vertex triples
  std::vector<Facet> facets;
  // cell_facets[c][i] is the facet opposite local vertex i of cell c.
  std::vector<std::array<int, 3>> cell_facets;
  // Boundary tag per facet: index into boundary_names, -1 for interior facets.
  std::vector<int> facet_tag;
  std::vector<std::string> boundary_names;
  Rect domain;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_facets() const { return static_cast<int>(facets.size()); }

  Vec2 vertex(int v) const { return vertices[static_cast<std::size_t>(v)]; }
  std::array<Vec2, 3> cell_vertices(int c) const;
  Vec2 cell_centroid(int c) const;
  double cell_area(int c) const;
  /// Longest edge length; the h_K entering the stabilization.
  double cell_diameter(int c) const;

  double facet_length(int f) const;
  Vec2 facet_point(int f, double t) const;  // global parameterization, t in [0,1]
  /// Unit normal of facet f pointing out of cell c (c must be incident).
  Vec2 facet_outward_normal(int f, int c) const;

  const std::string& tag_name(int f) const;

  /// Rebuilds facets and cell_facets from the cell list. Clears facet tags.
  void rebuild_topology();
  /// Total mesh area (sum of cell areas).
  double total_area() const;
};

/// Structured triangulation of a rectangle: nx-by-ny quads, each split along
/// the lower-left to upper-right diagonal. Boundary facets are tagged
/// "left", "right", "bottom", "top".
Mesh build_uniform_triangulation(int nx, int ny, const Rect& domain);

/// Tags boundary facets by which side of `mesh.domain` they lie on.
/// Facets not on any side are an error (non-rectangular boundary).
void tag_boundary_by_rect(Mesh& mesh);

struct BisectionResult {
  Mesh mesh;
  std::vector<int> parent;  // new cell -> cell index in the input mesh
};

/// Refines every marked cell by splitting all three of its edges
/// (quadrisection realized through recursive longest-edge bisection), with
/// recursive closure so the result is conforming. Diameters of marked cells
/// are halved. Boundary tags are inherited by sub-facets.
BisectionResult bisect(const Mesh& mesh, const std::vector<int>& marked);

/// `steps` rounds of: classify cells against the fractures, mark every
/// blocking/conductive cell, bisect. Each round halves the mesh size near
/// the fractures.
Mesh refine_near_fractures(const Mesh& mesh,
                           std::span<const FractureSpec> fractures, int steps);

/// Legacy ASCII VTK dump of the triangulation (UNSTRUCTURED_GRID).
void write_mesh_vtk(const Mesh& mesh, std::ostream& out);

}  // namespace fracflow

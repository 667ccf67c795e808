#include "fracflow/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "fracflow/basis.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

namespace {

void print_value(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g\n", v);
  out << buf;
}

}  // namespace

void write_fields_vtk(const HDGSolution& sol, std::ostream& out) {
  const Mesh& mesh = *sol.mesh;
  if (sol.p_star.empty())
    throw ConfigError("write_fields_vtk: postprocessed pressure missing");
  const int m = sol.cell_dim();
  const int ms = sol.star_dim();
  const CellBasis basis_k(sol.degree);
  const CellBasis basis_s(sol.degree + 1);
  const TriangleQuadrature rule = triangle_quadrature(2 * sol.degree + 2);

  // Cell means of p_star and u, and vertex averages of p_star.
  std::vector<double> p_mean(static_cast<std::size_t>(mesh.n_cells()), 0.0);
  std::vector<double> u_mag(static_cast<std::size_t>(mesh.n_cells()), 0.0);
  std::vector<double> vertex_p(static_cast<std::size_t>(mesh.n_vertices()),
                               0.0);
  std::vector<int> vertex_count(static_cast<std::size_t>(mesh.n_vertices()),
                                0);
  std::vector<double> vals_s(static_cast<std::size_t>(ms));
  std::vector<double> vals_k(static_cast<std::size_t>(m));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const auto v = mesh.cell_vertices(cell);
    const TriFrame frame = tri_frame(v[0], v[1], v[2]);
    const double* ps = sol.p_star.data() + static_cast<std::size_t>(cell) *
                                               static_cast<std::size_t>(ms);
    const double* uc = sol.u.data() + static_cast<std::size_t>(cell) * 2 *
                                          static_cast<std::size_t>(m);
    double pint = 0.0;
    Vec2 uint_{0.0, 0.0};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * frame.det;
      basis_s.eval(rule.points[q], vals_s);
      basis_k.eval(rule.points[q], vals_k);
      double pv = 0.0;
      for (int i = 0; i < ms; ++i)
        pv += ps[i] * vals_s[static_cast<std::size_t>(i)];
      pint += w * pv;
      Vec2 uv{0.0, 0.0};
      for (int i = 0; i < m; ++i) {
        uv.x += uc[i] * vals_k[static_cast<std::size_t>(i)];
        uv.y += uc[m + i] * vals_k[static_cast<std::size_t>(i)];
      }
      uint_ = uint_ + w * uv;
    }
    const double area = 0.5 * frame.det;
    p_mean[static_cast<std::size_t>(cell)] = pint / area;
    u_mag[static_cast<std::size_t>(cell)] = norm(uint_ / area);
    const auto& cv = mesh.cells[static_cast<std::size_t>(cell)];
    for (int lv = 0; lv < 3; ++lv) {
      const Vec2 r = frame.to_reference(mesh.vertex(cv[static_cast<std::size_t>(lv)]));
      basis_s.eval(r, vals_s);
      double pv = 0.0;
      for (int i = 0; i < ms; ++i)
        pv += ps[i] * vals_s[static_cast<std::size_t>(i)];
      vertex_p[static_cast<std::size_t>(cv[static_cast<std::size_t>(lv)])] += pv;
      ++vertex_count[static_cast<std::size_t>(cv[static_cast<std::size_t>(lv)])];
    }
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (vertex_count[static_cast<std::size_t>(v)] > 0)
      vertex_p[static_cast<std::size_t>(v)] /=
          vertex_count[static_cast<std::size_t>(v)];

  out << "# vtk DataFile Version 3.0\n";
  out << "pressure and velocity fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", v.x, v.y);
    out << buf;
  }
  out << "CELLS " << mesh.n_cells() << " " << 4 * mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells)
    out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out << "5\n";

  out << "CELL_DATA " << mesh.n_cells() << "\n";
  out << "SCALARS p_star double 1\nLOOKUP_TABLE default\n";
  for (double v : p_mean) print_value(out, v);
  out << "SCALARS cell_class int 1\nLOOKUP_TABLE default\n";
  for (int cell = 0; cell < mesh.n_cells(); ++cell)
    out << static_cast<int>(
               sol.classes->class_of[static_cast<std::size_t>(cell)])
        << "\n";
  out << "SCALARS u_magnitude double 1\nLOOKUP_TABLE default\n";
  for (double v : u_mag) print_value(out, v);

  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "SCALARS p_star_vertex double 1\nLOOKUP_TABLE default\n";
  for (double v : vertex_p) print_value(out, v);
}

}  // namespace fracflow

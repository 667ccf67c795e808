#include "fracflow/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "fracflow/errors.hpp"
#include "fracflow/levelset.hpp"

namespace fracflow {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

std::array<Vec2, 3> Mesh::cell_vertices(int c) const {
  const auto& k = cells[static_cast<std::size_t>(c)];
  return {vertices[static_cast<std::size_t>(k[0])],
          vertices[static_cast<std::size_t>(k[1])],
          vertices[static_cast<std::size_t>(k[2])]};
}

Vec2 Mesh::cell_centroid(int c) const {
  const auto v = cell_vertices(c);
  return (v[0] + v[1] + v[2]) / 3.0;
}

double Mesh::cell_area(int c) const {
  const auto v = cell_vertices(c);
  return signed_area(v[0], v[1], v[2]);
}

double Mesh::cell_diameter(int c) const {
  const auto v = cell_vertices(c);
  return std::max({dist(v[0], v[1]), dist(v[1], v[2]), dist(v[2], v[0])});
}

double Mesh::facet_length(int f) const {
  const Facet& e = facets[static_cast<std::size_t>(f)];
  return dist(vertex(e.v0), vertex(e.v1));
}

Vec2 Mesh::facet_point(int f, double t) const {
  const Facet& e = facets[static_cast<std::size_t>(f)];
  return vertex(e.v0) + t * (vertex(e.v1) - vertex(e.v0));
}

Vec2 Mesh::facet_outward_normal(int f, int c) const {
  const Facet& e = facets[static_cast<std::size_t>(f)];
  const Vec2 d = normalized(vertex(e.v1) - vertex(e.v0));
  // Candidate normal; flip it toward the outside of cell c using the
  // opposite vertex.
  Vec2 n{d.y, -d.x};
  const auto& k = cells[static_cast<std::size_t>(c)];
  int opposite = -1;
  for (int i = 0; i < 3; ++i) {
    if (k[static_cast<std::size_t>(i)] != e.v0 &&
        k[static_cast<std::size_t>(i)] != e.v1) {
      opposite = k[static_cast<std::size_t>(i)];
    }
  }
  if (opposite < 0) throw NumericalError("facet_outward_normal: facet not incident to cell");
  if (dot(n, vertex(opposite) - vertex(e.v0)) > 0.0) n = {-n.x, -n.y};
  return n;
}

const std::string& Mesh::tag_name(int f) const {
  static const std::string interior = "";
  const int t = facet_tag[static_cast<std::size_t>(f)];
  return t < 0 ? interior : boundary_names[static_cast<std::size_t>(t)];
}

void Mesh::rebuild_topology() {
  facets.clear();
  cell_facets.assign(cells.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(cells.size() * 2);
  for (int c = 0; c < n_cells(); ++c) {
    const auto& k = cells[static_cast<std::size_t>(c)];
    for (int i = 0; i < 3; ++i) {
      const int a = k[static_cast<std::size_t>((i + 1) % 3)];
      const int b = k[static_cast<std::size_t>((i + 2) % 3)];
      const auto key = edge_key(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        Facet e;
        e.v0 = std::min(a, b);
        e.v1 = std::max(a, b);
        e.cells[0] = c;
        index.emplace(key, n_facets());
        cell_facets[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
            n_facets();
        facets.push_back(e);
      } else {
        Facet& e = facets[static_cast<std::size_t>(it->second)];
        if (e.cells[1] >= 0) throw NumericalError("mesh: edge shared by more than two cells");
        e.cells[1] = c;
        cell_facets[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
            it->second;
      }
    }
  }
  facet_tag.assign(facets.size(), -1);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < n_cells(); ++c) a += cell_area(c);
  return a;
}

Mesh build_uniform_triangulation(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) throw ConfigError("mesh: nx and ny must be at least 1");
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw ConfigError("mesh: degenerate domain rectangle");

  Mesh m;
  m.domain = domain;
  m.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x =
          (i == nx) ? domain.xmax : domain.xmin + domain.width() * i / nx;
      const double y =
          (j == ny) ? domain.ymax : domain.ymin + domain.height() * j / ny;
      m.vertices.push_back({x, y});
    }
  }
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.cells.push_back({v00, v10, v11});
      m.cells.push_back({v00, v11, v01});
    }
  }
  m.rebuild_topology();
  tag_boundary_by_rect(m);
  return m;
}

void tag_boundary_by_rect(Mesh& mesh) {
  mesh.boundary_names = {"left", "right", "bottom", "top"};
  const double tol = 1e-12 * std::max(1.0, mesh.domain.diameter());
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const Facet& e = mesh.facets[static_cast<std::size_t>(f)];
    if (!e.is_boundary()) continue;
    const Vec2 a = mesh.vertex(e.v0);
    const Vec2 b = mesh.vertex(e.v1);
    int tag = -1;
    if (std::abs(a.x - mesh.domain.xmin) < tol &&
        std::abs(b.x - mesh.domain.xmin) < tol)
      tag = 0;
    else if (std::abs(a.x - mesh.domain.xmax) < tol &&
             std::abs(b.x - mesh.domain.xmax) < tol)
      tag = 1;
    else if (std::abs(a.y - mesh.domain.ymin) < tol &&
             std::abs(b.y - mesh.domain.ymin) < tol)
      tag = 2;
    else if (std::abs(a.y - mesh.domain.ymax) < tol &&
             std::abs(b.y - mesh.domain.ymax) < tol)
      tag = 3;
    if (tag < 0)
      throw ConfigError("mesh: boundary facet not on the domain rectangle");
    mesh.facet_tag[static_cast<std::size_t>(f)] = tag;
  }
}

namespace {

struct WorkCell {
  std::array<int, 3> v;
  int origin;
  bool alive;
};

// Local index of the longest edge (the edge opposite local vertex i).
// Ties break toward the smaller sorted vertex pair so refinement is
// independent of traversal order.
int longest_edge(const WorkCell& k, const std::vector<Vec2>& verts) {
  int best = -1;
  double best_len = -1.0;
  std::pair<int, int> best_pair{0, 0};
  for (int i = 0; i < 3; ++i) {
    const int a = k.v[static_cast<std::size_t>((i + 1) % 3)];
    const int b = k.v[static_cast<std::size_t>((i + 2) % 3)];
    const double len = dist(verts[static_cast<std::size_t>(a)],
                            verts[static_cast<std::size_t>(b)]);
    std::pair<int, int> pr{std::min(a, b), std::max(a, b)};
    if (len > best_len || (len == best_len && pr < best_pair)) {
      best = i;
      best_len = len;
      best_pair = pr;
    }
  }
  return best;
}

}  // namespace

BisectionResult bisect(const Mesh& mesh, const std::vector<int>& marked) {
  for (int c : marked)
    if (c < 0 || c >= mesh.n_cells())
      throw ConfigError("bisect: marked cell index out of range");

  if (marked.empty()) {
    BisectionResult r{mesh, {}};
    r.parent.resize(static_cast<std::size_t>(mesh.n_cells()));
    for (int c = 0; c < mesh.n_cells(); ++c)
      r.parent[static_cast<std::size_t>(c)] = c;
    return r;
  }

  std::vector<Vec2> verts = mesh.vertices;
  std::vector<WorkCell> work;
  work.reserve(mesh.cells.size() * 4);
  for (int c = 0; c < mesh.n_cells(); ++c)
    work.push_back({mesh.cells[static_cast<std::size_t>(c)], c, true});

  // Every edge of a marked cell must be split; closure adds longest edges
  // of whatever cells the splits touch.
  std::unordered_set<std::uint64_t> want;
  for (int c : marked) {
    const auto& k = mesh.cells[static_cast<std::size_t>(c)];
    want.insert(edge_key(k[0], k[1]));
    want.insert(edge_key(k[1], k[2]));
    want.insert(edge_key(k[2], k[0]));
  }

  // Boundary tags tracked per edge; split edges hand their tag down.
  std::unordered_map<std::uint64_t, int> edge_tag;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const int t = mesh.facet_tag[static_cast<std::size_t>(f)];
    if (t < 0) continue;
    const Facet& e = mesh.facets[static_cast<std::size_t>(f)];
    edge_tag.emplace(edge_key(e.v0, e.v1), t);
  }

  std::unordered_map<std::uint64_t, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int m = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[static_cast<std::size_t>(a)] +
                           verts[static_cast<std::size_t>(b)]));
    midpoint.emplace(key, m);
    auto tg = edge_tag.find(key);
    if (tg != edge_tag.end()) {
      edge_tag.emplace(edge_key(a, m), tg->second);
      edge_tag.emplace(edge_key(m, b), tg->second);
      edge_tag.erase(key);
    }
    return m;
  };

  bool changed = true;
  int passes = 0;
  while (changed) {
    changed = false;
    if (++passes > 1000)
      throw NumericalError("bisect: refinement closure did not terminate");
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (!work[i].alive) continue;
      const auto& v = work[i].v;
      const bool wanted = want.count(edge_key(v[0], v[1])) ||
                          want.count(edge_key(v[1], v[2])) ||
                          want.count(edge_key(v[2], v[0]));
      if (!wanted) continue;
      // A cell is only ever bisected across its longest edge; if a shorter
      // edge is the wanted one, splitting the longest edge first (and
      // recursing on the children) gets there conformingly.
      const int le = longest_edge(work[i], verts);
      const int a = v[static_cast<std::size_t>(le)];
      const int b = v[static_cast<std::size_t>((le + 1) % 3)];
      const int c = v[static_cast<std::size_t>((le + 2) % 3)];
      want.insert(edge_key(b, c));
      const int m = midpoint_of(b, c);
      const int origin = work[i].origin;
      work[i].alive = false;
      work.push_back({{a, b, m}, origin, true});
      work.push_back({{a, m, c}, origin, true});
      changed = true;
    }
  }

  BisectionResult r;
  r.mesh.domain = mesh.domain;
  r.mesh.boundary_names = mesh.boundary_names;
  r.mesh.vertices = std::move(verts);
  for (const WorkCell& k : work) {
    if (!k.alive) continue;
    r.mesh.cells.push_back(k.v);
    r.parent.push_back(k.origin);
  }
  r.mesh.rebuild_topology();
  for (int f = 0; f < r.mesh.n_facets(); ++f) {
    const Facet& e = r.mesh.facets[static_cast<std::size_t>(f)];
    auto it = edge_tag.find(edge_key(e.v0, e.v1));
    if (it != edge_tag.end())
      r.mesh.facet_tag[static_cast<std::size_t>(f)] = it->second;
  }
  return r;
}

Mesh refine_near_fractures(const Mesh& mesh,
                           std::span<const FractureSpec> fractures,
                           int steps) {
  if (steps < 0) throw ConfigError("refine_near_fractures: negative step count");
  Mesh cur = mesh;
  for (int s = 0; s < steps; ++s) {
    std::vector<DiscreteFracture> discrete;
    std::vector<FractureKind> kinds;
    discrete.reserve(fractures.size());
    for (const FractureSpec& spec : fractures) {
      discrete.push_back(discretize_fracture(spec, cur));
      kinds.push_back(spec.kind);
    }
    const CellClassification classes = classify_cells(cur, discrete, kinds);
    std::vector<int> marked;
    for (int c = 0; c < cur.n_cells(); ++c)
      if (classes.class_of[static_cast<std::size_t>(c)] != CellClass::regular)
        marked.push_back(c);
    if (marked.empty()) break;
    cur = bisect(cur, marked).mesh;
  }
  return cur;
}

void write_mesh_vtk(const Mesh& mesh, std::ostream& out) {
  out << "# vtk DataFile Version 3.0\n";
  out << "triangulation\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  char buf[96];
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", v.x, v.y);
    out << buf;
  }
  out << "CELLS " << mesh.n_cells() << " " << 4 * mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells)
    out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out << "5\n";
}

}  // namespace fracflow

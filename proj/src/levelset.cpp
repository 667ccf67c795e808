#include "fracflow/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

// Nodal values closer to zero than eps are pushed to +eps: cuts through
// vertices and mesh-aligned fractures become ordinary transversal cuts a
// distance eps to one side, so nothing is counted twice.
double perturbed(double v, double eps) {
  return std::abs(v) < eps ? eps : v;
}

double characteristic_length(const Mesh& mesh) {
  if (mesh.vertices.empty()) throw ConfigError("fracture: empty mesh");
  Rect box{mesh.vertices[0].x, mesh.vertices[0].y, mesh.vertices[0].x,
           mesh.vertices[0].y};
  for (const Vec2& v : mesh.vertices) {
    box.xmin = std::min(box.xmin, v.x);
    box.xmax = std::max(box.xmax, v.x);
    box.ymin = std::min(box.ymin, v.y);
    box.ymax = std::max(box.ymax, v.y);
  }
  return box.diameter();
}

// Squared distance between the closed segments [p1,q1] and [p2,q2]; *c2
// receives the point on [p2,q2] realizing it. Clamped quadratic
// minimization; degenerate (point-like) segments are handled by the
// guards on the squared lengths.
double segment_segment_dist2(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, Vec2* c2) {
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) {
    // both degenerate: point-point
  } else if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      if (denom > 0.0) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec2 w1 = p1 + s * d1;
  const Vec2 w2 = p2 + t * d2;
  if (c2) *c2 = w2;
  return dot(w1 - w2, w1 - w2);
}

// True when the closed triangle of `cell` comes within `tol` of the closed
// segment [a,b]; *touch receives the nearest point on the segment. A
// segment crossing the triangle interior intersects an edge, so testing
// the three edges covers every contact except a segment strictly inside
// one cell -- and such a fracture yields a chord and never reaches the
// touch test.
bool triangle_touches_segment(const Mesh& mesh, int cell, Vec2 a, Vec2 b,
                              double tol, Vec2* touch) {
  const std::array<Vec2, 3> v = mesh.cell_vertices(cell);
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_pt{};
  for (int e = 0; e < 3; ++e) {
    Vec2 pt{};
    const double d2 =
        segment_segment_dist2(v[static_cast<std::size_t>(e)],
                              v[static_cast<std::size_t>((e + 1) % 3)], a, b,
                              &pt);
    if (d2 < best) {
      best = d2;
      best_pt = pt;
    }
  }
  if (best > tol * tol) return false;
  if (touch) *touch = best_pt;
  return true;
}

}  // namespace

DiscreteFracture discretize_fracture(const FractureSpec& spec,
                                     const Mesh& mesh) {
  if (!(dist(spec.a, spec.b) > 0.0))
    throw ConfigError("fracture: endpoints coincide");

  DiscreteFracture d;
  d.a = spec.a;
  d.b = spec.b;
  d.tangent = spec.tangent();
  d.normal = spec.normal();
  const double scale = characteristic_length(mesh);
  d.eps_perturb = 1e-12 * scale;
  d.eps_geom = 1e-8 * scale;

  const std::size_t nv = mesh.vertices.size();
  d.phi.resize(nv);
  d.psi[0].resize(nv);
  d.psi[1].resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec2 x = mesh.vertices[v];
    d.phi[v] = perturbed(dot(x - spec.a, d.normal), d.eps_perturb);
    d.psi[0][v] = perturbed(dot(spec.a - x, d.tangent), d.eps_perturb);
    d.psi[1][v] = perturbed(dot(x - spec.b, d.tangent), d.eps_perturb);
  }
  return d;
}

std::optional<CutSegment> cut_segment(const Mesh& mesh, int cell,
                                      const DiscreteFracture& fracture) {
  const auto& k = mesh.cells[static_cast<std::size_t>(cell)];
  const std::array<Vec2, 3> v = mesh.cell_vertices(cell);
  std::array<double, 3> phi{}, psi0{}, psi1{};
  for (int i = 0; i < 3; ++i) {
    const auto vi = static_cast<std::size_t>(k[static_cast<std::size_t>(i)]);
    phi[static_cast<std::size_t>(i)] = fracture.phi[vi];
    psi0[static_cast<std::size_t>(i)] = fracture.psi[0][vi];
    psi1[static_cast<std::size_t>(i)] = fracture.psi[1][vi];
  }

  // All nodal phi are nonzero, so a sign change on an edge is an honest
  // transversal crossing; no sign change anywhere means no cut.
  Vec2 q[2];
  double g0[2], g1[2];  // clip values carried along with the chord endpoints
  int nq = 0;
  for (int e = 0; e < 3 && nq < 2; ++e) {
    const int a = e, b = (e + 1) % 3;
    const double fa = phi[static_cast<std::size_t>(a)];
    const double fb = phi[static_cast<std::size_t>(b)];
    if ((fa > 0.0) == (fb > 0.0)) continue;
    const double s = fa / (fa - fb);
    q[nq] = v[static_cast<std::size_t>(a)] +
            s * (v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)]);
    // psi is affine on the cell; interpolating the (perturbed) nodal values
    // along the edge is exact and consistent with the perturbation.
    g0[nq] = psi0[static_cast<std::size_t>(a)] +
             s * (psi0[static_cast<std::size_t>(b)] - psi0[static_cast<std::size_t>(a)]);
    g1[nq] = psi1[static_cast<std::size_t>(a)] +
             s * (psi1[static_cast<std::size_t>(b)] - psi1[static_cast<std::size_t>(a)]);
    ++nq;
  }
  if (nq < 2) return std::nullopt;

  // Clip the chord to { psi0 < 0 } and { psi1 < 0 }.
  for (int clip = 0; clip < 2; ++clip) {
    double* g = clip == 0 ? g0 : g1;
    double* other = clip == 0 ? g1 : g0;
    const bool in0 = g[0] < 0.0, in1 = g[1] < 0.0;
    if (!in0 && !in1) return std::nullopt;
    if (in0 && in1) continue;
    const double s = g[0] / (g[0] - g[1]);
    const Vec2 qs = q[0] + s * (q[1] - q[0]);
    const double os = other[0] + s * (other[1] - other[0]);
    if (!in0) {
      q[0] = qs;
      g[0] = 0.0;
      other[0] = os;
    } else {
      q[1] = qs;
      g[1] = 0.0;
      other[1] = os;
    }
  }

  const double len = dist(q[0], q[1]);
  if (len < fracture.eps_geom) return std::nullopt;
  return CutSegment{q[0], q[1], len};
}

int CellClassification::n_of(CellClass c) const {
  int n = 0;
  for (CellClass k : class_of)
    if (k == c) ++n;
  return n;
}

CellClassification classify_cells(const Mesh& mesh,
                                  std::span<const DiscreteFracture> fractures,
                                  std::span<const FractureKind> kinds) {
  if (fractures.size() != kinds.size())
    throw ConfigError("classify_cells: fracture/kind lists differ in length");

  CellClassification r;
  r.class_of.assign(static_cast<std::size_t>(mesh.n_cells()),
                    CellClass::regular);
  r.cuts.resize(static_cast<std::size_t>(mesh.n_cells()));

  for (int c = 0; c < mesh.n_cells(); ++c) {
    std::vector<FractureCut> blocking, conductive;
    for (std::size_t i = 0; i < fractures.size(); ++i) {
      const auto cut = cut_segment(mesh, c, fractures[i]);
      if (cut) {
        FractureCut fc{static_cast<int>(i), cut->p0, cut->p1, cut->length};
        (kinds[i] == FractureKind::blocking ? blocking : conductive)
            .push_back(fc);
        continue;
      }
      // No chord, but the closed triangle may still touch the closed
      // segment (fracture through a vertex or along an edge). Such cells
      // get a zero-length cut: no surface term, but the classification --
      // and with it the pressure stabilization -- must follow the
      // geometric contact, or a fracture lying on mesh facets loses the
      // cells on the chord-free side and the stabilized band around it
      // stays connected only through vertices.
      Vec2 touch{};
      if (triangle_touches_segment(mesh, c, fractures[i].a, fractures[i].b,
                                   fractures[i].eps_geom, &touch)) {
        FractureCut fc{static_cast<int>(i), touch, touch, 0.0};
        (kinds[i] == FractureKind::blocking ? blocking : conductive)
            .push_back(fc);
      }
    }
    // Blocking wins: a blocking cell keeps no conductive surface terms.
    auto& slot = r.cuts[static_cast<std::size_t>(c)];
    if (!blocking.empty()) {
      r.class_of[static_cast<std::size_t>(c)] = CellClass::blocking;
      slot = std::move(blocking);
    } else if (!conductive.empty()) {
      r.class_of[static_cast<std::size_t>(c)] = CellClass::conductive;
      slot = std::move(conductive);
    }
  }
  return r;
}

void dump_cuts_csv(const CellClassification& classes, std::ostream& out) {
  out << "cell,fracture,x0,y0,x1,y1,length\n";
  char buf[200];
  for (std::size_t c = 0; c < classes.cuts.size(); ++c) {
    for (const FractureCut& cut : classes.cuts[c]) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    c, cut.fracture, cut.p0.x, cut.p0.y, cut.p1.x, cut.p1.y,
                    cut.length);
      out << buf;
    }
  }
}

}  // namespace fracflow

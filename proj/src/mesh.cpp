#include "dgplate/mesh.hpp"

#include <cmath>
#include <sstream>

namespace dgplate {

namespace {

Index vertex_id(const Mesh& m, Index i, Index j) { return j * (m.nx + 1) + i; }
Index cell_id(const Mesh& m, Index i, Index j) { return j * m.nx + i; }

// Returns the grid-line index of `value` or -1 when it is not on a grid line.
Index grid_line(double value, double origin, double spacing, Index count) {
  const double s = (value - origin) / spacing;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)) || r < 0 || r > static_cast<double>(count)) {
    return -1;
  }
  return static_cast<Index>(r);
}

std::string describe(const Segment& s) {
  std::ostringstream os;
  os << "(" << s.a.x() << "," << s.a.y() << ")-(" << s.b.x() << "," << s.b.y() << ")";
  return os.str();
}

struct ResolvedSegment {
  bool vertical;
  Index line;   // grid line index of the constant coordinate
  Index first;  // range of grid lines along the segment
  Index last;
};

ResolvedSegment resolve(const Mesh& mesh, const Segment& seg) {
  const double hx = mesh.cell_width();
  const double hy = mesh.cell_height();
  const double tol = 1e-12 * std::max(mesh.domain.width(), mesh.domain.height());
  const bool vertical = std::abs(seg.a.x() - seg.b.x()) <= tol;
  const bool horizontal = std::abs(seg.a.y() - seg.b.y()) <= tol;
  if (vertical == horizontal) {
    throw MarkingError("segment " + describe(seg) + " is degenerate or not axis-aligned");
  }
  ResolvedSegment r{};
  r.vertical = vertical;
  Index lo = 0;
  Index hi = 0;
  if (vertical) {
    r.line = grid_line(seg.a.x(), mesh.domain.x_min, hx, mesh.nx);
    lo = grid_line(seg.a.y(), mesh.domain.y_min, hy, mesh.ny);
    hi = grid_line(seg.b.y(), mesh.domain.y_min, hy, mesh.ny);
  } else {
    r.line = grid_line(seg.a.y(), mesh.domain.y_min, hy, mesh.ny);
    lo = grid_line(seg.a.x(), mesh.domain.x_min, hx, mesh.nx);
    hi = grid_line(seg.b.x(), mesh.domain.x_min, hx, mesh.nx);
  }
  if (r.line < 0 || lo < 0 || hi < 0) {
    throw MarkingError("segment " + describe(seg) + " is not resolved by the mesh at refinement " +
                       std::to_string(mesh.refinement_level));
  }
  r.first = std::min(lo, hi);
  r.last = std::max(lo, hi);
  return r;
}

bool on_segment(const Mesh& mesh, const Edge& e, const ResolvedSegment& seg) {
  if (e.vertical() != seg.vertical) return false;
  const Index v0 = e.vertices[0];
  const Index v1 = e.vertices[1];
  const Index stride = mesh.nx + 1;
  if (seg.vertical) {
    const Index i = v0 % stride;
    const Index j0 = v0 / stride;
    const Index j1 = v1 / stride;
    return i == seg.line && j0 >= seg.first && j1 <= seg.last;
  }
  const Index j = v0 / stride;
  const Index i0 = v0 % stride;
  const Index i1 = v1 % stride;
  return j == seg.line && i0 >= seg.first && i1 <= seg.last;
}

}  // namespace

Mesh build_rectangular_mesh(const Rectangle& domain, int refinements) {
  if (!(domain.x_min < domain.x_max) || !(domain.y_min < domain.y_max)) {
    throw std::invalid_argument("build_rectangular_mesh: empty rectangle");
  }
  if (refinements < 0 || refinements > 12) {
    throw std::invalid_argument("build_rectangular_mesh: refinements must be in [0, 12]");
  }
  Mesh m;
  m.domain = domain;
  m.refinement_level = refinements;
  m.nx = Index{1} << refinements;
  m.ny = m.nx;
  const double hx = m.cell_width();
  const double hy = m.cell_height();

  m.vertices.reserve(static_cast<std::size_t>((m.nx + 1) * (m.ny + 1)));
  for (Index j = 0; j <= m.ny; ++j) {
    for (Index i = 0; i <= m.nx; ++i) {
      // Snap the last line onto the domain boundary exactly.
      const double x = (i == m.nx) ? domain.x_max : domain.x_min + static_cast<double>(i) * hx;
      const double y = (j == m.ny) ? domain.y_max : domain.y_min + static_cast<double>(j) * hy;
      m.vertices.emplace_back(x, y);
    }
  }
  m.cells.reserve(static_cast<std::size_t>(m.nx * m.ny));
  for (Index j = 0; j < m.ny; ++j) {
    for (Index i = 0; i < m.nx; ++i) {
      m.cells.push_back({vertex_id(m, i, j), vertex_id(m, i + 1, j), vertex_id(m, i + 1, j + 1),
                         vertex_id(m, i, j + 1)});
    }
  }

  // Vertical edges: normal along +x from the lower (left) cell index.
  for (Index j = 0; j < m.ny; ++j) {
    for (Index i = 0; i <= m.nx; ++i) {
      Edge e;
      e.vertices = {vertex_id(m, i, j), vertex_id(m, i, j + 1)};
      e.length = hy;
      if (i == 0) {
        e.minus = cell_id(m, 0, j);
        e.face_minus = LocalFace::left;
        e.normal = Eigen::Vector2d(-1.0, 0.0);
      } else if (i == m.nx) {
        e.minus = cell_id(m, m.nx - 1, j);
        e.face_minus = LocalFace::right;
        e.normal = Eigen::Vector2d(1.0, 0.0);
      } else {
        e.minus = cell_id(m, i - 1, j);
        e.plus = cell_id(m, i, j);
        e.face_minus = LocalFace::right;
        e.face_plus = LocalFace::left;
        e.normal = Eigen::Vector2d(1.0, 0.0);
        e.kind = EdgeKind::interior;
      }
      m.edges.push_back(e);
    }
  }
  // Horizontal edges: normal along +y.
  for (Index j = 0; j <= m.ny; ++j) {
    for (Index i = 0; i < m.nx; ++i) {
      Edge e;
      e.vertices = {vertex_id(m, i, j), vertex_id(m, i + 1, j)};
      e.length = hx;
      if (j == 0) {
        e.minus = cell_id(m, i, 0);
        e.face_minus = LocalFace::bottom;
        e.normal = Eigen::Vector2d(0.0, -1.0);
      } else if (j == m.ny) {
        e.minus = cell_id(m, i, m.ny - 1);
        e.face_minus = LocalFace::top;
        e.normal = Eigen::Vector2d(0.0, 1.0);
      } else {
        e.minus = cell_id(m, i, j - 1);
        e.plus = cell_id(m, i, j);
        e.face_minus = LocalFace::top;
        e.face_plus = LocalFace::bottom;
        e.normal = Eigen::Vector2d(0.0, 1.0);
        e.kind = EdgeKind::interior;
      }
      m.edges.push_back(e);
    }
  }
  return m;
}

Mesh mark_dirichlet(const Mesh& mesh, const BoundaryMarking& marking) {
  std::vector<ResolvedSegment> resolved;
  resolved.reserve(marking.segments.size());
  for (const auto& s : marking.segments) resolved.push_back(resolve(mesh, s));

  Mesh out = mesh;
  const std::size_t n_original = out.edges.size();
  for (std::size_t k = 0; k < n_original; ++k) {
    Edge& e = out.edges[k];
    if (!e.has_plus()) e.kind = EdgeKind::free;
    bool marked = false;
    for (const auto& seg : resolved) {
      if (on_segment(out, e, seg)) {
        marked = true;
        break;
      }
    }
    if (!marked) continue;
    if (e.has_plus()) {
      // Crack: one clamped edge per side, each with that cell's outward normal.
      Edge other = e;
      other.minus = e.plus;
      other.face_minus = e.face_plus;
      other.plus = kNoCell;
      other.normal = -e.normal;
      other.kind = EdgeKind::dirichlet;
      e.plus = kNoCell;
      e.kind = EdgeKind::dirichlet;
      out.edges.push_back(other);
    } else {
      e.kind = EdgeKind::dirichlet;
    }
  }
  return out;
}

Skeleton skeleton(const Mesh& mesh) {
  Skeleton s;
  for (Index k = 0; k < static_cast<Index>(mesh.edges.size()); ++k) {
    switch (mesh.edges[k].kind) {
      case EdgeKind::interior: s.interior.push_back(k); break;
      case EdgeKind::dirichlet: s.dirichlet.push_back(k); break;
      case EdgeKind::free: break;
    }
  }
  return s;
}

Index count_edges(const Mesh& mesh, EdgeKind kind) {
  Index n = 0;
  for (const auto& e : mesh.edges) n += (e.kind == kind) ? 1 : 0;
  return n;
}

}  // namespace dgplate

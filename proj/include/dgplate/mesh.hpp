#ifndef DGPLATE_MESH_HPP
#define DGPLATE_MESH_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dgplate {

using Index = std::int64_t;

/// Raised when a boundary marking is not resolved by the mesh.
class MarkingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rectangle {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool operator==(const Rectangle&) const = default;
};

enum class EdgeKind { interior, dirichlet, free };

/// Local face of the reference square [0,1]^2 an edge sits on.
enum class LocalFace : std::uint8_t { left = 0, right = 1, bottom = 2, top = 3 };

inline constexpr Index kNoCell = -1;

/// An oriented mesh edge. Vertices are stored lower/left first so that the
/// edge parameter runs along +x or +y for both adjacent cells.
struct Edge {
  std::array<Index, 2> vertices{};
  Index minus = kNoCell;
  Index plus = kNoCell;
  LocalFace face_minus = LocalFace::left;
  LocalFace face_plus = LocalFace::left;
  Eigen::Vector2d normal = Eigen::Vector2d::UnitX();
  double length = 0.0;
  EdgeKind kind = EdgeKind::free;

  bool has_plus() const { return plus != kNoCell; }
  bool vertical() const { return normal.x() != 0.0; }
};

/// Uniformly refined grid of congruent axis-aligned rectangles.
///
/// Cells are numbered lexicographically (x fastest) and list their vertices
/// counter-clockwise starting at the lower-left corner.
struct Mesh {
  Rectangle domain;
  int refinement_level = 0;
  Index nx = 1;
  Index ny = 1;
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<Index, 4>> cells;
  std::vector<Edge> edges;

  Index n_cells() const { return static_cast<Index>(cells.size()); }
  double cell_width() const { return domain.width() / static_cast<double>(nx); }
  double cell_height() const { return domain.height() / static_cast<double>(ny); }
  double cell_area() const { return cell_width() * cell_height(); }
  Eigen::Vector2d cell_origin(Index cell) const { return vertices[cells[cell][0]]; }
  Eigen::Vector2d cell_center(Index cell) const {
    return cell_origin(cell) + 0.5 * Eigen::Vector2d(cell_width(), cell_height());
  }
  /// Physical point of the reference coordinate `ref` in `cell`.
  Eigen::Vector2d map_to_cell(Index cell, const Eigen::Vector2d& ref) const {
    return cell_origin(cell) + Eigen::Vector2d(ref.x() * cell_width(), ref.y() * cell_height());
  }
  Eigen::Vector2d edge_point(const Edge& e, double t) const {
    return (1.0 - t) * vertices[e.vertices[0]] + t * vertices[e.vertices[1]];
  }
};

/// Axis-aligned segment from `a` to `b`; may lie on the boundary or inside the domain.
struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;

  bool operator==(const Segment& o) const { return a == o.a && b == o.b; }
};

/// Set of clamped segments. An empty marking describes a free plate.
struct BoundaryMarking {
  std::vector<Segment> segments;

  bool empty() const { return segments.empty(); }
  bool operator==(const BoundaryMarking&) const = default;
};

/// Active edges on which jump and average terms are posted.
struct Skeleton {
  std::vector<Index> interior;
  std::vector<Index> dirichlet;
};

Mesh build_rectangular_mesh(const Rectangle& domain, int refinements);

/// Returns a copy of `mesh` with the edges on `marking` turned into Dirichlet
/// edges. Interior edges on a marked segment are split into two one-sided
/// Dirichlet edges with no coupling across the line.
Mesh mark_dirichlet(const Mesh& mesh, const BoundaryMarking& marking);

Skeleton skeleton(const Mesh& mesh);

Index count_edges(const Mesh& mesh, EdgeKind kind);

}  // namespace dgplate

#endif  // DGPLATE_MESH_HPP

#ifndef DGPLATE_TESTS_SUPPORT_HPP
#define DGPLATE_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "dgplate/assembly.hpp"
#include "dgplate/flow.hpp"

namespace dgplate::testing {

inline const Rectangle kWide{-5.0, 5.0, -2.0, 2.0};
inline const Segment kWideClamp{{-5.0, -2.0}, {-5.0, 2.0}};

inline Mesh clamped_mesh(const Rectangle& domain, int refinements, const Segment& clamp) {
  BoundaryMarking m;
  m.segments.push_back(clamp);
  return mark_dirichlet(build_rectangular_mesh(domain, refinements), m);
}

inline Vector random_vector(Index n, double amplitude, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Vector perturbed_flat(const DgSpace& space, double amplitude, unsigned seed) {
  return interpolate(space, flat_deformation) + random_vector(space.dofs().n_y(), amplitude, seed);
}

/// Cylinder of radius 1 tangent to the flat clamp at x1 = -5.
inline Eigen::Vector3d clamped_cylinder(const Eigen::Vector2d& x) {
  const double s = x.x() + 5.0;
  return {-5.0 + std::sin(s), x.y(), 1.0 - std::cos(s)};
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double relative(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

/// a_h(w, v) evaluated term by term from field traces, without the assembly
/// routines. Dirichlet edges contribute with zero data.
inline double oracle_bilinear(const DgSpace& space, const Vector& w, const Vector& v, const PenaltyParams& p) {
  const Mesh& mesh = space.mesh();
  const auto& rule = space.cell_rule();
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const auto jw = evaluate_field(space, w, c, rule.points, 2);
    const auto jv = evaluate_field(space, v, c, rule.points, 2);
    for (int q = 0; q < rule.size(); ++q) {
      double h = 0.0;
      for (int k = 0; k < 2; ++k) h += (jw[q].hess[k].array() * jv[q].hess[k].array()).sum();
      sum += rule.weights[q] * mesh.cell_area() * h;
    }
  }
  const auto dmu_grad = [](const FieldJet& j, const Eigen::Vector2d& mu) -> Matrix32 {
    return mu.x() * j.hess[0] + mu.y() * j.hess[1];
  };
  const auto dmu_lap = [](const FieldJet& j, const Eigen::Vector2d& mu) -> Eigen::Vector3d {
    return mu.x() * (j.third[0][0].col(0) + j.third[0][1].col(1)) +
           mu.y() * (j.third[1][0].col(0) + j.third[1][1].col(1));
  };
  for (const Edge& e : mesh.edges) {
    if (e.kind == EdgeKind::free) continue;
    const double h = e.length;
    const auto wm = edge_traces(space, w, e, Side::minus);
    const auto vm = edge_traces(space, v, e, Side::minus);
    const bool two_sided = e.has_plus();
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      Eigen::Vector3d jw = wm[q].value, jv = vm[q].value;
      Matrix32 gw = wm[q].grad, gv = vm[q].grad;
      Matrix32 aw = dmu_grad(wm[q], e.normal), av = dmu_grad(vm[q], e.normal);
      Eigen::Vector3d lw = dmu_lap(wm[q], e.normal), lv = dmu_lap(vm[q], e.normal);
      if (two_sided) {
        const auto wp = edge_traces(space, w, e, Side::plus)[q];
        const auto vp = edge_traces(space, v, e, Side::plus)[q];
        jw -= wp.value;
        jv -= vp.value;
        gw -= wp.grad;
        gv -= vp.grad;
        aw = 0.5 * (aw + dmu_grad(wp, e.normal));
        av = 0.5 * (av + dmu_grad(vp, e.normal));
        lw = 0.5 * (lw + dmu_lap(wp, e.normal));
        lv = 0.5 * (lv + dmu_lap(vp, e.normal));
      }
      const double integrand = -(aw.array() * gv.array()).sum() - (av.array() * gw.array()).sum() + lw.dot(jv) +
                               lv.dot(jw) + p.gamma1 / h * (gw.array() * gv.array()).sum() +
                               p.gamma0 / (h * h * h) * jw.dot(jv);
      sum += space.edge_rule().weights[q] * h * integrand;
    }
  }
  return sum;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dgplate_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dgplate::testing

#endif  // DGPLATE_TESTS_SUPPORT_HPP

#include "dgplate/scenario.hpp"

namespace dgplate {

namespace {

Eigen::Matrix2d sym(double a, double b, double d) {
  Eigen::Matrix2d z;
  z << a, b, b, d;
  return z;
}

ScenarioSpec clamped(std::string name, std::string summary, Rectangle domain, Eigen::Matrix2d z, Segment clamp) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.summary = std::move(summary);
  s.domain = domain;
  s.curvature = CurvatureField(z);
  s.clamp.segments.push_back(clamp);
  s.penalty.epsilon = 0.0;
  return s;
}

ScenarioSpec free_plate(std::string name, std::string summary, Rectangle domain, CurvatureField z) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.summary = std::move(summary);
  s.domain = domain;
  s.curvature = std::move(z);
  s.penalty.epsilon = kFreeEpsilon;
  return s;
}

std::vector<ScenarioSpec> make_registry() {
  std::vector<ScenarioSpec> r;
  const Rectangle wide{-5.0, 5.0, -2.0, 2.0};
  const Rectangle tall{-2.0, 2.0, -3.0, 3.0};
  r.push_back(clamped("clamped_identity", "Z = I, clamped on the short side x1 = -5; rolls into a cylinder", wide,
                      Eigen::Matrix2d::Identity(), {{-5.0, -2.0}, {-5.0, 2.0}}));
  r.push_back(clamped("clamped_aniso", "anisotropic Z with principal curvatures 5 and 1, clamped on x2 = -3", tall,
                      sym(3.0, -2.0, 3.0), {{-2.0, -3.0}, {2.0, -3.0}}));
  r.push_back(clamped("clamped_opposite", "Z = diag(-5, 5), principal curvatures of opposite sign, clamped on x2 = -3",
                      tall, sym(-5.0, 0.0, 5.0), {{-2.0, -3.0}, {2.0, -3.0}}));
  r.push_back(clamped("middle_clamped", "Z = diag(5, 1), clamped along the interior line x1 = 0", wide,
                      sym(5.0, 0.0, 1.0), {{0.0, -2.0}, {0.0, 2.0}}));
  r.push_back(free_plate("free_cigar", "anisotropic Z on a free plate; rolls into a cigar", wide,
                         CurvatureField(sym(3.0, -2.0, 3.0))));
  std::vector<Eigen::Matrix2d> strips;
  for (int k = 0; k < 8; ++k) strips.push_back((k % 2 == 0 ? -1.0 : 1.0) * Eigen::Matrix2d::Identity());
  r.push_back(free_plate("free_wavy", "Z = -I, +I, ... on 8 equal strips along x1 (leftmost -I); free", {-8.0, 8.0, -1.0, 1.0},
                         CurvatureField(-8.0, 8.0, std::move(strips))));
  r.push_back(free_plate("free_helix", "off-diagonal Z on a long free strip; twists into a helix",
                         {-8.0, 8.0, -0.5, 0.5}, CurvatureField(sym(1.0, -1.5, 1.0))));
  return r;
}

}  // namespace

const std::vector<ScenarioSpec>& registry() {
  static const std::vector<ScenarioSpec> r = make_registry();
  return r;
}

ScenarioSpec find_scenario(const std::string& name) {
  for (const auto& s : registry()) {
    if (s.name == name) return s;
  }
  std::string names;
  for (const auto& s : registry()) names += (names.empty() ? "" : ", ") + s.name;
  throw UnknownScenarioError("unknown scenario '" + name + "' (available: " + names + ")");
}

BoundaryData boundary_data(const ScenarioSpec& spec) {
  BoundaryData data = BoundaryData::flat();
  if (spec.literal_phi_zero) data.phi = [](const Eigen::Vector2d&) -> Matrix32 { return Matrix32::Zero(); };
  return data;
}

Discretization::Discretization(const ScenarioSpec& spec) : spec_(spec) {
  Mesh mesh = build_rectangular_mesh(spec.domain, spec.refinements);
  if (!spec.free()) mesh = mark_dirichlet(mesh, spec.clamp);
  mesh_ = std::make_unique<Mesh>(std::move(mesh));
  space_ = std::make_unique<DgSpace>(*mesh_);
  problem_.space = space_.get();
  problem_.penalty = spec.penalty;
  problem_.curvature = spec.curvature;
  problem_.data = boundary_data(spec);
}

Vector Discretization::initial_deformation() const { return interpolate(*space_, flat_deformation); }

}  // namespace dgplate

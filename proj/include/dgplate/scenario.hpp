#ifndef DGPLATE_SCENARIO_HPP
#define DGPLATE_SCENARIO_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgplate/flow.hpp"

namespace dgplate {

class UnknownScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kFreeEpsilon = 1.0e-2;

/// A plate experiment: geometry, spontaneous curvature, clamping and the
/// numerical parameters it runs with. Every scenario starts flat with f = 0.
struct ScenarioSpec {
  std::string name;
  std::string summary;
  Rectangle domain;
  int refinements = 5;
  CurvatureField curvature;
  BoundaryMarking clamp;  // empty for a free plate
  /// Clamp with Phi = 0 instead of Phi = grad g.
  bool literal_phi_zero = false;
  PenaltyParams penalty;
  FlowParams flow;

  bool free() const { return clamp.empty(); }
  bool operator==(const ScenarioSpec&) const = default;
};

/// The seven built-in experiments.
const std::vector<ScenarioSpec>& registry();
ScenarioSpec find_scenario(const std::string& name);

/// Clamped data: g(x) = (x1, x2, 0) and Phi = grad g (or 0).
BoundaryData boundary_data(const ScenarioSpec& spec);

/// Mesh, space and flow problem of a scenario at a given refinement. The
/// problem keeps pointers into this object, so it is neither copied nor moved.
class Discretization {
 public:
  explicit Discretization(const ScenarioSpec& spec);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const ScenarioSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return *mesh_; }
  const DgSpace& space() const { return *space_; }
  const FlowProblem& problem() const { return problem_; }
  /// Interpolant of the flat deformation (x1, x2, 0).
  Vector initial_deformation() const;

 private:
  ScenarioSpec spec_;
  std::unique_ptr<Mesh> mesh_;
  std::unique_ptr<DgSpace> space_;
  FlowProblem problem_;
};

}  // namespace dgplate

#endif  // DGPLATE_SCENARIO_HPP

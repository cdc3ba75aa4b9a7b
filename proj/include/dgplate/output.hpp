#ifndef DGPLATE_OUTPUT_HPP
#define DGPLATE_OUTPUT_HPP

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgplate/flow.hpp"

namespace dgplate {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Legacy ASCII unstructured grid of the deformed plate. Every cell
/// contributes its own Lagrange nodes (so jumps stay visible) and is split
/// into bilinear quads over its node grid. Point data: displacement
/// magnitude |y(x) - (x1, x2, 0)| and the isometry defect of the owning cell.
void write_vtk(const DgSpace& space, const Vector& y, const std::filesystem::path& path);

/// Points of a file written by write_vtk, in file order.
std::vector<Eigen::Vector3d> read_vtk_points(const std::filesystem::path& path);

inline constexpr const char* kTraceHeader =
    "step,pseudo_time,energy_total,energy_no_constant,delta_norm_sq,defect,cg_iters,schur_residual";

/// Streams one CSV row per accepted step.
class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& path, double tau);
  void write(const StepDiagnostics& d);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  double tau_;
};

/// Writes every `cadence`-th row of `trace`, plus the last one.
void write_trace(const std::vector<StepDiagnostics>& trace, double tau, const std::filesystem::path& path,
                 Index cadence = 1);

}  // namespace dgplate

#endif  // DGPLATE_OUTPUT_HPP

#include "dgplate/output.hpp"

#include <iomanip>
#include <sstream>

namespace dgplate {

void write_vtk(const DgSpace& space, const Vector& y, const std::filesystem::path& path) {
  const auto& dofs = space.dofs();
  if (y.size() != dofs.n_y()) throw std::invalid_argument("write_vtk: coefficient length mismatch");
  const auto& mesh = space.mesh();
  const int k = space.basis().degree();
  const int n1 = k + 1;
  const Index n_cells = mesh.n_cells();
  const Index n_points = n_cells * dofs.n_basis;
  const Index n_quads = n_cells * k * k;
  const Vector defects = cell_isometry_defects(space, y);

  std::ofstream out(path);
  if (!out) throw OutputError("write_vtk: cannot open " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\ndgplate deformation\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n_points << " double\n";
  for (Index c = 0; c < n_cells; ++c) {
    for (int b = 0; b < dofs.n_basis; ++b) {
      out << y[dofs.displacement(c, b, 0)] << ' ' << y[dofs.displacement(c, b, 1)] << ' '
          << y[dofs.displacement(c, b, 2)] << '\n';
    }
  }
  out << "CELLS " << n_quads << ' ' << 5 * n_quads << '\n';
  for (Index c = 0; c < n_cells; ++c) {
    const Index base = c * dofs.n_basis;
    for (int jy = 0; jy < k; ++jy) {
      for (int jx = 0; jx < k; ++jx) {
        const Index b00 = base + jy * n1 + jx;
        out << "4 " << b00 << ' ' << b00 + 1 << ' ' << b00 + 1 + n1 << ' ' << b00 + n1 << '\n';
      }
    }
  }
  out << "CELL_TYPES " << n_quads << '\n';
  for (Index q = 0; q < n_quads; ++q) out << "9\n";
  out << "POINT_DATA " << n_points << "\nSCALARS displacement_magnitude double 1\nLOOKUP_TABLE default\n";
  for (Index c = 0; c < n_cells; ++c) {
    for (int b = 0; b < dofs.n_basis; ++b) {
      const Eigen::Vector3d x = flat_deformation(mesh.map_to_cell(c, space.basis().node(b)));
      Eigen::Vector3d v;
      for (int i = 0; i < 3; ++i) v[i] = y[dofs.displacement(c, b, i)];
      out << (v - x).norm() << '\n';
    }
  }
  out << "SCALARS isometry_defect double 1\nLOOKUP_TABLE default\n";
  for (Index c = 0; c < n_cells; ++c) {
    for (int b = 0; b < dofs.n_basis; ++b) out << defects[c] << '\n';
  }
  if (!out) throw OutputError("write_vtk: write to " + path.string() + " failed");
}

std::vector<Eigen::Vector3d> read_vtk_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw OutputError("read_vtk_points: cannot open " + path.string());
  std::string token;
  while (in >> token && token != "POINTS") {
  }
  Index n = 0;
  std::string type;
  if (!(in >> n >> type)) throw OutputError("read_vtk_points: no POINTS section in " + path.string());
  std::vector<Eigen::Vector3d> points(static_cast<std::size_t>(n));
  for (auto& p : points) {
    if (!(in >> p.x() >> p.y() >> p.z())) throw OutputError("read_vtk_points: truncated POINTS section");
  }
  return points;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, double tau) : out_(path), tau_(tau) {
  if (!out_) throw OutputError("trace: cannot open " + path.string());
  out_ << std::setprecision(17) << kTraceHeader << '\n';
}

void TraceWriter::write(const StepDiagnostics& d) {
  out_ << d.step << ',' << static_cast<double>(d.step) * tau_ << ',' << d.energy_after << ',' << d.energy_no_constant
       << ',' << d.delta_norm_sq << ',' << d.defect << ',' << d.cg_iterations << ',' << d.schur_residual << '\n';
  if (!out_) throw OutputError("trace: write failed");
}

void write_trace(const std::vector<StepDiagnostics>& trace, double tau, const std::filesystem::path& path,
                 Index cadence) {
  if (cadence < 1) throw std::invalid_argument("write_trace: cadence must be >= 1");
  TraceWriter w(path, tau);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].step % cadence == 0 || i + 1 == trace.size()) w.write(trace[i]);
  }
  w.flush();
}

}  // namespace dgplate

#ifndef DGPLATE_CHECKPOINT_HPP
#define DGPLATE_CHECKPOINT_HPP

#include <filesystem>
#include <stdexcept>

#include "dgplate/dg_space.hpp"

namespace dgplate {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deformation coefficients and step counter; see docs/checkpoint.md.
struct Checkpoint {
  Index step = 0;
  Index n_cells = 0;
  Index n_basis = 0;
  Vector y;

  bool operator==(const Checkpoint& other) const {
    return step == other.step && n_cells == other.n_cells && n_basis == other.n_basis && y.size() == other.y.size() &&
           y == other.y;
  }
};

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace dgplate

#endif  // DGPLATE_CHECKPOINT_HPP

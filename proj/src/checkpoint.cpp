#include "dgplate/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace dgplate {

namespace {

constexpr std::array<char, 8> kMagic = {'D', 'G', 'P', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw CheckpointError("checkpoint: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  if (checkpoint.step < 0 || checkpoint.n_cells < 0 || checkpoint.n_basis < 0) {
    throw CheckpointError("checkpoint: negative dimension");
  }
  if (checkpoint.y.size() != DofMap::kComponents * checkpoint.n_cells * checkpoint.n_basis) {
    throw CheckpointError("checkpoint: coefficient length does not match the dimensions");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
  std::array<char, kHeaderBytes> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  header[8] = static_cast<char>(kVersion);
  out.write(header.data(), header.size());
  put_u64(out, static_cast<std::uint64_t>(checkpoint.step));
  put_u64(out, static_cast<std::uint64_t>(checkpoint.n_cells));
  put_u64(out, static_cast<std::uint64_t>(checkpoint.n_basis));
  put_u64(out, static_cast<std::uint64_t>(checkpoint.y.size()));
  for (Index i = 0; i < checkpoint.y.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(checkpoint.y[i]));
  if (!out) throw CheckpointError("checkpoint: write to " + path.string() + " failed");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  std::array<char, kHeaderBytes> header{};
  if (!in.read(header.data(), header.size())) throw CheckpointError("checkpoint: truncated header");
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw CheckpointError("checkpoint: " + path.string() + " is not a checkpoint (bad magic)");
  }
  if (static_cast<std::uint8_t>(header[8]) != kVersion) {
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(static_cast<unsigned>(header[8])));
  }
  Checkpoint c;
  c.step = static_cast<Index>(get_u64(in));
  c.n_cells = static_cast<Index>(get_u64(in));
  c.n_basis = static_cast<Index>(get_u64(in));
  const std::uint64_t n_y = get_u64(in);
  if (n_y != static_cast<std::uint64_t>(DofMap::kComponents * c.n_cells * c.n_basis)) {
    throw CheckpointError("checkpoint: inconsistent dimensions");
  }
  c.y.resize(static_cast<Index>(n_y));
  for (Index i = 0; i < c.y.size(); ++i) c.y[i] = std::bit_cast<double>(get_u64(in));
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("checkpoint: trailing bytes");
  return c;
}

}  // namespace dgplate

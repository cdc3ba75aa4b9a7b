#include <cstring>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "dgplate/checkpoint.hpp"
#include "support.hpp"

namespace dgplate {
namespace {

std::vector<unsigned char> bytes_of(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

Checkpoint sample() {
  Checkpoint c;
  c.step = 123456789;
  c.n_cells = 2;
  c.n_basis = 9;
  c.y = testing::random_vector(54, 10.0, 1);
  c.y[0] = -0.0;
  c.y[1] = 1e-310;
  return c;
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const auto dir = testing::scratch_dir("ckpt_roundtrip");
  const Checkpoint c = sample();
  write_checkpoint(c, dir / "a.ckpt");
  const Checkpoint back = read_checkpoint(dir / "a.ckpt");
  EXPECT_EQ(back, c);
  EXPECT_TRUE(std::signbit(back.y[0]));
  EXPECT_EQ(std::memcmp(back.y.data(), c.y.data(), sizeof(double) * 54), 0);
}

TEST(Checkpoint, LayoutMatchesTheDocumentedHeader) {
  const auto dir = testing::scratch_dir("ckpt_layout");
  Checkpoint c;
  c.step = 0x0102030405060708;
  c.n_cells = 1;
  c.n_basis = 1;
  c.y = Eigen::Vector3d(1.0, -2.0, 0.5);
  write_checkpoint(c, dir / "b.ckpt");
  const auto b = bytes_of(dir / "b.ckpt");
  ASSERT_EQ(b.size(), 48u + 24u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 8), "DGPLCKPT");
  EXPECT_EQ(b[8], 1);
  for (int i = 9; i < 16; ++i) EXPECT_EQ(b[i], 0);
  EXPECT_EQ(b[16], 0x08);
  EXPECT_EQ(b[23], 0x01);
  EXPECT_EQ(b[40], 3);
  // 1.0 = 0x3FF0000000000000, stored little-endian.
  EXPECT_EQ(b[48 + 7], 0x3F);
  EXPECT_EQ(b[48 + 6], 0xF0);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto dir = testing::scratch_dir("ckpt_corrupt");
  write_checkpoint(sample(), dir / "good.ckpt");
  const auto good = bytes_of(dir / "good.ckpt");

  auto bad_magic = good;
  bad_magic[0] = 'X';
  write_bytes(dir / "magic.ckpt", bad_magic);
  EXPECT_THROW(read_checkpoint(dir / "magic.ckpt"), CheckpointError);

  auto bad_version = good;
  bad_version[8] = 2;
  write_bytes(dir / "version.ckpt", bad_version);
  EXPECT_THROW(read_checkpoint(dir / "version.ckpt"), CheckpointError);

  write_bytes(dir / "short.ckpt", std::vector<unsigned char>(good.begin(), good.end() - 4));
  EXPECT_THROW(read_checkpoint(dir / "short.ckpt"), CheckpointError);

  auto trailing = good;
  trailing.push_back(0);
  write_bytes(dir / "long.ckpt", trailing);
  EXPECT_THROW(read_checkpoint(dir / "long.ckpt"), CheckpointError);

  auto dims = good;
  dims[24] = 3;
  write_bytes(dir / "dims.ckpt", dims);
  EXPECT_THROW(read_checkpoint(dir / "dims.ckpt"), CheckpointError);

  EXPECT_THROW(read_checkpoint(dir / "missing.ckpt"), CheckpointError);
}

TEST(Checkpoint, RejectsInconsistentDimensionsOnWrite) {
  const auto dir = testing::scratch_dir("ckpt_write");
  Checkpoint c = sample();
  c.n_cells = 3;
  EXPECT_THROW(write_checkpoint(c, dir / "c.ckpt"), CheckpointError);
}

}  // namespace
}  // namespace dgplate

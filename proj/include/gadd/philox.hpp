#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gadd {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Block k of the stream for `seed` is a pure function of (seed, k).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  explicit Philox4x32(std::array<std::uint32_t, 2> key) : key_(key) {}

  [[nodiscard]] Block block(std::uint64_t counter) const {
    return block(Block{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32), 0u, 0u});
  }

  [[nodiscard]] Block block(Block ctr) const {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  /// Uniform on the open interval (0, 1) from 32 random bits.
  static double to_unit(std::uint32_t bits) { return (static_cast<double>(bits) + 0.5) * 0x1p-32; }

  /// Two independent standard normals (Box–Muller) from block `counter`.
  [[nodiscard]] std::array<double, 2> normal_pair(std::uint64_t counter) const {
    const Block b = block(counter);
    const double u1 = to_unit(b[0]) * 0x1p-32 + to_unit(b[1]) * (1.0 - 0x1p-32);
    const double u2 = to_unit(b[2]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace gadd

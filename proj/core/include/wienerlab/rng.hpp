#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace wienerlab {

/// Philox4x32-10 counter-based generator.
///
/// Streams are addressed, not stateful: the block for a given
/// (key, counter) is a pure function, so path p / draw j is identical
/// whether produced serially or from any worker thread.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::array<std::uint32_t, 4> ctr) noexcept {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
          static_cast<std::uint32_t>(p0)};
      ctr = next;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return ctr;
  }
};

/// Substream of standard uniforms / gaussians for one (seed, path index).
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path_index) noexcept
      : seed_(seed), path_(path_index) {}

  /// Uniform in (0,1), 52-bit resolution.
  double next_uniform() noexcept {
    if (lane_ == 0) refill();
    const std::uint64_t bits = lanes_[--lane_];
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
  }

  /// Standard normal via Box-Muller on consecutive uniform pairs.
  double next_gaussian() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  void refill() noexcept {
    const auto b = Philox4x32::block(
        seed_, {static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
                static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32)});
    ++draw_;
    lanes_[0] = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    lanes_[1] = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    lane_ = 2;
  }

  std::uint64_t seed_;
  std::uint64_t path_;
  std::uint64_t draw_ = 0;
  std::array<std::uint64_t, 2> lanes_{};
  int lane_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wienerlab

#pragma once

// Counter-based random streams (Philox4x32-10). A stream is addressed by a
// 64-bit key and a lane; draw i of a stream is a pure function of
// (key, lane, i), so any path can be regenerated independently of the
// others and of the number of worker threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace berrylab {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child key from a parent key and an index, e.g. (seed, path).
inline constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

using PhiloxCounter = std::array<std::uint32_t, 4>;

inline PhiloxCounter philox4x32(PhiloxCounter ctr, std::uint64_t key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += kW0;
    k1 += kW1;
  }
  return ctr;
}

/// Uniform on the open interval (0, 1) from 53 random bits.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Two independent standard normals for block `block` of (key, lane).
inline std::array<double, 2> normal_pair(std::uint64_t key, std::uint32_t lane,
                                         std::uint64_t block) {
  const auto r = philox4x32({static_cast<std::uint32_t>(block),
                             static_cast<std::uint32_t>(block >> 32), lane, 0u},
                            key);
  const double u1 = to_open_unit(r[0], r[1]);
  const double u2 = to_open_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Sequential view over one stream: N(0,1) draws in a fixed order.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t key, std::uint32_t lane) : key_(key), lane_(lane) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto pair = normal_pair(key_, lane_, block_++);
    spare_ = pair[1];
    has_spare_ = true;
    return pair[0];
  }

 private:
  std::uint64_t key_;
  std::uint32_t lane_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Sequential uniform integers / reals over one stream.
class UniformStream {
 public:
  UniformStream(std::uint64_t key, std::uint32_t lane) : key_(key), lane_(lane) {}

  std::uint64_t next_u64() {
    if (used_ == 2) refill();
    const std::uint64_t v = std::uint64_t{buf_[2 * used_]} << 32 | buf_[2 * used_ + 1];
    ++used_;
    return v;
  }

  /// Uniform index in [0, n); Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    for (;;) {
      const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= n || low >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  double uniform() {
    const std::uint64_t v = next_u64();
    return to_open_unit(static_cast<std::uint32_t>(v >> 32), static_cast<std::uint32_t>(v));
  }

 private:
  void refill() {
    buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                       lane_, 0x55u},
                      key_);
    ++block_;
    used_ = 0;
  }

  std::uint64_t key_;
  std::uint32_t lane_;
  std::uint64_t block_ = 0;
  PhiloxCounter buf_{};
  int used_ = 2;
};

}  // namespace berrylab

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lebrep {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A block of four 32-bit words is a pure function of (counter, key), so any
/// draw can be regenerated independently of evaluation order.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Independent random streams attached to the same (seed, path).
enum class Stream : std::uint32_t {
  BrownianIncrements = 0,
  RiemannLiouvilleLocal = 1,
};

/// Fills `out` with standard normals z_0, z_1, ... for the given
/// (seed, stream, path). z_k depends only on (seed, stream, path, k).
void fill_standard_normals(std::uint64_t seed, Stream stream, std::uint64_t path,
                           std::span<double> out);

}  // namespace lebrep

#include "lebrep/rng.hpp"

#include <cmath>
#include <numbers>

namespace lebrep {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// Uniform on the open interval (0, 1) from the top 53 bits.
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void fill_standard_normals(std::uint64_t seed, Stream stream, std::uint64_t path,
                           std::span<double> out) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const auto path_lo = static_cast<std::uint32_t>(path);
  const auto path_hi = static_cast<std::uint32_t>(path >> 32);
  const auto stream_id = static_cast<std::uint32_t>(stream);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < out.size(); k += 2) {
    const auto pair = static_cast<std::uint32_t>(k / 2);
    const auto words = Philox4x32::block({pair, path_lo, path_hi, stream_id}, key);
    const double u1 = to_open_unit((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(words[2]) << 32) | words[3]);
    // Box-Muller.
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    out[k] = radius * std::cos(angle);
    if (k + 1 < out.size()) out[k + 1] = radius * std::sin(angle);
  }
}

}  // namespace lebrep

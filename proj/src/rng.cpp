#include "relucond/rng.hpp"

#include <cmath>

#include "relucond/kernels.hpp"

namespace relucond {

namespace philox {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  std::uint32_t n0 = hi1 ^ c[1] ^ k0;
  std::uint32_t n1 = lo1;
  std::uint32_t n2 = hi0 ^ c[3] ^ k1;
  std::uint32_t n3 = lo0;
  c[0] = n0;
  c[1] = n1;
  c[2] = n2;
  c[3] = n3;
}

}  // namespace

std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t tick, std::uint64_t stream) {
  std::uint32_t c[4] = {
      static_cast<std::uint32_t>(tick), static_cast<std::uint32_t>(tick >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c[0], c[1], c[2], c[3]};
}

}  // namespace philox

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngSeed substream(const RngSeed& parent, std::uint64_t i) {
  return RngSeed{parent.seed, splitmix64(parent.stream + 0x9E3779B97F4A7C15ull * (i + 1))};
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double to_unit(std::uint32_t lo, std::uint32_t hi) {
  std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
  // 53 significant bits, offset by half an ulp: strictly inside (0, 1).
  return (static_cast<double>(v >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

double Sampler::uniform01() {
  has_cached_ = false;
  auto w = philox::block(key_, tick_++, stream_);
  return to_unit(w[0], w[1]);
}

double Sampler::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  auto w = philox::block(key_, tick_++, stream_);
  double u1 = to_unit(w[0], w[1]);
  double u2 = to_unit(w[2], w[3]);
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = kTwoPi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t Sampler::next_index(std::uint64_t bound) {
  has_cached_ = false;
  auto w = philox::block(key_, tick_++, stream_);
  std::uint64_t v = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
  // Multiply-shift; bias is ~bound/2^64, immaterial at desk scales.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * bound) >> 64);
}

Matrix gaussian_matrix(std::size_t m, std::size_t n, const RngSeed& seed) {
  if (m < 1 || n < 1) throw InputError("gaussian_matrix: dimensions must be >= 1");
  Matrix a(m, n);
  Sampler s(seed);
  for (double& v : a.data) v = s.normal();
  return a;
}

Vector gaussian_vector(std::size_t n, Sampler& s) {
  Vector v(n);
  for (double& x : v) x = s.normal();
  return v;
}

Vector sample_unit_sphere(std::size_t n, Sampler& s) {
  if (n < 1) throw InputError("sample_unit_sphere: dimension must be >= 1");
  for (;;) {
    Vector v = gaussian_vector(n, s);
    double nrm = std::sqrt(kernels::active().sum_sq(v.data(), v.size()));
    if (nrm > 0.0) {
      for (double& x : v) x /= nrm;
      return v;
    }
    // Exactly-zero draw: measure zero, regenerate from the next ticks.
  }
}

Vector sample_unit_sphere(std::size_t n, const RngSeed& seed) {
  Sampler s(seed);
  return sample_unit_sphere(n, s);
}

}  // namespace relucond

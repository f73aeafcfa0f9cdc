#include "vmkl/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmkl {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key)
{
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t stream_hash(std::string_view name)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return splitmix64(h);
}

Rng::Rng(std::uint64_t seed, std::uint64_t substream)
  : key_(splitmix64(seed))
  , substream_(substream)
{
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t trial, std::string_view name)
{
  return Rng(seed, splitmix64(trial) ^ stream_hash(name));
}

Rng Rng::split(std::string_view name) const
{
  Rng child(0, splitmix64(substream_ ^ stream_hash(name)));
  child.key_ = splitmix64(key_ ^ 0x5851F42D4C957F2Dull);
  return child;
}

void Rng::refill()
{
  const std::array<std::uint32_t, 4> ctr{
    static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
    static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(key_),
                                         static_cast<std::uint32_t>(key_ >> 32)};
  const auto out = philox4x32(ctr, key);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
  ++block_;
}

Rng::result_type Rng::operator()()
{
  if (buffered_ == 0)
    refill();
  return buffer_[2 - buffered_--];
}

double Rng::uniform()
{
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open()
{
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

// Marsaglia & Tsang (2000); shapes below one use the U^(1/a) boost.
double Rng::gamma(double shape)
{
  if (!(shape > 0.0))
    throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0)
    return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x)
      return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double Rng::beta(double a, double b)
{
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

} // namespace vmkl

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace vmkl {

/// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stable 64-bit hash for stream names (FNV-1a followed by a SplitMix64 finalizer).
std::uint64_t stream_hash(std::string_view name);

/// Counter-based random stream.
///
/// A stream is identified by a 64-bit key and a 64-bit substream id; the
/// block counter advances monotonically. Two streams with different
/// (key, substream) pairs never share blocks, so parallel trials stay
/// reproducible regardless of scheduling.
class Rng
{
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t substream = 0);

  /// Stream for a named purpose inside a trial, e.g. `Rng::stream(seed, trial, "obs_B")`.
  static Rng stream(std::uint64_t seed, std::uint64_t trial, std::string_view name);

  /// Independent child stream; the parent is not advanced.
  Rng split(std::string_view name) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1); safe for logarithms.
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double gamma(double shape);
  double beta(double a, double b);

  std::uint64_t key() const { return key_; }
  std::uint64_t substream() const { return substream_; }
  std::uint64_t blocks_used() const { return block_; }

private:
  void refill();

  std::uint64_t key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

} // namespace vmkl

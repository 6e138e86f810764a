#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace dlo {

using Vec2 = Eigen::Vector2d;

/// Over/under sign of a crossing encounter, seen from the tracing strand.
enum class Sign : std::uint8_t { over, under };

inline Sign opposite(Sign s) { return s == Sign::over ? Sign::under : Sign::over; }
inline char sign_char(Sign s) { return s == Sign::over ? 'O' : 'U'; }

// splitmix64 mix, used to derive independent stream seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic RNG. mt19937_64 is fully specified by the standard; the
// distributions are hand-rolled because std::normal_distribution and friends
// are implementation-defined, and scene/report bytes must reproduce anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform01() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Box-Muller normal draw.
  double normal(double mean = 0.0, double stddev = 1.0);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace dlo

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace savsim {

/// Simulation time in whole seconds since midnight of the simulated day.
using Time = std::int64_t;

constexpr Time kSecondsPerHour = 3600;
constexpr Time kSecondsPerDay = 24 * kSecondsPerHour;

using NodeIdx = std::uint32_t;
using LinkIdx = std::uint32_t;
using PersonIdx = std::uint32_t;
using VehicleIdx = std::uint32_t;
using RequestIdx = std::uint32_t;

constexpr std::uint32_t kInvalidIdx = 0xffffffffu;

enum class Mode : std::uint8_t { car, pt, walk, sav };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::car: return "car";
    case Mode::pt: return "pt";
    case Mode::walk: return "walk";
    case Mode::sav: return "sav";
  }
  return "?";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "car") return Mode::car;
  if (s == "pt") return Mode::pt;
  if (s == "walk") return Mode::walk;
  if (s == "sav") return Mode::sav;
  throw std::invalid_argument("unknown mode: " + s);
}

/// Thrown for malformed configuration or input files (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a simulation invariant is broken (CLI exit code 2).
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derives an independent RNG stream from a master seed and salt values, so
/// per-person / per-module draws do not depend on global draw order.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ salt_a) + salt_b));
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Draws an index from a discrete distribution given by nonnegative weights.
inline std::size_t weighted_draw(std::mt19937_64& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  if (total <= 0) throw std::invalid_argument("weighted_draw: nonpositive total weight");
  double r = uniform_real(rng, 0.0, total);
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace savsim

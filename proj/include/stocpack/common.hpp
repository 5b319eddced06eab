#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace stocpack {

// Numerical knobs shared by every module.
namespace tol {
inline constexpr double prob_sum = 1e-9;     // probability sums in instances
inline constexpr double pivot = 1e-10;       // simplex pivot magnitude
inline constexpr double feasibility = 1e-7;  // LP constraint satisfaction
inline constexpr double bound = 1e-9;        // LP variable bounds
inline constexpr double mass = 1e-9;         // "positive mass" while peeling
inline constexpr double reach = 1e-12;       // v* below this counts as unreached
}  // namespace tol

inline constexpr int kInfTime = std::numeric_limits<int>::max();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct InvalidInstance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of trial `index` under master seed `master`. Documented so a single
// trial can be replayed in isolation.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

// Seeded random source. uniform() uses the top 53 bits of mt19937_64 so the
// stream is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  int uniform_int(int lo, int hi) {  // inclusive range
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace stocpack

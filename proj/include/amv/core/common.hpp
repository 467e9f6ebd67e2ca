#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace amv {

/// Largest ambient dimension supported by the fixed-size scratch buffers.
inline constexpr int kMaxDim = 8;

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Scratch coordinates for y = x + r z without heap traffic.
struct Scratch {
  std::array<double, kMaxDim> data{};
  int dim = 0;
  PointView view() const { return {data.data(), static_cast<std::size_t>(dim)}; }
};

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "did it fail" can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad descriptor, bad parameter, violated precondition on user input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A ball or support leaves the computational domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Sampling or solver failure (acceptance floor, non-convergence, tolerance).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box, the only continuum domain shape.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);

  static Box cube(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(PointView x) const;
  double width(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  Point center() const;
  /// Smallest coordinate distance from x to a face of the box.
  double face_distance(PointView x) const;
};

/// Neumaier-compensated accumulator; used for every long quadrature sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---- execution ------------------------------------------------------------

/// Worker count used by parallel_for. Initialised from AMVLAB_WORKERS, else 1.
unsigned worker_count();
void set_worker_count(unsigned workers);

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker
/// and results must be written to per-index slots, so output never depends
/// on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// ---- deterministic random streams -----------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a tag tuple,
/// e.g. (operation id, point index, radius index).
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

/// xoshiro256** generator. Bit-identical across platforms, unlike the
/// standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// 64-bit FNV-1a; stable hash for config provenance.
std::uint64_t fnv1a(std::string_view text);

}  // namespace amv

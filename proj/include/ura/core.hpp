// Core value types shared by every module: small vectors and matrices,
// the uniform cell-centered grid, scalar fields on it, errors, and the
// seeded RNG helpers that back every deterministic sampling contract.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ura {

// ---------------------------------------------------------------------------
// Errors

enum class Err {
  UnknownKind,
  ResolutionTooCoarse,
  EmptySet,
  NoCorkscrew,
  PointOutsideDomain,
  DepthExceedsResolution,
  NotElliptic,
  SolveFailure,
  PoleTooClose,
  SingularMap,
  NonPositivity,
  DomainTooThin,
  EmptyRegion,
  RadiusTooSmall,
  DegeneratePair,
  NotNormalized,
  EmptyDomain,
  FullSphere,
  EmptyIntersection,
  MeasureMissing,
  DepthExhausted,
  SolveBudgetExceeded,
  LatticeMismatch,
  SolutionMissing,
  ZeroDenominator,
  ZeroSetConditionFails,
  ConfigInvalid,
  PipelineStageFailure,
  CacheCorrupt,
  BadArgument,
};

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& what) { throw Error(c, what); }

inline void require(bool ok, Err c, const std::string& what) {
  if (!ok) fail(c, what);
}

// ---------------------------------------------------------------------------
// Small linear algebra (ambient dimension 2 or 3; unused slots stay zero)

struct Vec {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Vec operator+(const Vec& o) const { return {{v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2]}}; }
  Vec operator-(const Vec& o) const { return {{v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2]}}; }
  Vec operator*(double s) const { return {{v[0] * s, v[1] * s, v[2] * s}}; }
};

inline Vec vec2(double x, double y) { return Vec{{x, y, 0.0}}; }
inline Vec vec3(double x, double y, double z) { return Vec{{x, y, z}}; }

inline double dot(const Vec& a, const Vec& b) {
  return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2];
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

// Dense dim x dim matrix stored 3x3 row-major; rows/cols beyond dim are zero.
struct Mat {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat identity(int dim) {
    Mat a;
    for (int i = 0; i < dim; ++i) a(i, i) = 1.0;
    return a;
  }
  static Mat diag(int dim, const Vec& d) {
    Mat a;
    for (int i = 0; i < dim; ++i) a(i, i) = d[i];
    return a;
  }

  Mat operator+(const Mat& o) const {
    Mat r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat operator*(double s) const {
    Mat r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
  Vec apply(const Vec& x, int dim) const {
    Vec y;
    for (int r = 0; r < dim; ++r) {
      double s = 0;
      for (int c = 0; c < dim; ++c) s += (*this)(r, c) * x[c];
      y[r] = s;
    }
    return y;
  }
  Mat transposed() const {
    Mat r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
};

Mat mat_mul(const Mat& a, const Mat& b, int dim);
double mat_det(const Mat& a, int dim);
Mat mat_inverse(const Mat& a, int dim);  // throws SingularMap when not invertible
// Operator norm (largest singular value) of the dim x dim block.
double mat_opnorm(const Mat& a, int dim);
// Symmetric square root of an SPD matrix (used by the normalizing pullback).
Mat mat_sqrt_spd(const Mat& a, int dim);

// ---------------------------------------------------------------------------
// Axis-aligned box

struct Box {
  Vec lo, hi;

  bool contains(const Vec& p, int dim) const {
    for (int k = 0; k < dim; ++k)
      if (p[k] < lo[k] || p[k] > hi[k]) return false;
    return true;
  }
  double side(int k) const { return hi[k] - lo[k]; }
  double max_side(int dim) const {
    double s = 0;
    for (int k = 0; k < dim; ++k) s = std::max(s, side(k));
    return s;
  }
};

// ---------------------------------------------------------------------------
// Uniform cell-centered grid over a box.  Cell (i,j,k) has center
// origin + h*(i+1/2, j+1/2, k+1/2); in 2D the k axis collapses to one cell.

struct Grid {
  Vec origin;
  double h = 0;
  std::array<int, 3> n{1, 1, 1};
  int dim = 2;

  long ncells() const { return static_cast<long>(n[0]) * n[1] * n[2]; }

  long id(int i, int j, int k = 0) const {
    return (static_cast<long>(k) * n[1] + j) * n[0] + i;
  }
  std::array<int, 3> coords(long c) const {
    int i = static_cast<int>(c % n[0]);
    long r = c / n[0];
    int j = static_cast<int>(r % n[1]);
    int k = static_cast<int>(r / n[1]);
    return {i, j, k};
  }
  Vec center(long c) const {
    auto ijk = coords(c);
    Vec p;
    for (int a = 0; a < 3; ++a) p[a] = origin[a] + h * (ijk[a] + 0.5);
    if (dim == 2) p[2] = 0;
    return p;
  }
  bool in_range(int i, int j, int k = 0) const {
    return i >= 0 && i < n[0] && j >= 0 && j < n[1] && k >= 0 && k < n[2];
  }
  // Cell containing p, or -1 when p falls outside the box.
  long cell_of(const Vec& p) const {
    int ijk[3] = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      ijk[a] = static_cast<int>(std::floor((p[a] - origin[a]) / h));
      if (ijk[a] < 0 || ijk[a] >= n[a]) return -1;
    }
    return id(ijk[0], ijk[1], ijk[2]);
  }
  Box box() const {
    Box b;
    b.lo = origin;
    for (int a = 0; a < 3; ++a) b.hi[a] = origin[a] + h * n[a];
    if (dim == 2) b.hi[2] = origin[2];
    return b;
  }
  bool same_layout(const Grid& o) const {
    return dim == o.dim && n == o.n && h == o.h && dist(origin, o.origin) < 1e-12 * h;
  }
};

// Build a grid of spacing h covering box (box sides rounded up to whole cells).
Grid make_grid(const Box& box, double h, int dim);

// ---------------------------------------------------------------------------
// Scalar field on a grid

struct GridField {
  Grid grid;
  std::vector<double> data;

  GridField() = default;
  explicit GridField(const Grid& g, double fill = 0.0) : grid(g), data(g.ncells(), fill) {}

  double& operator[](long c) { return data[c]; }
  double operator[](long c) const { return data[c]; }

  double max_abs() const;
};

// Central-difference gradient at cell c (one-sided at grid edges).
Vec gradient(const GridField& f, long c);

// ---------------------------------------------------------------------------
// Deterministic RNG.  Every sampling operation takes a seed and derives an
// independent stream from it, so results are reproducible across runs.

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed ^ 0x9e3779b97f4a7c15ull) {}

  double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(eng);
  }
  std::int64_t index(std::int64_t n) {
    std::uniform_int_distribution<std::int64_t> d(0, n - 1);
    return d(eng);
  }
  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(eng);
  }
};

// FNV-1a, used for cache keys and report fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);

// Shortest round-trip decimal text for a double (deterministic file output).
std::string format_double(double x);

}  // namespace ura

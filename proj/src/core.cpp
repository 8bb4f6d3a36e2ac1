#include "ura/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

namespace ura {

Mat mat_mul(const Mat& a, const Mat& b, int dim) {
  Mat r;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0;
      for (int k = 0; k < dim; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

double mat_det(const Mat& a, int dim) {
  if (dim == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Mat mat_inverse(const Mat& a, int dim) {
  double det = mat_det(a, dim);
  require(std::abs(det) > 1e-14, Err::SingularMap, "matrix is singular");
  Mat r;
  if (dim == 2) {
    r(0, 0) = a(1, 1) / det;
    r(0, 1) = -a(0, 1) / det;
    r(1, 0) = -a(1, 0) / det;
    r(1, 1) = a(0, 0) / det;
    return r;
  }
  auto cof = [&](int i, int j) {
    int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
    return a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(j, i) = cof(i, j) / det;
  return r;
}

double mat_opnorm(const Mat& a, int dim) {
  // Power iteration on A^T A; dimensions are tiny so 60 rounds is plenty.
  Mat ata = mat_mul(a.transposed(), a, dim);
  Vec x;
  for (int i = 0; i < dim; ++i) x[i] = 1.0 / std::sqrt(static_cast<double>(dim));
  double lam = 0;
  for (int it = 0; it < 60; ++it) {
    Vec y = ata.apply(x, dim);
    double ny = norm(y);
    if (ny == 0) return 0;
    lam = ny;
    x = y * (1.0 / ny);
  }
  return std::sqrt(lam);
}

// Jacobi eigen-decomposition for a symmetric 2x2/3x3 block.
static void sym_eigen(const Mat& a, int dim, Mat& q, Vec& lam) {
  Mat s = a;
  q = Mat::identity(dim);
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) off += s(i, j) * s(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < dim; ++p)
      for (int r = p + 1; r < dim; ++r) {
        if (std::abs(s(p, r)) < 1e-300) continue;
        double theta = (s(r, r) - s(p, p)) / (2 * s(p, r));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), sn = t * c;
        Mat g = Mat::identity(3);
        g(p, p) = c;
        g(r, r) = c;
        g(p, r) = sn;
        g(r, p) = -sn;
        s = mat_mul(mat_mul(g.transposed(), s, dim), g, dim);
        q = mat_mul(q, g, dim);
      }
  }
  for (int i = 0; i < dim; ++i) lam[i] = s(i, i);
}

Mat mat_sqrt_spd(const Mat& a, int dim) {
  Mat q;
  Vec lam;
  sym_eigen(a, dim, q, lam);
  for (int i = 0; i < dim; ++i) {
    require(lam[i] > 0, Err::SingularMap, "matrix is not positive definite");
    lam[i] = std::sqrt(lam[i]);
  }
  Mat d = Mat::diag(dim, lam);
  return mat_mul(mat_mul(q, d, dim), q.transposed(), dim);
}

Grid make_grid(const Box& box, double h, int dim) {
  require(h > 0, Err::BadArgument, "grid spacing must be positive");
  Grid g;
  g.dim = dim;
  g.h = h;
  g.origin = box.lo;
  for (int a = 0; a < dim; ++a) {
    double len = box.hi[a] - box.lo[a];
    require(len > 0, Err::BadArgument, "box side must be positive");
    g.n[a] = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
  }
  if (dim == 2) {
    g.n[2] = 1;
    g.origin[2] = 0;
  }
  return g;
}

double GridField::max_abs() const {
  double m = 0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

Vec gradient(const GridField& f, long c) {
  const Grid& g = f.grid;
  auto ijk = g.coords(c);
  Vec gr;
  for (int a = 0; a < g.dim; ++a) {
    int lo[3] = {ijk[0], ijk[1], ijk[2]};
    int hi[3] = {ijk[0], ijk[1], ijk[2]};
    lo[a] -= 1;
    hi[a] += 1;
    bool has_lo = g.in_range(lo[0], lo[1], lo[2]);
    bool has_hi = g.in_range(hi[0], hi[1], hi[2]);
    double fl = has_lo ? f[g.id(lo[0], lo[1], lo[2])] : f[c];
    double fh = has_hi ? f[g.id(hi[0], hi[1], hi[2])] : f[c];
    double span = (has_lo && has_hi) ? 2 * g.h : (has_lo || has_hi) ? g.h : 1;
    gr[a] = (fh - fl) / span;
  }
  return gr;
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  return fnv1a(s.data(), s.size(), seed);
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace ura

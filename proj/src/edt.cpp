#include "ura/edt.hpp"

#include <limits>

namespace ura {

static constexpr double kInf = std::numeric_limits<double>::infinity();
// Finite stand-in for "no seed": far larger than any reachable squared cell
// distance, yet safe in the envelope arithmetic.
static constexpr double kBig = 1e15;

// 1D squared distance transform of a sampled function f along a strided row
// (lower envelope of parabolas).
static void edt_1d(std::vector<double>& f, long start, long stride, int len,
                   std::vector<int>& v, std::vector<double>& z, std::vector<double>& d) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < len; ++q) {
    double fq = f[start + q * stride];
    double s;
    while (true) {
      double fv = f[start + v[k] * stride];
      s = ((fq + static_cast<double>(q) * q) - (fv + static_cast<double>(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {  // k == 0 and the new parabola dominates everywhere
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      k = 0;
    } else {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
  }
  k = 0;
  for (int q = 0; q < len; ++q) {
    while (z[k + 1] < q) ++k;
    double fv = f[start + v[k] * stride];
    d[q] = (static_cast<double>(q) - v[k]) * (q - v[k]) + fv;
  }
  for (int q = 0; q < len; ++q) f[start + q * stride] = d[q];
}

std::vector<double> distance_transform(const Grid& grid, const std::vector<std::uint8_t>& seeds) {
  const long nc = grid.ncells();
  std::vector<double> sq(nc);
  for (long c = 0; c < nc; ++c) sq[c] = seeds[c] ? 0.0 : kBig;

  int maxlen = std::max({grid.n[0], grid.n[1], grid.n[2]});
  std::vector<int> v(maxlen + 1);
  std::vector<double> z(maxlen + 2), d(maxlen);

  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      edt_1d(sq, grid.id(0, j, k), 1, grid.n[0], v, z, d);
  for (int k = 0; k < grid.n[2]; ++k)
    for (int i = 0; i < grid.n[0]; ++i)
      edt_1d(sq, grid.id(i, 0, k), grid.n[0], grid.n[1], v, z, d);
  if (grid.n[2] > 1)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i)
        edt_1d(sq, grid.id(i, j, 0), static_cast<long>(grid.n[0]) * grid.n[1], grid.n[2], v, z, d);

  for (long c = 0; c < nc; ++c) sq[c] = (sq[c] >= kBig) ? kInf : grid.h * std::sqrt(sq[c]);
  return sq;
}

}  // namespace ura

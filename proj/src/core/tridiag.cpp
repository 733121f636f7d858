#include "core/tridiag.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace quasispec {

TridiagSpectrum tridiag_spectrum(std::vector<double> d, std::vector<double> off, std::size_t site) {
  const int n = static_cast<int>(d.size());
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty matrix");
  if (off.size() + 1 != d.size()) throw Error(ErrorCode::invalid_argument, "off-diagonal must have n - 1 entries");
  if (site >= d.size()) throw Error(ErrorCode::invalid_argument, "tracked site outside the matrix");
  std::vector<double> e(off);
  e.push_back(0.0);
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  z[site] = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 64) throw Error(ErrorCode::precision_exhausted, "QL iteration did not converge", l);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagSpectrum out;
  out.values.reserve(d.size());
  out.weights.reserve(d.size());
  for (std::size_t k : order) {
    out.values.push_back(d[k]);
    out.weights.push_back(z[k] * z[k]);
  }
  return out;
}

}  // namespace quasispec

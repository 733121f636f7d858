#pragma once

#include <cstddef>
#include <vector>

namespace quasispec {

struct TridiagSpectrum {
  std::vector<double> values;   // ascending
  std::vector<double> weights;  // squared component of the tracked row, same order
};

/// Implicit QL with Wilkinson shifts on the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (off[i] couples i and i+1). Only the
/// eigenvector row `site` is accumulated: O(n^2) time, O(n) memory.
/// Throws precision_exhausted when an eigenvalue fails to converge.
TridiagSpectrum tridiag_spectrum(std::vector<double> diag, std::vector<double> off, std::size_t site);

}  // namespace quasispec

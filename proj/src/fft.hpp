#pragma once

// Thin FFTW wrapper for the row-wise sinogram filters. Internal to src/.

#include <vector>

namespace tvscg::detail {

/// In-place per-row spectral filter: each of n_rows rows of length n is
/// DFT'd, bin j is scaled by gains[j], and the row is transformed back
/// (real transforms, so no imaginary residue survives by construction).
/// gains must have length n; only bins 0..n/2 are read (the rest mirror).
void filter_rows_inplace(std::vector<double>& data, int n_rows, int n,
                         const std::vector<double>& gains);

} // namespace tvscg::detail

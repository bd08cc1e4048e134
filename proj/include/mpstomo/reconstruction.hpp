#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpstomo/dense_state.hpp"
#include "mpstomo/extracted_tensors.hpp"
#include "mpstomo/mps_state.hpp"
#include "mpstomo/tomography.hpp"

namespace mpstomo {

/// T_i^z = I (x) |0><z|_i (x) I on the (k-1)-site bond space, for i = 0..k-2.
/// Empty for k = 1.
std::vector<SiteTensor> extract_T(int k, int d);

/// V^z = (I (x) <z|_last) U^dagger (|0>_first (x) I) for one disentangler.
SiteTensor extract_V(const Matrix& u, int d, int k);

ExtractedTensors extract_tensors(const TomographyResult& result);

/// Fills result.tensors and returns a reference to them.
const ExtractedTensors& attach_tensors(TomographyResult& result);

/// Product-formula amplitude for a base-d digit string (site 0 first),
/// evaluated as a row vector swept left to right.
Complex amplitude(const ExtractedTensors& tensors, std::span<const int> digits);
Complex amplitude(const ExtractedTensors& tensors, std::string_view digits);

/// The same chain as an MpsState: boundaries <0..0| and eta, bonds d^(k-1).
/// With `recompress_tol`, bonds are additionally truncated by compress().
MpsState to_mps(const ExtractedTensors& tensors, std::optional<double> recompress_tol = {});

/// |<a|b>|, in [0, 1] for normalized inputs; insensitive to global phase.
double fidelity(const DenseState& a, const DenseState& b);
double fidelity(const MpsState& a, const MpsState& b);
double fidelity(const MpsState& a, const DenseState& b);
double fidelity(const DenseState& a, const MpsState& b);

/// min over theta of || a - e^{i theta} b ||, evaluated on the aligned
/// vectors directly (not via sqrt(2 - 2F), which loses half the digits).
double phase_aligned_distance(const DenseState& a, const DenseState& b);

}  // namespace mpstomo

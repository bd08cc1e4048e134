#pragma once

#include <vector>

#include "mpstomo/mps_state.hpp"

namespace mpstomo {

/// Tensors of the reconstructed chain
///
///   c_z = <0..0| T_1^{z_1} ... T_{k-1}^{z_{k-1}} V_1^{z_k} ... V_{n-k+1}^{z_n} |eta>
///
/// Every operator acts on the d^(k-1)-dimensional bond space.
struct ExtractedTensors {
  int n = 0;
  int d = 2;
  int k = 1;
  std::vector<SiteTensor> t;  // k-1 entries
  std::vector<SiteTensor> v;  // n-k+1 entries
  Vector eta;

  Eigen::Index bond() const { return eta.size(); }
};

}  // namespace mpstomo

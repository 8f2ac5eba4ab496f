#pragma once

#include <cstddef>

#include "tomobss/types.hpp"

namespace tomobss {

/// (1/M) G G^H.
HermitianMatrix sample_covariance(const ObservationStack& stack);

struct SignCovariance {
  HermitianMatrix matrix;
  std::size_t skipped_columns = 0;  // columns with norm below 1e-300
};

/// (1/M) sum_m g_m g_m^H / ||g_m||^2. Near-zero columns are skipped and
/// counted but still contribute to M, so trace = kept / M.
SignCovariance sign_covariance(const ObservationStack& stack);

/// H K H with H = I - J/N: centers the kernel (Gram) matrix in feature space.
HermitianMatrix center_kernel(const HermitianMatrix& kernel);

}  // namespace tomobss

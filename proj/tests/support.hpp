#pragma once

#include "covertbeam/model.hpp"

namespace testing_support {

/// n = 5120, 32 x 8 codebooks, 0.5 dB backoff, rho = 1/L_a.
inline covertbeam::SystemConfig reference_config(double kappa_b_db = -5.0, double kappa_w_db = -15.0) {
    using namespace covertbeam;
    return SystemConfig::from_codebooks(5120, 32, 8, 0.5, db_to_linear(kappa_b_db), db_to_linear(kappa_w_db),
                                        1.0 / 32.0);
}

} // namespace testing_support

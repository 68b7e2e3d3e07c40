// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "uavplan/kernels.hpp"

namespace uavplan::kernels {

LinkBudget make_link_budget(const ChannelParams& cp, double slot_duration_s) {
    LinkBudget lb{};
    lb.bs_height = cp.bs_height_m;
    lb.alpha = cp.alpha;
    lb.beta = cp.beta_per_deg;
    lb.eta_los = cp.eta_los_db;
    lb.eta_nlos = cp.eta_nlos_db;
    lb.base_pl_db = cp.fs_const_db + 20.0 * std::log10(cp.carrier_freq_mhz);
    lb.snr0 = std::pow(10.0, (cp.tx_power_dbm - cp.noise_power_dbm) / 10.0);
    lb.width_slot = cp.bandwidth_hz * slot_duration_s;
    return lb;
}

// Reference kernel. Keeps the exact operation order the AVX2 variant mirrors:
// distance, signed elevation, sigmoid LoS mix, free-space + excess pathloss,
// Shannon rate.
void link_rate_batch_scalar(const double* x, const double* y, const double* z,
                            std::size_t n, const LinkBudget& lb, double* out) {
    constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
    constexpr double kLn10Over10 = 2.30258509299404568402 / 10.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = z[i] - lb.bs_height;
        const double d = std::sqrt(x[i] * x[i] + y[i] * y[i] + dz * dz);
        const double phi = std::asin(dz / d) * kRadToDeg;
        const double p_los = 1.0 / (1.0 + lb.alpha * std::exp(-lb.beta * (phi - lb.alpha)));
        const double pl_db = lb.base_pl_db + 20.0 * std::log10(d / 1000.0) + lb.eta_nlos -
                             (lb.eta_nlos - lb.eta_los) * p_los;
        const double snr = lb.snr0 * std::exp(-kLn10Over10 * pl_db);
        out[i] = lb.width_slot * std::log2(1.0 + snr);
    }
}

}  // namespace uavplan::kernels

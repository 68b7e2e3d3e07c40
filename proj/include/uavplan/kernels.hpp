// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "uavplan/types.hpp"

namespace uavplan::kernels {

// Precomputed link-budget constants so batch kernels avoid re-deriving them
// per position. Produced once per scenario.
struct LinkBudget {
    double bs_height;     // H, meters
    double alpha;         // LoS sigmoid midpoint, degrees
    double beta;          // LoS sigmoid slope, per degree
    double eta_los;       // dB
    double eta_nlos;      // dB
    double base_pl_db;    // L_FS + 20 log10(f_MHz); the 20 log10(d_km) term is per-position
    double snr0;          // P_T(mW) / sigma^2(mW), pathloss applied per-position
    double width_slot;    // W_B * slot_duration, converts log2(1+snr) to bits per slot
};

LinkBudget make_link_budget(const ChannelParams& cp, double slot_duration_s);

// Link rate in bits/slot for n positions. Out must hold n doubles.
// Arrays need no particular alignment.
using RateBatchFn = void (*)(const double* x, const double* y, const double* z,
                             std::size_t n, const LinkBudget& lb, double* out);

// Dispatched entry point; picks the widest kernel the CPU supports.
void link_rate_batch(const double* x, const double* y, const double* z,
                     std::size_t n, const LinkBudget& lb, double* out);

// Rates along the straight line origin + s[i] * dir (dir is a unit vector).
void link_rate_along_line(const Position3& origin, const Position3& dir,
                          const double* s, std::size_t n, const LinkBudget& lb, double* out);

// Single-position convenience wrapper over the dispatched batch kernel.
double link_rate_at(const Position3& p, const LinkBudget& lb);

// Scalar reference kernel: a plain loop over the channel-model chain.
void link_rate_batch_scalar(const double* x, const double* y, const double* z,
                            std::size_t n, const LinkBudget& lb, double* out);

#if defined(__x86_64__) || defined(_M_X64)
// AVX2+FMA variant, 4 doubles per lane. Only selected when the CPU reports
// both features.
void link_rate_batch_avx2(const double* x, const double* y, const double* z,
                          std::size_t n, const LinkBudget& lb, double* out);
#endif

enum class Kernel { auto_detect, scalar, avx2 };

// Overrides dispatch, primarily for equivalence tests and the CLI flag.
// Throws std::invalid_argument if the requested kernel is unsupported here.
void force_kernel(Kernel k);

// Name of the kernel the dispatcher currently resolves to.
std::string active_kernel_name();

}  // namespace uavplan::kernels

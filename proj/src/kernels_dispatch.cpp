// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <stdexcept>
#include <vector>

#include "uavplan/kernels.hpp"

namespace uavplan::kernels {

namespace {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<RateBatchFn> g_rate_fn{nullptr};

RateBatchFn resolve(Kernel k) {
    switch (k) {
        case Kernel::scalar:
            return &link_rate_batch_scalar;
        case Kernel::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (avx2_available()) return &link_rate_batch_avx2;
#endif
            throw std::invalid_argument("avx2 kernel requested but not supported on this CPU");
        case Kernel::auto_detect:
        default:
#if defined(__x86_64__) || defined(_M_X64)
            if (avx2_available()) return &link_rate_batch_avx2;
#endif
            return &link_rate_batch_scalar;
    }
}

RateBatchFn current() {
    RateBatchFn fn = g_rate_fn.load(std::memory_order_acquire);
    if (!fn) {
        fn = resolve(Kernel::auto_detect);
        g_rate_fn.store(fn, std::memory_order_release);
    }
    return fn;
}

}  // namespace

void force_kernel(Kernel k) { g_rate_fn.store(resolve(k), std::memory_order_release); }

std::string active_kernel_name() {
    return current() == &link_rate_batch_scalar ? "scalar" : "avx2";
}

void link_rate_batch(const double* x, const double* y, const double* z,
                     std::size_t n, const LinkBudget& lb, double* out) {
    current()(x, y, z, n, lb, out);
}

void link_rate_along_line(const Position3& origin, const Position3& dir,
                          const double* s, std::size_t n, const LinkBudget& lb, double* out) {
    std::vector<double> xs(n), ys(n), zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = origin.x + s[i] * dir.x;
        ys[i] = origin.y + s[i] * dir.y;
        zs[i] = origin.z + s[i] * dir.z;
    }
    link_rate_batch(xs.data(), ys.data(), zs.data(), n, lb, out);
}

double link_rate_at(const Position3& p, const LinkBudget& lb) {
    double out;
    link_rate_batch(&p.x, &p.y, &p.z, 1, lb, &out);
    return out;
}

}  // namespace uavplan::kernels

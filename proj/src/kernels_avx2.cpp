// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA link-rate kernel, 4 doubles per iteration. The vector exp/log/asin
// below use the usual range reductions with minimax/Taylor tails sized for
// ~1 ulp; the equivalence suite pins the scalar/AVX2 agreement bound.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "uavplan/kernels.hpp"

namespace uavplan::kernels {

namespace {

inline __m256d vm_set1(double v) { return _mm256_set1_pd(v); }

// Exact int64 -> double for |v| < 2^51: biasing by 2^52 + 2^51 keeps every
// intermediate inside [2^52, 2^53) where the ulp is exactly 1.
inline __m256d vm_i64_to_f64(__m256i v) {
    const __m256i magic_bits = _mm256_set1_epi64x(0x4338000000000000LL);
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, magic_bits)), magic);
}

// exp(x) for |x| <= ~700. Cody-Waite reduction, degree-13 Taylor tail,
// exponent reassembled through the IEEE bit layout.
inline __m256d vm_exp(__m256d x) {
    const __m256d log2e = vm_set1(1.44269504088896340736);
    const __m256d ln2_hi = vm_set1(6.93147180369123816490e-01);
    const __m256d ln2_lo = vm_set1(1.90821492927058770002e-10);

    x = _mm256_max_pd(x, vm_set1(-708.0));
    x = _mm256_min_pd(x, vm_set1(708.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = vm_set1(1.0 / 6227020800.0);  // 1/13!
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(0.5));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0));
    p = _mm256_fmadd_pd(p, r, vm_set1(1.0));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i two_n =
        _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(two_n));
}

// ln(x) for normal positive x. Mantissa reduced to [sqrt(1/2), sqrt(2)),
// atanh series in t = (m-1)/(m+1) up to t^21.
inline __m256d vm_log(__m256d x) {
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);

    const __m256i bits = _mm256_castpd_si256(x);
    __m256i e64 = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    // fold m in [sqrt(2), 2) down by one octave
    const __m256d sqrt2 = vm_set1(1.41421356237309514547);
    const __m256d fold = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, vm_set1(0.5)), fold);
    const __m256d e = _mm256_add_pd(_mm256_blendv_pd(vm_set1(0.0), vm_set1(1.0), fold),
                                    vm_i64_to_f64(e64));

    const __m256d one = vm_set1(1.0);
    const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d t2 = _mm256_mul_pd(t, t);

    __m256d p = vm_set1(2.0 / 21.0);
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 19.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 17.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 15.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 13.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 11.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 9.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 7.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 5.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0 / 3.0));
    p = _mm256_fmadd_pd(p, t2, vm_set1(2.0));

    const __m256d ln2_hi = vm_set1(6.93147180369123816490e-01);
    const __m256d ln2_lo = vm_set1(1.90821492927058770002e-10);
    __m256d r = _mm256_fmadd_pd(e, ln2_lo, _mm256_mul_pd(t, p));
    return _mm256_fmadd_pd(e, ln2_hi, r);
}

// asin(x) on [-1, 1], fdlibm-style rational kernel with the half-angle
// identity above |x| = 0.5.
inline __m256d vm_asin(__m256d x) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
    const __m256d ax = _mm256_and_pd(x, abs_mask);
    const __m256d sign = _mm256_andnot_pd(abs_mask, x);

    const __m256d half = vm_set1(0.5);
    const __m256d big = _mm256_cmp_pd(ax, half, _CMP_GT_OQ);

    // z = x^2 in the small branch, (1-|x|)/2 in the large branch
    const __m256d z_small = _mm256_mul_pd(ax, ax);
    const __m256d z_big = _mm256_mul_pd(_mm256_sub_pd(vm_set1(1.0), ax), half);
    const __m256d z = _mm256_blendv_pd(z_small, z_big, big);

    __m256d pnum = vm_set1(3.47933107596021167570e-05);
    pnum = _mm256_fmadd_pd(pnum, z, vm_set1(7.91534994289814532176e-04));
    pnum = _mm256_fmadd_pd(pnum, z, vm_set1(-4.00555345006794114027e-02));
    pnum = _mm256_fmadd_pd(pnum, z, vm_set1(2.01212532134862925881e-01));
    pnum = _mm256_fmadd_pd(pnum, z, vm_set1(-3.25565818622400915405e-01));
    pnum = _mm256_fmadd_pd(pnum, z, vm_set1(1.66666666666666657415e-01));
    pnum = _mm256_mul_pd(pnum, z);

    __m256d pden = vm_set1(7.70381505559019352791e-02);
    pden = _mm256_fmadd_pd(pden, z, vm_set1(-6.88283971605453293030e-01));
    pden = _mm256_fmadd_pd(pden, z, vm_set1(2.02094576023350569471e+00));
    pden = _mm256_fmadd_pd(pden, z, vm_set1(-2.40339491173441421878e+00));
    pden = _mm256_fmadd_pd(pden, z, vm_set1(1.0));

    const __m256d rz = _mm256_div_pd(pnum, pden);

    const __m256d res_small = _mm256_fmadd_pd(ax, rz, ax);

    const __m256d pio2 = vm_set1(1.57079632679489655800e+00);
    const __m256d s = _mm256_sqrt_pd(z);
    const __m256d res_big =
        _mm256_sub_pd(pio2, _mm256_mul_pd(vm_set1(2.0), _mm256_fmadd_pd(s, rz, s)));

    return _mm256_or_pd(_mm256_blendv_pd(res_small, res_big, big), sign);
}

}  // namespace

void link_rate_batch_avx2(const double* x, const double* y, const double* z,
                          std::size_t n, const LinkBudget& lb, double* out) {
    constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
    constexpr double kLn10Over10 = 2.30258509299404568402 / 10.0;
    constexpr double k20OverLn10 = 20.0 / 2.30258509299404568402;
    constexpr double kInvLn2 = 1.44269504088896340736;

    const __m256d vh = vm_set1(lb.bs_height);
    const __m256d valpha = vm_set1(lb.alpha);
    const __m256d vbeta = vm_set1(lb.beta);
    const __m256d veta_n = vm_set1(lb.eta_nlos);
    const __m256d veta_span = vm_set1(lb.eta_nlos - lb.eta_los);
    const __m256d vbase = vm_set1(lb.base_pl_db);
    const __m256d vsnr0 = vm_set1(lb.snr0);
    const __m256d vwidth = vm_set1(lb.width_slot);
    const __m256d one = vm_set1(1.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vz = _mm256_loadu_pd(z + i);

        const __m256d dz = _mm256_sub_pd(vz, vh);
        __m256d d2 = _mm256_mul_pd(vx, vx);
        d2 = _mm256_fmadd_pd(vy, vy, d2);
        d2 = _mm256_fmadd_pd(dz, dz, d2);
        const __m256d d = _mm256_sqrt_pd(d2);

        const __m256d phi =
            _mm256_mul_pd(vm_asin(_mm256_div_pd(dz, d)), vm_set1(kRadToDeg));
        const __m256d sig =
            vm_exp(_mm256_mul_pd(_mm256_sub_pd(valpha, phi), vbeta));  // exp(-beta(phi-alpha))
        const __m256d p_los =
            _mm256_div_pd(one, _mm256_fmadd_pd(valpha, sig, one));

        const __m256d log_dkm = vm_log(_mm256_mul_pd(d, vm_set1(1e-3)));
        __m256d pl = _mm256_fmadd_pd(log_dkm, vm_set1(k20OverLn10), vbase);
        pl = _mm256_add_pd(pl, veta_n);
        pl = _mm256_fnmadd_pd(veta_span, p_los, pl);

        const __m256d snr =
            _mm256_mul_pd(vsnr0, vm_exp(_mm256_mul_pd(pl, vm_set1(-kLn10Over10))));
        const __m256d rate = _mm256_mul_pd(
            vwidth, _mm256_mul_pd(vm_log(_mm256_add_pd(one, snr)), vm_set1(kInvLn2)));
        _mm256_storeu_pd(out + i, rate);
    }
    if (i < n) link_rate_batch_scalar(x + i, y + i, z + i, n - i, lb, out + i);
}

}  // namespace uavplan::kernels

#endif  // x86_64

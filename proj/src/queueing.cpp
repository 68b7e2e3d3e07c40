// SPDX-License-Identifier: Apache-2.0
#include "uavplan/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavplan::queueing {

namespace {

constexpr double kPoleEps = 1e-6;

// The closed form has poles at rho = 1 (every band), sqrt(rho) = 2 (exponent
// denominators) and rho = (K+1)^2 (the pi_0 denominator exponent crosses
// zero). Evaluate just outside, on the side the input came from. The third
// pole needs a wider guard: its bands grow like 1/(rho - s), and a 1e-6
// offset would leave sums accurate to only ~1e-6 after cancellation.
double perturb_load(double rho, int capacity) {
    if (!(rho > 0.0)) throw std::domain_error("queue load must be positive");
    for (double s : {1.0, 4.0}) {
        if (std::fabs(rho - s) < kPoleEps) return rho >= s ? s + kPoleEps : s - kPoleEps;
    }
    const double s = (static_cast<double>(capacity) + 1.0) * (capacity + 1.0);
    const double guard = 1e-3 * s;
    if (std::fabs(rho - s) < guard) return rho >= s ? s + guard : s - guard;
    return rho;
}

struct SignedLog {
    double sign;     // -1 or +1
    double log_abs;  // log(|value|)
};

// log-magnitude form of exp(t) - 1, stable for any t.
SignedLog log_expm1(double t) {
    if (t > 709.0) return {1.0, t + std::log1p(-std::exp(-t))};
    const double d = std::expm1(t);
    return {d < 0.0 ? -1.0 : 1.0, std::log(std::fabs(d))};
}

// Rounding-scale excursions outside [0, 1] are clipped; genuine ones (the
// approximation outside its validity regime) are preserved.
double clip_rounding(double p) {
    if (p < 0.0 && p > -1e-12) return 0.0;
    if (p > 1.0 && p < 1.0 + 1e-12) return 1.0;
    return p;
}

}  // namespace

double SteadyState::sum() const {
    double s = 0.0;
    for (double v : pi) s += v;
    return s;
}

bool SteadyState::probabilistic() const {
    return std::all_of(pi.begin(), pi.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
}

double service_time(double packet_size_bits, double rate_bits_per_slot) {
    if (rate_bits_per_slot <= 0.0) throw infeasible_error("no link: sending rate is zero");
    return packet_size_bits / rate_bits_per_slot;
}

SteadyState steady_state(const QueueParams& qp) {
    const int k = qp.capacity;
    if (k < 2) throw std::invalid_argument("buffer capacity K must be >= 2");
    const double rho = perturb_load(qp.load(), k);
    const double lnr = std::log(rho);
    const double sr = std::sqrt(rho);

    const double e1 = 2.0 * (k + 1 - sr) / (2.0 - sr);
    const double e2 = (2.0 * k - sr) / (2.0 - sr);

    const SignedLog den = log_expm1(e1 * lnr);           // rho^E1 - 1
    const SignedLog den_mid = log_expm1((k - 1) * lnr);  // rho^(K-1) - 1

    const double log_rm1 = std::log(std::fabs(rho - 1.0));
    const double sign_rm1 = rho > 1.0 ? 1.0 : -1.0;

    SteadyState ss;
    ss.pi.assign(static_cast<std::size_t>(k) + 1, 0.0);
    const double pi0 = sign_rm1 * den.sign * std::exp(log_rm1 - den.log_abs);
    const double pik = sign_rm1 * den.sign * std::exp(e2 * lnr + log_rm1 - den.log_abs);
    ss.pi[0] = clip_rounding(pi0);
    ss.pi[static_cast<std::size_t>(k)] = clip_rounding(pik);

    // (rho - 1) / (rho^(K-1) - 1) is positive on both sides of rho = 1
    const double mass = 1.0 - pi0 - pik;
    const double log_coef = log_rm1 - den_mid.log_abs;
    for (int i = 1; i <= k - 1; ++i) {
        ss.pi[static_cast<std::size_t>(i)] =
            clip_rounding(std::exp(log_coef + (i - 1) * lnr) * mass);
    }
    return ss;
}

long long completion_index(const CompletionQuery& cq) {
    const double v = cq.required_packets +
                     (cq.start_buffer_bits -
                      cq.rate_bits_per_slot * static_cast<double>(cq.sensing_slots)) /
                         cq.packet_size_bits;
    const double c = std::ceil(std::clamp(v, -1e18, 1e18));
    return static_cast<long long>(c);
}

double completion_probability(const CompletionQuery& cq, const SteadyState& ss) {
    const long long m = completion_index(cq);
    if (m <= 0) return 1.0;
    if (m > ss.capacity()) return 0.0;
    double p = 0.0;
    for (int i = static_cast<int>(m); i <= ss.capacity(); ++i)
        p += ss.pi[static_cast<std::size_t>(i)];
    return std::clamp(p, 0.0, 1.0);
}

double rho_star(const SteadyState& ss, const QueueParams& qp, double min_prob) {
    const int k = qp.capacity;
    const double rho = perturb_load(qp.load(), k);
    const double pi0 = ss.pi.front();
    const double pik = ss.pi.back();
    const double mass = 1.0 - pi0 - pik;
    const double rho_km1 = std::exp((k - 1) * std::log(rho));
    return (1.0 - rho_km1) * (min_prob - pik) / mass + rho_km1;
}

long long brute_force_min_sensing_time(double required_packets, double start_buffer_bits,
                                       double rate_bits_per_slot, const QueueParams& qp,
                                       double min_prob, double packet_size_bits,
                                       long long cap_slots) {
    if (rate_bits_per_slot <= 0.0) throw infeasible_error("no link: sending rate is zero");
    const SteadyState ss = steady_state(qp);
    CompletionQuery cq;
    cq.required_packets = required_packets;
    cq.start_buffer_bits = start_buffer_bits;
    cq.rate_bits_per_slot = rate_bits_per_slot;
    cq.packet_size_bits = packet_size_bits;
    cq.capacity = qp.capacity;
    for (long long d = 1; d <= cap_slots; ++d) {
        cq.sensing_slots = d;
        if (completion_probability(cq, ss) >= min_prob) return d;
    }
    throw infeasible_error("no sensing duration up to the cap reaches the completion threshold");
}

SensingTimeResult min_sensing_time(double required_packets, double start_buffer_bits,
                                   double rate_bits_per_slot, const QueueParams& qp,
                                   double min_prob, double packet_size_bits,
                                   long long cap_slots) {
    if (rate_bits_per_slot <= 0.0) throw infeasible_error("no link: sending rate is zero");
    const SteadyState ss = steady_state(qp);
    const double rho = perturb_load(qp.load(), qp.capacity);
    const double mass = 1.0 - ss.pi.front() - ss.pi.back();

    // Closed-form domain: positive middle-band mass keeps the occupancy tail
    // monotone in the index, and rho* must stay inside the log's domain.
    if (mass > 1e-12) {
        const double rstar = rho_star(ss, qp, min_prob);
        if (rstar > 0.0 && std::isfinite(rstar)) {
            long long mstar =
                1 + static_cast<long long>(std::floor(std::log(rstar) / std::log(rho)));
            mstar = std::min<long long>(mstar, qp.capacity);
            const double x = service_time(packet_size_bits, rate_bits_per_slot);
            const double arg =
                x * (required_packets + start_buffer_bits / packet_size_bits -
                     static_cast<double>(mstar));
            const long long delta =
                std::max<long long>(static_cast<long long>(std::ceil(std::min(arg, 1e18))), 1);
            if (delta > cap_slots)
                throw infeasible_error("closed-form sensing duration exceeds the cap");
            return {delta, true};
        }
    }
    return {brute_force_min_sensing_time(required_packets, start_buffer_bits,
                                         rate_bits_per_slot, qp, min_prob,
                                         packet_size_bits, cap_slots),
            false};
}

double theta(double required_packets, double rho_star_value, double rho_n) {
    if (!(rho_star_value > 0.0) || !(rho_n > 0.0) || rho_n == 1.0)
        throw std::domain_error("theta requires positive rho* and rho_n != 1");
    return required_packets - 1.0 -
           std::floor(std::log(rho_star_value) / std::log(rho_n));
}

}  // namespace uavplan::queueing

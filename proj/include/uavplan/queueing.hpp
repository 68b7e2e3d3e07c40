// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "uavplan/types.hpp"

namespace uavplan::queueing {

// Finite-buffer queue offered by one sensing phase: Poisson packet arrivals,
// constant per-packet sending time, K packets of room including the one in
// service.
struct QueueParams {
    double arrival_rate = 0.0;  // lambda, packets per slot
    double service_time = 0.0;  // X, slots per packet
    int capacity = 0;           // K, packets

    double load() const { return arrival_rate * service_time; }
};

// Buffer-occupancy probabilities pi_0..pi_K of the closed-form steady state.
// Values are kept exactly as the formula produces them: the sum telescopes to
// one analytically, but individual entries can leave [0, 1] outside the
// approximation's validity regime (loads with sqrt(rho) > 2). Probability
// queries clamp at the end, not here.
struct SteadyState {
    std::vector<double> pi;

    int capacity() const { return static_cast<int>(pi.size()) - 1; }
    double sum() const;
    // True when every entry is a probability; the regime where the
    // monotonicity properties of completion_probability hold.
    bool probabilistic() const;
};

// Per-packet sending time X = R_s / rate. Throws infeasible_error on rate 0.
double service_time(double packet_size_bits, double rate_bits_per_slot);

// Steady state of the finite-buffer queue at the given load. Loads within
// 1e-6 of a pole of the closed form (rho = 1, rho = 4, rho = (K+1)^2) are
// evaluated at the perturbed load just outside the pole.
SteadyState steady_state(const QueueParams& qp);

// Inputs of one completion-probability query.
struct CompletionQuery {
    double required_packets = 0.0;  // C_n, real-valued
    double start_buffer_bits = 0.0;
    double rate_bits_per_slot = 0.0;
    long long sensing_slots = 1;  // delta
    double packet_size_bits = 0.0;
    int capacity = 0;
};

// Occupancy index the buffer must reach for the task to count as complete.
long long completion_index(const CompletionQuery& cq);

// Probability the buffer holds at least the completion index at the end of
// the sensing window. Clamped to [0, 1].
double completion_probability(const CompletionQuery& cq, const SteadyState& ss);

// Result of a minimum-sensing-time computation.
struct SensingTimeResult {
    long long slots = 1;
    bool used_closed_form = true;  // false when the brute-force fallback ran
};

// Smallest sensing duration meeting min_prob, via the closed-form bound where
// its domain holds and a linear scan otherwise. Throws infeasible_error when
// no duration up to cap_slots suffices.
SensingTimeResult min_sensing_time(double required_packets, double start_buffer_bits,
                                   double rate_bits_per_slot, const QueueParams& qp,
                                   double min_prob, double packet_size_bits,
                                   long long cap_slots);

// Linear-scan oracle for min_sensing_time: first delta with completion
// probability >= min_prob. Same cap semantics.
long long brute_force_min_sensing_time(double required_packets, double start_buffer_bits,
                                       double rate_bits_per_slot, const QueueParams& qp,
                                       double min_prob, double packet_size_bits,
                                       long long cap_slots);

// theta = C_n - 1 - floor(ln rho* / ln rho_n); the location-fixed constant of
// the sensing-time bound.
double theta(double required_packets, double rho_star, double rho_n);

// rho* of the closed-form sensing-time bound, exposed for the property checks.
double rho_star(const SteadyState& ss, const QueueParams& qp, double min_prob);

}  // namespace uavplan::queueing

// SPDX-License-Identifier: Apache-2.0
#include "uavplan/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace uavplan {

void validate(const ChannelParams& cp) {
    if (cp.bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    if (cp.eta_los_db < 0.0 || cp.eta_nlos_db < cp.eta_los_db)
        throw std::invalid_argument("excess losses must satisfy eta_nlos >= eta_los >= 0");
    if (cp.beta_per_deg <= 0.0) throw std::invalid_argument("beta must be positive");
    if (cp.carrier_freq_mhz <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
}

void validate(const SensingParams& sp) {
    if (sp.nu_per_m <= 0.0) throw std::invalid_argument("nu must be positive");
    if (sp.base_packets < 1.0) throw std::invalid_argument("base packet count must be >= 1");
    if (sp.arrival_rate_per_slot <= 0.0) throw std::invalid_argument("arrival rate must be positive");
    if (sp.packet_size_bits <= 0.0) throw std::invalid_argument("packet size must be positive");
    if (sp.min_completion_prob <= 0.0 || sp.min_completion_prob >= 1.0)
        throw std::invalid_argument("min completion probability must be in (0, 1)");
}

void validate(const UavParams& up) {
    if (up.v_max_m_per_slot <= 0.0) throw std::invalid_argument("v_max must be positive");
    if (up.min_altitude_m < 0.0) throw std::invalid_argument("minimum altitude must be >= 0");
    if (up.slot_duration_s <= 0.0) throw std::invalid_argument("slot duration must be positive");
}

void validate(const BufferSpec& bs) {
    if (bs.capacity_packets < 1) throw std::invalid_argument("buffer capacity must be >= 1 packet");
    if (bs.packet_size_bits <= 0.0) throw std::invalid_argument("packet size must be positive");
}

void validate(const PlannerConfig& pc) {
    if (pc.enumeration_factor <= 1.0) throw std::invalid_argument("enumeration factor must exceed 1");
    if (pc.position_resolution_m <= 0.0) throw std::invalid_argument("position resolution must be positive");
    if (pc.max_outer_iterations < 1) throw std::invalid_argument("need at least one outer iteration");
    if (pc.sensing_delta_cap_slots < 1) throw std::invalid_argument("sensing time cap must be >= 1 slot");
}

namespace channel {

namespace {
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
}

double distance_to_target(const Position3& loc, const TaskTarget& target) {
    const double dx = loc.x - target.x;
    const double dy = loc.y - target.y;
    return std::sqrt(dx * dx + dy * dy + loc.z * loc.z);
}

double sensing_success_prob(double distance_m, double nu_per_m) {
    return std::exp(-nu_per_m * distance_m);
}

double required_packets(double success_prob, double base_packets) {
    if (success_prob <= 0.0)
        throw infeasible_error("sensing success probability is zero; task cannot be sensed");
    return base_packets / success_prob;
}

double uav_bs_distance(const Position3& loc, double bs_height_m) {
    const double dz = loc.z - bs_height_m;
    return std::sqrt(loc.x * loc.x + loc.y * loc.y + dz * dz);
}

double elevation_angle_deg(const Position3& loc, double bs_height_m) {
    const double d = uav_bs_distance(loc, bs_height_m);
    if (d <= 0.0) throw std::domain_error("degenerate geometry: UAV coincides with the BS antenna");
    return std::asin((loc.z - bs_height_m) / d) * kRadToDeg;
}

double los_probability(const Position3& loc, const ChannelParams& cp) {
    const double phi = elevation_angle_deg(loc, cp.bs_height_m);
    return 1.0 / (1.0 + cp.alpha * std::exp(-cp.beta_per_deg * (phi - cp.alpha)));
}

double average_pathloss_db(const Position3& loc, const ChannelParams& cp) {
    const double d_km = uav_bs_distance(loc, cp.bs_height_m) / 1000.0;
    if (d_km <= 0.0) throw std::domain_error("degenerate geometry: UAV coincides with the BS antenna");
    const double p_los = los_probability(loc, cp);
    const double fs = cp.fs_const_db + 20.0 * std::log10(cp.carrier_freq_mhz) + 20.0 * std::log10(d_km);
    const double pl_los = fs + cp.eta_los_db;
    const double pl_nlos = fs + cp.eta_nlos_db;
    return p_los * pl_los + (1.0 - p_los) * pl_nlos;
}

double link_rate(const Position3& loc, const ChannelParams& cp, double slot_duration_s) {
    const double pl_db = average_pathloss_db(loc, cp);
    const double rx_mw = dbm_to_mw(cp.tx_power_dbm) / std::pow(10.0, pl_db / 10.0);
    const double snr = rx_mw / dbm_to_mw(cp.noise_power_dbm);
    return cp.bandwidth_hz * std::log2(1.0 + snr) * slot_duration_s;
}

double buffer_drain_step(double q_bits, double rate_bits_per_slot) {
    return std::max(q_bits - rate_bits_per_slot, 0.0);
}

}  // namespace channel
}  // namespace uavplan

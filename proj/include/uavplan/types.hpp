// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavplan {

// 3-D UAV position. Ground plane is z = 0, altitudes are non-negative.
struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline bool finite(const Position3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Ground target of one sensing task. Ids are 1-based and contiguous; the id
// order is the execution order.
struct TaskTarget {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
};

// Air-to-ground channel parameters. Powers are in dBm, excess losses in dB,
// the free-space constant uses the km/MHz convention.
struct ChannelParams {
    double bs_height_m = 20.0;
    double tx_power_dbm = 23.0;
    double noise_power_dbm = -96.0;
    double bandwidth_hz = 1e6;
    double eta_los_db = 1.0;
    double eta_nlos_db = 20.0;
    double fs_const_db = 32.44;
    double carrier_freq_mhz = 2000.0;
    double alpha = 12.0;           // sigmoid midpoint, degrees
    double beta_per_deg = 0.135;   // sigmoid slope, per degree
};

// Sensing-side parameters. arrival_rate and packet size define the traffic
// offered to the buffer while the UAV hovers over a target.
struct SensingParams {
    double nu_per_m = 0.1;               // sensing quality decay per meter
    double base_packets = 1.0;           // packets needed at ideal sensing
    double arrival_rate_per_slot = 5.0;  // Poisson rate of generated packets
    double packet_size_bits = 2e8;
    double min_completion_prob = 0.9;
};

struct UavParams {
    double v_max_m_per_slot = 20.0;
    double min_altitude_m = 10.0;
    double slot_duration_s = 1.0;  // bookkeeping only; all rates are per slot
};

struct BufferSpec {
    int capacity_packets = 10;       // K
    double packet_size_bits = 2e8;   // mirrors SensingParams.packet_size_bits

    double capacity_bits() const { return capacity_packets * packet_size_bits; }
};

struct PlannerConfig {
    double enumeration_factor = 4.0;        // flight-time enumeration cap multiplier
    double position_resolution_m = 0.5;     // 1-D search granularity along a segment
    int max_outer_iterations = 30;
    long long sensing_delta_cap_slots = 100000;  // brute-force / feasibility cap
};

// Planner or scenario infeasibility; carriers a human-readable reason.
class infeasible_error : public std::runtime_error {
  public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

void validate(const ChannelParams& cp);
void validate(const SensingParams& sp);
void validate(const UavParams& up);
void validate(const BufferSpec& bs);
void validate(const PlannerConfig& pc);

}  // namespace uavplan

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "uavplan/types.hpp"

namespace uavplan::channel {

// Straight-line distance from a UAV position to a ground target.
double distance_to_target(const Position3& loc, const TaskTarget& target);

// Probability that one sensed packet is valid: exp(-nu * d).
double sensing_success_prob(double distance_m, double nu_per_m);

// Packets required for a task given its sensing success probability.
// Real-valued; callers apply any ceiling where the queue index needs one.
double required_packets(double success_prob, double base_packets);

// 3-D UAV to base-station distance; BS sits at (0, 0, H).
double uav_bs_distance(const Position3& loc, double bs_height_m);

// Signed elevation angle of the UAV seen from the BS antenna height, degrees.
// Negative when the UAV flies below the BS antenna.
double elevation_angle_deg(const Position3& loc, double bs_height_m);

// Sigmoid LoS connection probability in (0, 1).
double los_probability(const Position3& loc, const ChannelParams& cp);

// LoS/NLoS mixture pathloss in dB. Each component is the free-space loss
// (km/MHz convention) plus the environment excess.
double average_pathloss_db(const Position3& loc, const ChannelParams& cp);

// Link rate UAV -> BS in bits per slot.
double link_rate(const Position3& loc, const ChannelParams& cp, double slot_duration_s);

// One non-sensing slot of buffer drain: max(q - rate, 0).
double buffer_drain_step(double q_bits, double rate_bits_per_slot);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace uavplan::channel

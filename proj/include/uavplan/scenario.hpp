// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uavplan/types.hpp"

namespace uavplan {

// Full experiment input: the ordered task list plus every model parameter.
// The task order is the execution order.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    int num_tasks = 11;
    double area_x_m = 600.0;
    double area_y_m = 600.0;
    std::vector<TaskTarget> tasks;

    ChannelParams channel;
    SensingParams sensing;
    UavParams uav;
    BufferSpec buffer;
    PlannerConfig planner;

    // keeps BufferSpec.packet_size_bits mirroring the sensing packet size
    void sync_packet_size() { buffer.packet_size_bits = sensing.packet_size_bits; }
};

void validate(const ScenarioConfig& sc);

// Uniform task layout over the area, deterministic per seed. All other
// parameters come from `defaults`.
ScenarioConfig generate_scenario(std::uint64_t seed, int num_tasks, double area_x_m,
                                 double area_y_m, const ScenarioConfig& defaults = {});

// Flat key = value text form with unit-suffixed keys; serialize/parse/serialize
// is byte-identical.
std::string serialize_config(const ScenarioConfig& sc);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& sc, const std::string& path);

// Canonical shortest-round-trip float formatting shared by config, CSV and
// plan writers.
std::string format_double(double v);

}  // namespace uavplan

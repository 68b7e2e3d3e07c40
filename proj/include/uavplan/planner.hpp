// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "uavplan/kernels.hpp"
#include "uavplan/scenario.hpp"
#include "uavplan/types.hpp"

namespace uavplan::planner {

// Straight flight between two sensing locations, one scalar speed per slot
// along the from->to line. Speeds sum to the segment length; zero-speed slots
// are hover slots spent draining the buffer in place. predrain_slots are
// extra hover slots at `from` before any movement (the non-buffer baseline
// empties its backlog there).
struct FlightSegment {
    Position3 from;
    Position3 to;
    std::vector<double> speeds;
    long long predrain_slots = 0;
    double arrival_buffer_bits = 0.0;  // buffer after the final segment slot
    double arrival_rate = 0.0;         // link rate at `to`, bits per slot

    long long duration() const {
        return predrain_slots + static_cast<long long>(speeds.size());
    }
};

struct SensingPlan {
    int task_id = 0;
    Position3 location;
    long long delta_slots = 1;
    double completion_prob = 0.0;
    double required_packets = 0.0;
};

// One full mission: N segments (start -> task 1 -> ... -> task N), one
// sensing phase per task, and the final drain of whatever is left buffered.
struct MissionPlan {
    std::vector<FlightSegment> segments;
    std::vector<SensingPlan> sensing;
    long long residual_slots = 0;
    long long total_slots = 0;
    std::vector<long long> history;  // accepted per-iteration totals

    long long fly_slots() const;
    long long sense_slots() const;
};

// Scenario-derived state shared by every planning operation.
struct PlanContext {
    ScenarioConfig sc;
    kernels::LinkBudget budget;
    // Non-buffer baseline mode: the buffer must be empty before each flight,
    // so a post-sensing hover drain joins each task's local cost.
    bool drain_after_sensing = false;

    static PlanContext make(const ScenarioConfig& sc);

    double rate_at(const Position3& p) const { return kernels::link_rate_at(p, budget); }
    double capacity_bits() const { return sc.buffer.capacity_bits(); }
    double v_max() const { return sc.uav.v_max_m_per_slot; }
    Position3 start_position() const { return {0.0, 0.0, sc.uav.min_altitude_m}; }
    Position3 above_target(const TaskTarget& t) const {
        return {t.x, t.y, sc.uav.min_altitude_m};
    }
    const TaskTarget& target(int task_id) const {
        return sc.tasks[static_cast<std::size_t>(task_id - 1)];
    }
};

// Per-slot link rates at the end-of-slot positions of a segment (predrain
// slots first, at `from`); every drain walk in the planner and the replayer
// goes through this one function so the float sequences agree exactly.
std::vector<double> segment_rates(const FlightSegment& seg, const PlanContext& ctx);

// End-of-slot positions matching segment_rates, for traces.
std::vector<Position3> segment_positions(const FlightSegment& seg);

// Buffer after draining over the given per-slot rates.
double drain_over(double q_bits, const std::vector<double>& rates);

// Deterministic sensing-phase buffer update: per slot the expected arrivals
// minus the sent bits, clamped to the buffer range.
double sense_phase_end_buffer(double q_bits, double rate_at_loc, long long delta,
                              const PlanContext& ctx);

// True when a task is executable from this arrival state: the minimum
// sensing time exists within the cap and the buffer bound held.
bool feasibility_check(double arrival_q, double arrival_rate, const TaskTarget& target,
                       const Position3& loc, const PlanContext& ctx);

// Minimum-duration feasible flight: enumerates the flight time upward from
// ceil(L / v_max), solving a per-slot rate-maximizing speed schedule for each
// candidate duration, and returns the first whose arrival state is feasible.
FlightSegment optimize_segment(const Position3& from, const Position3& to, double q_start,
                               const TaskTarget& dest, const PlanContext& ctx);

// Recomputes required packets, the minimum sensing time and the completion
// probability for a fixed location and arrival state.
SensingPlan update_sensing_time(const SensingPlan& base, double arrival_q,
                                const PlanContext& ctx);

// Hover slots needed to empty the buffer at the final sensing location.
long long residual_drain(const Position3& final_loc, double q_bits, const PlanContext& ctx);

// One task's incoming flight and sensing phase, the unit the local search
// rewrites.
struct TaskChoice {
    FlightSegment segment;
    SensingPlan sensing;
};

// Step 1/2 of the location search: repeatedly try extending the incoming
// segment by one max-speed slot (A) or dropping its final slot (B), keeping a
// candidate only when this task's completion time strictly decreases. Ties
// between A and B prefer B. Shared with the greedy baseline, whose move set
// is defined to be exactly this one.
TaskChoice improve_task_locally(TaskChoice current, double q_segment_start,
                                const TaskTarget& target, const PlanContext& ctx);

// Feasible starting plan: sensing directly above each target at the minimum
// altitude, straight maximum-speed segments, minimum sensing times.
MissionPlan initial_solution(const PlanContext& ctx);

// Local search over task n's sensing location (n >= 2): extend the incoming
// segment by one max-speed slot or drop its final slot, keeping a move only
// when the task's own completion time strictly improves. The outgoing
// segment is re-derived and downstream sensing times refreshed so the
// returned plan is consistent.
MissionPlan local_search_location(int task_index, const MissionPlan& current,
                                  const PlanContext& ctx);

// The full iterative loop: alternate trajectory re-optimization with the
// location/time local search until the total stops decreasing. The returned
// history holds the accepted per-iteration totals (non-increasing).
MissionPlan itlto(const PlanContext& ctx);

// Same loop seeded with an existing plan; a converged plan returns unchanged.
MissionPlan itlto_from(MissionPlan start, const PlanContext& ctx);

// Buffer level entering the given segment (walking the plan from the start).
double buffer_before_segment(const MissionPlan& plan, std::size_t segment_index,
                             const PlanContext& ctx);

// Recomputes arrival buffers, residual and total; throws if any invariant
// (speed bound, buffer bound, probability floor) fails.
void finalize_plan(MissionPlan& plan, const PlanContext& ctx);

}  // namespace uavplan::planner

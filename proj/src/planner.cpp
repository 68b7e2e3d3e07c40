// SPDX-License-Identifier: Apache-2.0
#include "uavplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavplan/channel.hpp"
#include "uavplan/queueing.hpp"

namespace uavplan::planner {

namespace {

constexpr double kLenTol = 1e-6;  // meters; segment length bookkeeping tolerance

double norm3(const Position3& a, const Position3& b) {
    const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Position3 unit_dir(const Position3& from, const Position3& to, double len) {
    return {(to.x - from.x) / len, (to.y - from.y) / len, (to.z - from.z) / len};
}

queueing::QueueParams queue_params(const PlanContext& ctx, double rate) {
    return {ctx.sc.sensing.arrival_rate_per_slot,
            queueing::service_time(ctx.sc.sensing.packet_size_bits, rate),
            ctx.sc.buffer.capacity_packets};
}

// Greedy per-slot speed schedule: each slot moves to the highest-rate
// position reachable inside the feasible speed window, on the search lattice
// plus the window endpoints. The final cumulative distance is pinned to L so
// the speeds telescope to the segment length exactly.
std::vector<double> rate_max_schedule(const Position3& from, const Position3& dir, double length,
                                      long long slots, const PlanContext& ctx) {
    const double v_max = ctx.v_max();
    const double res = ctx.sc.planner.position_resolution_m;
    std::vector<double> s(static_cast<std::size_t>(slots), 0.0);
    std::vector<double> cand;
    std::vector<double> rates;
    double s_prev = 0.0;
    for (long long t = 1; t <= slots; ++t) {
        if (t == slots) {
            s[static_cast<std::size_t>(t - 1)] = length;
            break;
        }
        const double lo = std::max(0.0, length - s_prev - v_max * static_cast<double>(slots - t));
        const double hi = std::min(v_max, length - s_prev);
        const double a = s_prev + lo;
        const double b = s_prev + hi;
        double chosen = b;
        if (b - a > 1e-12) {
            cand.clear();
            cand.push_back(a);
            for (double k = std::ceil(a / res); k * res < b; k += 1.0) {
                const double v = k * res;
                if (v > a) cand.push_back(v);
            }
            cand.push_back(b);
            rates.resize(cand.size());
            kernels::link_rate_along_line(from, dir, cand.data(), cand.size(), ctx.budget,
                                          rates.data());
            std::size_t best = 0;
            for (std::size_t i = 1; i < cand.size(); ++i)
                if (rates[i] > rates[best]) best = i;
            chosen = cand[best];
        }
        s[static_cast<std::size_t>(t - 1)] = chosen;
        s_prev = chosen;
    }
    std::vector<double> speeds(s.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        speeds[i] = s[i] - prev;
        prev = s[i];
    }
    return speeds;
}

std::vector<double> max_speed_schedule(double length, double v_max) {
    if (length <= 0.0) return {};
    const auto slots = static_cast<long long>(std::ceil(length / v_max));
    std::vector<double> speeds(static_cast<std::size_t>(slots), v_max);
    speeds.back() = length - v_max * static_cast<double>(slots - 1);
    return speeds;
}

}  // namespace

long long MissionPlan::fly_slots() const {
    long long n = 0;
    for (const auto& s : segments) n += s.duration();
    return n;
}

long long MissionPlan::sense_slots() const {
    long long n = 0;
    for (const auto& s : sensing) n += s.delta_slots;
    return n;
}

PlanContext PlanContext::make(const ScenarioConfig& sc) {
    validate(sc);
    PlanContext ctx;
    ctx.sc = sc;
    ctx.budget = kernels::make_link_budget(sc.channel, sc.uav.slot_duration_s);
    return ctx;
}

std::vector<double> segment_rates(const Position3& from, const Position3& to,
                                  const std::vector<double>& speeds, const PlanContext& ctx) {
    if (speeds.empty()) return {};
    const double len = norm3(from, to);
    const Position3 dir =
        len > 0.0 ? unit_dir(from, to, len) : Position3{0.0, 0.0, 0.0};
    std::vector<double> s(speeds.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        acc += speeds[i];
        s[i] = acc;
    }
    std::vector<double> rates(speeds.size());
    kernels::link_rate_along_line(from, dir, s.data(), s.size(), ctx.budget, rates.data());
    return rates;
}

double drain_over(double q_bits, const std::vector<double>& rates) {
    for (double r : rates) q_bits = channel::buffer_drain_step(q_bits, r);
    return q_bits;
}

double sense_phase_end_buffer(double q_bits, double rate_at_loc, long long delta,
                              const PlanContext& ctx) {
    const double inflow = ctx.sc.sensing.arrival_rate_per_slot * ctx.sc.sensing.packet_size_bits;
    const double cap = ctx.capacity_bits();
    for (long long t = 0; t < delta; ++t)
        q_bits = std::clamp(q_bits + inflow - rate_at_loc, 0.0, cap);
    return q_bits;
}

bool feasibility_check(double arrival_q, double arrival_rate, const TaskTarget& target,
                       const Position3& loc, const PlanContext& ctx) {
    if (arrival_q > ctx.capacity_bits() + 1e-6) return false;
    if (arrival_rate <= 0.0) return false;
    const double pr =
        channel::sensing_success_prob(channel::distance_to_target(loc, target),
                                      ctx.sc.sensing.nu_per_m);
    if (pr <= 0.0) return false;
    try {
        queueing::min_sensing_time(ctx.sc.sensing.base_packets / pr, arrival_q, arrival_rate,
                                   queue_params(ctx, arrival_rate),
                                   ctx.sc.sensing.min_completion_prob,
                                   ctx.sc.sensing.packet_size_bits,
                                   ctx.sc.planner.sensing_delta_cap_slots);
    } catch (const infeasible_error&) {
        return false;
    }
    return true;
}

FlightSegment optimize_segment(const Position3& from, const Position3& to, double q_start,
                               const TaskTarget& dest, const PlanContext& ctx) {
    if (q_start > ctx.capacity_bits() + 1e-6)
        throw infeasible_error("segment starts above buffer capacity");
    FlightSegment seg;
    seg.from = from;
    seg.to = to;
    seg.arrival_rate = ctx.rate_at(to);
    const double len = norm3(from, to);
    if (len <= kLenTol) {
        seg.arrival_buffer_bits = q_start;
        return seg;
    }
    const Position3 dir = unit_dir(from, to, len);
    const auto min_slots = static_cast<long long>(std::ceil(len / ctx.v_max()));
    const auto cap_slots = std::max(
        min_slots,
        static_cast<long long>(std::ceil(ctx.sc.planner.enumeration_factor * len / ctx.v_max())));
    for (long long slots = min_slots; slots <= cap_slots; ++slots) {
        seg.speeds = rate_max_schedule(from, dir, len, slots, ctx);
        seg.arrival_buffer_bits = drain_over(q_start, segment_rates(from, to, seg.speeds, ctx));
        if (feasibility_check(seg.arrival_buffer_bits, seg.arrival_rate, dest, to, ctx))
            return seg;
    }
    throw infeasible_error("no feasible flight time within the enumeration cap");
}

SensingPlan update_sensing_time(const SensingPlan& base, double arrival_q,
                                const PlanContext& ctx) {
    const TaskTarget& target = ctx.target(base.task_id);
    const double rate = ctx.rate_at(base.location);
    const double pr = channel::sensing_success_prob(
        channel::distance_to_target(base.location, target), ctx.sc.sensing.nu_per_m);
    SensingPlan out = base;
    out.required_packets = channel::required_packets(pr, ctx.sc.sensing.base_packets);
    const auto qp = queue_params(ctx, rate);
    out.delta_slots = queueing::min_sensing_time(out.required_packets, arrival_q, rate, qp,
                                                 ctx.sc.sensing.min_completion_prob,
                                                 ctx.sc.sensing.packet_size_bits,
                                                 ctx.sc.planner.sensing_delta_cap_slots)
                          .slots;
    queueing::CompletionQuery cq{out.required_packets, arrival_q, rate, out.delta_slots,
                                 ctx.sc.sensing.packet_size_bits, qp.capacity};
    out.completion_prob = queueing::completion_probability(cq, queueing::steady_state(qp));
    if (out.completion_prob + 1e-12 < ctx.sc.sensing.min_completion_prob)
        throw std::logic_error("sensing time bound violated its own probability floor");
    return out;
}

long long residual_drain(const Position3& final_loc, double q_bits, const PlanContext& ctx) {
    if (q_bits <= 0.0) return 0;
    const double rate = ctx.rate_at(final_loc);
    if (rate <= 0.0) throw infeasible_error("no link at the final sensing location");
    long long slots = 0;
    while (q_bits > 0.0) {
        q_bits = channel::buffer_drain_step(q_bits, rate);
        ++slots;
    }
    return slots;
}

TaskChoice improve_task_locally(TaskChoice cur, double q_segment_start,
                                const TaskTarget& target, const PlanContext& ctx) {
    const double z_min = ctx.sc.uav.min_altitude_m;

    auto task_cost = [&](const TaskChoice& c) {
        long long cost = c.segment.duration() + c.sensing.delta_slots;
        if (ctx.drain_after_sensing) {
            const double q_after = sense_phase_end_buffer(
                c.segment.arrival_buffer_bits, ctx.rate_at(c.sensing.location),
                c.sensing.delta_slots, ctx);
            cost += residual_drain(c.sensing.location, q_after, ctx);
        }
        return cost;
    };

    auto evaluate = [&](std::vector<double> speeds, const Position3& to,
                        TaskChoice& out) -> bool {
        FlightSegment seg;
        seg.from = cur.segment.from;
        seg.to = to;
        seg.speeds = std::move(speeds);
        seg.arrival_rate = ctx.rate_at(to);
        seg.arrival_buffer_bits =
            drain_over(q_segment_start, segment_rates(seg.from, to, seg.speeds, ctx));
        if (seg.arrival_buffer_bits > ctx.capacity_bits() + 1e-6) return false;
        SensingPlan base = cur.sensing;
        base.location = to;
        try {
            out.sensing = update_sensing_time(base, seg.arrival_buffer_bits, ctx);
        } catch (const infeasible_error&) {
            return false;
        }
        out.segment = std::move(seg);
        return true;
    };

    long long best_cost = task_cost(cur);
    for (;;) {
        const double len = norm3(cur.segment.from, cur.segment.to);
        if (len <= kLenTol || cur.segment.speeds.empty()) break;
        const Position3 u = unit_dir(cur.segment.from, cur.segment.to, len);

        // candidate A: one more slot at maximum speed past the current location
        bool have_a = false;
        TaskChoice cand_a;
        {
            Position3 to_a{cur.segment.to.x + ctx.v_max() * u.x,
                           cur.segment.to.y + ctx.v_max() * u.y,
                           cur.segment.to.z + ctx.v_max() * u.z};
            if (to_a.z >= z_min - 1e-9) {
                auto speeds = cur.segment.speeds;
                speeds.push_back(ctx.v_max());
                have_a = evaluate(std::move(speeds), to_a, cand_a);
            }
        }
        // candidate B: drop the final slot, pulling the location back by its speed
        bool have_b = false;
        TaskChoice cand_b;
        {
            const double v_last = cur.segment.speeds.back();
            Position3 to_b{cur.segment.to.x - v_last * u.x, cur.segment.to.y - v_last * u.y,
                           cur.segment.to.z - v_last * u.z};
            if (to_b.z >= z_min - 1e-9) {
                auto speeds = cur.segment.speeds;
                speeds.pop_back();
                have_b = evaluate(std::move(speeds), to_b, cand_b);
            }
        }

        const long long cost_a = have_a ? task_cost(cand_a) : std::numeric_limits<long long>::max();
        const long long cost_b = have_b ? task_cost(cand_b) : std::numeric_limits<long long>::max();
        if (std::min(cost_a, cost_b) >= best_cost) break;  // no strictly improving move
        if (cost_b <= cost_a) {  // ties prefer the shorter flight
            cur = std::move(cand_b);
            best_cost = cost_b;
        } else {
            cur = std::move(cand_a);
            best_cost = cost_a;
        }
    }
    return cur;
}

namespace {

// Post-sensing hover drain of the non-buffer baseline, expressed as
// zero-speed slots prefixed to the next flight.
long long drain_prefix_slots(double& q, const Position3& loc, const PlanContext& ctx) {
    const long long slots = residual_drain(loc, q, ctx);
    q = 0.0;
    return slots;
}

// Rebuilds the chain from `first_task` on (0-based). Locations are kept;
// segments listed in `reoptimize` get a fresh enumeration, the rest keep
// their speed schedules. Sensing times always refresh from the arrival state.
void refresh_chain(MissionPlan& plan, std::size_t first_task, bool reoptimize_all,
                   bool reoptimize_first, const PlanContext& ctx) {
    Position3 pos =
        first_task == 0 ? ctx.start_position() : plan.sensing[first_task - 1].location;
    double q = buffer_before_segment(plan, first_task, ctx);
    for (std::size_t i = first_task; i < plan.segments.size(); ++i) {
        const TaskTarget& target = ctx.target(static_cast<int>(i) + 1);
        const Position3 to = plan.sensing[i].location;
        long long prefix = 0;
        if (ctx.drain_after_sensing && i > 0) prefix = drain_prefix_slots(q, pos, ctx);
        if (reoptimize_all || (reoptimize_first && i == first_task)) {
            plan.segments[i] = optimize_segment(pos, to, q, target, ctx);
        } else {
            plan.segments[i].from = pos;
            plan.segments[i].to = to;
            plan.segments[i].arrival_rate = ctx.rate_at(to);
            plan.segments[i].arrival_buffer_bits =
                drain_over(q, segment_rates(pos, to, plan.segments[i].speeds, ctx));
        }
        if (prefix > 0) {
            auto& speeds = plan.segments[i].speeds;
            speeds.insert(speeds.begin(), static_cast<std::size_t>(prefix), 0.0);
            plan.segments[i].arrival_buffer_bits =
                drain_over(q, segment_rates(pos, to, speeds, ctx));
        }
        q = plan.segments[i].arrival_buffer_bits;
        plan.sensing[i] = update_sensing_time(plan.sensing[i], q, ctx);
        q = sense_phase_end_buffer(q, ctx.rate_at(to), plan.sensing[i].delta_slots, ctx);
        pos = to;
    }
}

}  // namespace

double buffer_before_segment(const MissionPlan& plan, std::size_t segment_index,
                             const PlanContext& ctx) {
    double q = 0.0;
    Position3 pos = ctx.start_position();
    for (std::size_t i = 0; i < segment_index; ++i) {
        q = drain_over(q, segment_rates(pos, plan.segments[i].to, plan.segments[i].speeds, ctx));
        const Position3 loc = plan.sensing[i].location;
        q = sense_phase_end_buffer(q, ctx.rate_at(loc), plan.sensing[i].delta_slots, ctx);
        if (ctx.drain_after_sensing) q = 0.0;  // hover drain precedes the next flight
        pos = loc;
    }
    return q;
}

void finalize_plan(MissionPlan& plan, const PlanContext& ctx) {
    if (plan.segments.size() != plan.sensing.size() ||
        plan.segments.size() != ctx.sc.tasks.size())
        throw std::logic_error("plan structure does not match the task list");
    double q = 0.0;
    Position3 pos = ctx.start_position();
    for (std::size_t i = 0; i < plan.segments.size(); ++i) {
        auto& seg = plan.segments[i];
        seg.from = pos;
        const double len = norm3(seg.from, seg.to);
        double sum = 0.0;
        for (double v : seg.speeds) {
            if (v < -1e-9 || v > ctx.v_max() + 1e-9)
                throw std::logic_error("speed outside [0, v_max]");
            sum += v;
        }
        if (std::fabs(sum - len) > kLenTol)
            throw std::logic_error("segment speeds do not cover its length");
        if (q > ctx.capacity_bits() + 1e-6)
            throw std::logic_error("buffer bound violated entering a segment");
        q = drain_over(q, segment_rates(seg.from, seg.to, seg.speeds, ctx));
        seg.arrival_buffer_bits = q;
        seg.arrival_rate = ctx.rate_at(seg.to);

        const auto& sp = plan.sensing[i];
        if (sp.delta_slots < 1) throw std::logic_error("sensing durations must be >= 1 slot");
        if (sp.location.z < ctx.sc.uav.min_altitude_m - 1e-9)
            throw std::logic_error("sensing location below the altitude floor");
        if (sp.completion_prob + 1e-12 < ctx.sc.sensing.min_completion_prob)
            throw std::logic_error("completion probability below the floor");
        q = sense_phase_end_buffer(q, ctx.rate_at(sp.location), sp.delta_slots, ctx);
        pos = sp.location;
    }
    plan.residual_slots = residual_drain(pos, q, ctx);
    plan.total_slots = plan.fly_slots() + plan.sense_slots() + plan.residual_slots;
}

MissionPlan initial_solution(const PlanContext& ctx) {
    MissionPlan plan;
    Position3 pos = ctx.start_position();
    double q = 0.0;
    for (const auto& task : ctx.sc.tasks) {
        const Position3 to = ctx.above_target(task);
        FlightSegment seg;
        seg.from = pos;
        seg.to = to;
        seg.speeds = max_speed_schedule(norm3(pos, to), ctx.v_max());
        if (ctx.drain_after_sensing && !plan.sensing.empty()) {
            const long long prefix = drain_prefix_slots(q, pos, ctx);
            seg.speeds.insert(seg.speeds.begin(), static_cast<std::size_t>(prefix), 0.0);
        }
        seg.arrival_rate = ctx.rate_at(to);
        seg.arrival_buffer_bits = drain_over(q, segment_rates(pos, to, seg.speeds, ctx));
        q = seg.arrival_buffer_bits;

        SensingPlan sp;
        sp.task_id = task.id;
        sp.location = to;
        try {
            sp = update_sensing_time(sp, q, ctx);
        } catch (const infeasible_error& e) {
            throw infeasible_error("scenario infeasible at task " + std::to_string(task.id) +
                                   ": " + e.what());
        }
        q = sense_phase_end_buffer(q, ctx.rate_at(to), sp.delta_slots, ctx);
        plan.segments.push_back(std::move(seg));
        plan.sensing.push_back(sp);
        pos = to;
    }
    finalize_plan(plan, ctx);
    return plan;
}

MissionPlan local_search_location(int task_index, const MissionPlan& current,
                                  const PlanContext& ctx) {
    if (task_index < 2 || task_index > static_cast<int>(current.sensing.size()))
        throw std::invalid_argument("local search applies to tasks 2..N");
    const auto idx = static_cast<std::size_t>(task_index - 1);
    MissionPlan plan = current;
    const double q_start = buffer_before_segment(plan, idx, ctx);
    TaskChoice choice{plan.segments[idx], plan.sensing[idx]};
    choice = improve_task_locally(std::move(choice), q_start, ctx.target(task_index), ctx);
    plan.segments[idx] = std::move(choice.segment);
    plan.sensing[idx] = std::move(choice.sensing);
    if (idx + 1 < plan.segments.size())
        refresh_chain(plan, idx + 1, /*reoptimize_all=*/false, /*reoptimize_first=*/true, ctx);
    finalize_plan(plan, ctx);
    return plan;
}

MissionPlan itlto_from(MissionPlan start, const PlanContext& ctx) {
    finalize_plan(start, ctx);
    MissionPlan plan = std::move(start);
    if (plan.history.empty()) plan.history.push_back(plan.total_slots);
    for (int iter = 0; iter < ctx.sc.planner.max_outer_iterations; ++iter) {
        MissionPlan cand = plan;
        refresh_chain(cand, 0, /*reoptimize_all=*/true, /*reoptimize_first=*/true, ctx);
        for (int n = 2; n <= static_cast<int>(cand.sensing.size()); ++n)
            cand = local_search_location(n, cand, ctx);
        finalize_plan(cand, ctx);
        if (cand.total_slots >= plan.total_slots) break;
        cand.history = plan.history;
        cand.history.push_back(cand.total_slots);
        plan = std::move(cand);
    }
    return plan;
}

MissionPlan itlto(const PlanContext& ctx) { return itlto_from(initial_solution(ctx), ctx); }

}  // namespace uavplan::planner

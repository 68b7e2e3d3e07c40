// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "uavplan/queueing.hpp"
#include "uavplan/rng.hpp"

using namespace uavplan;
namespace qu = uavplan::queueing;

TEST_SUITE_BEGIN("queueing");

namespace {

qu::QueueParams make_qp(double rho, int k) {
    qu::QueueParams qp;
    qp.arrival_rate = 1.0;
    qp.service_time = rho;
    qp.capacity = k;
    return qp;
}

}  // namespace

TEST_CASE("service time") {
    CHECK(qu::service_time(5e6, 5e6) == doctest::Approx(1.0));
    CHECK(qu::service_time(2e8, 5e7) == doctest::Approx(4.0));
    CHECK(qu::service_time(4e8, 5e7) == doctest::Approx(8.0));
    CHECK_THROWS_AS(qu::service_time(1e6, 0.0), infeasible_error);
}

TEST_CASE("steady state against the high-precision oracle") {
    // frozen from a 40-digit evaluation of the closed form
    auto ss = qu::steady_state(make_qp(2.0, 10));
    CHECK(ss.pi[0] == doctest::Approx(1.40576835847689741e-10).epsilon(1e-12));
    CHECK(ss.pi[1] == doctest::Approx(0.0009784735808006550807).epsilon(1e-12));
    CHECK(ss.pi[5] == doctest::Approx(0.01565557729281048129).epsilon(1e-12));
    CHECK(ss.pi[9] == doctest::Approx(0.2504892366849677007).epsilon(1e-12));
    CHECK(ss.pi[10] == doctest::Approx(0.5000000000702884179).epsilon(1e-12));

    auto light = qu::steady_state(make_qp(0.5, 5));
    const double want[] = {0.5017207866750306971, 0.2639134079866175512,
                           0.1319567039933087756, 0.06597835199665438781,
                           0.0329891759983271939, 0.003441573350061394286};
    for (int i = 0; i <= 5; ++i)
        CHECK(light.pi[static_cast<std::size_t>(i)] ==
              doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(light.probabilistic());
}

TEST_CASE("steady state normalization across loads and capacities") {
    for (double rho : {0.05, 0.2, 0.5, 0.9, 1.1, 2.0, 3.0, 3.9, 8.0, 50.0, 77.0}) {
        for (int k : {2, 5, 10, 50}) {
            auto ss = qu::steady_state(make_qp(rho, k));
            CHECK(std::fabs(ss.sum() - 1.0) < 1e-9);
        }
    }
    // pole neighborhoods evaluate via perturbation and still normalize
    for (double rho : {1.0, 1.0 + 1e-9, 4.0, 4.0 - 1e-9, 9.0, 121.0}) {
        for (int k : {2, 10}) {
            auto ss = qu::steady_state(make_qp(rho, k));
            CHECK(std::fabs(ss.sum() - 1.0) < 1e-9);
        }
    }
    CHECK_THROWS_AS(qu::steady_state(make_qp(2.0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(qu::steady_state(make_qp(-1.0, 10)), std::domain_error);
}

TEST_CASE("printed form leaves [0,1] beyond the sqrt(rho)=2 pole") {
    // Direct evaluation: the approximation is no longer a distribution there,
    // though it still sums to one. Frozen from the 40-digit oracle.
    auto ss = qu::steady_state(make_qp(50.0, 10));
    CHECK(ss.pi[0] == doctest::Approx(-49.114438761090820355).epsilon(1e-11));
    CHECK(ss.pi[10] == doctest::Approx(-0.0022887752218164071).epsilon(1e-11));
    CHECK(std::fabs(ss.sum() - 1.0) < 1e-9);
    CHECK_FALSE(ss.probabilistic());

    // heavy load inside the sane band concentrates mass at the top
    auto heavy = qu::steady_state(make_qp(3.0, 10));
    CHECK(heavy.pi[10] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(heavy.probabilistic());
}

TEST_CASE("completion probability boundary handling") {
    auto ss = qu::steady_state(make_qp(2.0, 10));
    qu::CompletionQuery cq;
    cq.required_packets = 3.0;
    cq.rate_bits_per_slot = 1e6;
    cq.packet_size_bits = 1e6;
    cq.capacity = 10;

    cq.start_buffer_bits = 0.0;
    cq.sensing_slots = 3;  // m = ceil(3 - 3) = 0
    CHECK(qu::completion_probability(cq, ss) == doctest::Approx(1.0));

    cq.sensing_slots = 1;  // m = 2
    double manual = 0.0;
    for (int i = 2; i <= 10; ++i) manual += ss.pi[static_cast<std::size_t>(i)];
    CHECK(qu::completion_probability(cq, ss) == doctest::Approx(manual));

    cq.required_packets = 10.0;
    cq.sensing_slots = 1;  // hmm: m = ceil(10 - 1) = 9
    cq.start_buffer_bits = 1e6;  // m = ceil(10 + 0) = 10 = K -> single term
    CHECK(qu::completion_probability(cq, ss) == doctest::Approx(ss.pi[10]));

    cq.start_buffer_bits = 2e6;  // m = 11 > K -> infeasible at this duration
    CHECK(qu::completion_probability(cq, ss) == 0.0);
}

TEST_CASE("completion probability monotonicity in the probabilistic regime") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(12));
        const double rho = rng.uniform(0.05, 3.9);
        auto qp = make_qp(rho, k);
        auto ss = qu::steady_state(qp);
        if (!ss.probabilistic()) continue;
        qu::CompletionQuery cq;
        cq.required_packets = rng.uniform(1.0, 12.0);
        cq.rate_bits_per_slot = rng.uniform(1e5, 1e7);
        cq.packet_size_bits = rng.uniform(1e5, 1e7);
        cq.capacity = k;
        cq.start_buffer_bits = rng.uniform(0.0, k * cq.packet_size_bits);

        double prev = -1.0;
        for (long long d = 1; d <= 60; ++d) {
            cq.sensing_slots = d;
            const double p = qu::completion_probability(cq, ss);
            CHECK(p >= prev - 1e-12);  // non-decreasing in the sensing duration
            prev = p;
        }
        // non-increasing in the starting backlog
        cq.sensing_slots = 10;
        double prev_q = 2.0;
        for (double q = 0.0; q <= k * cq.packet_size_bits; q += cq.packet_size_bits / 3.0) {
            cq.start_buffer_bits = q;
            const double p = qu::completion_probability(cq, ss);
            CHECK(p <= prev_q + 1e-12);
            prev_q = p;
        }
    }
}

TEST_CASE("minimum sensing time equals the brute-force oracle") {
    Rng rng(2024);
    int closed_form_draws = 0;
    int trials = 0;
    while (closed_form_draws < 250 && trials < 5000) {
        ++trials;
        const int k = 2 + static_cast<int>(rng.next_below(14));
        const double lambda = rng.uniform(0.2, 6.0);
        const double x = rng.uniform(0.05, 20.0);
        const double rho = lambda * x;
        if (std::fabs(rho - 1.0) < 1e-3 || std::fabs(rho - 4.0) < 1e-3) continue;
        const double pole = (k + 1.0) * (k + 1.0);
        if (std::fabs(rho - pole) < 1e-3) continue;

        qu::QueueParams qp{lambda, x, k};
        const double rs = rng.uniform(1e6, 2e8);
        const double rate = rs / x;
        const double c = rng.uniform(1.0, 30.0);
        const double q0 = rng.uniform(0.0, k * rs);
        const double pmin = rng.uniform(0.1, 0.99);

        long long brute = 0;
        try {
            brute = qu::brute_force_min_sensing_time(c, q0, rate, qp, pmin, rs, 100000);
        } catch (const infeasible_error&) {
            continue;
        }
        const auto res = qu::min_sensing_time(c, q0, rate, qp, pmin, rs, 100000);
        CHECK(res.slots == brute);
        if (res.used_closed_form) ++closed_form_draws;
    }
    // the sweep must genuinely exercise the closed form, not the fallback
    CHECK(closed_form_draws >= 250);
}

TEST_CASE("minimum sensing time edge behavior") {
    qu::QueueParams qp{1.0, 2.0, 10};  // rho = 2
    const double rs = 1e6;
    const double rate = rs / qp.service_time;

    // nothing buffered and a trivial requirement: the lower clamp fires
    auto easy = qu::min_sensing_time(1.0, 0.0, rate, qp, 0.5, rs, 1000);
    CHECK(easy.slots == 1);
    CHECK(qu::brute_force_min_sensing_time(1.0, 0.0, rate, qp, 0.5, rs, 1000) == 1);

    // a vanishing target is satisfied immediately
    CHECK(qu::brute_force_min_sensing_time(5.0, 0.0, rate, qp, 1e-12, rs, 1000) == 1);

    // more backlog never shortens the sensing stay
    long long prev = 0;
    for (double q0 = 0.0; q0 <= 10 * rs; q0 += rs) {
        const auto r = qu::min_sensing_time(8.0, q0, rate, qp, 0.9, rs, 100000);
        CHECK(r.slots >= prev);
        prev = r.slots;
    }

    // the returned duration is minimal
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const double c = rng.uniform(1.0, 20.0);
        const double q0 = rng.uniform(0.0, 10 * rs);
        const double pmin = rng.uniform(0.2, 0.95);
        const auto r = qu::min_sensing_time(c, q0, rate, qp, pmin, rs, 100000);
        auto ss = qu::steady_state(qp);
        qu::CompletionQuery cq{c, q0, rate, r.slots, rs, qp.capacity};
        CHECK(qu::completion_probability(cq, ss) >= pmin);
        if (r.slots > 1) {
            cq.sensing_slots = r.slots - 1;
            CHECK(qu::completion_probability(cq, ss) < pmin);
        }
    }

    // unreachable within the cap
    CHECK_THROWS_AS(qu::min_sensing_time(1e7, 10 * rs, rate, qp, 0.9, rs, 100),
                    infeasible_error);
}

TEST_CASE("brute force scan is monotone once satisfied") {
    qu::QueueParams qp{2.0, 0.4, 8};  // rho = 0.8
    const double rs = 5e5;
    const double rate = rs / qp.service_time;
    auto ss = qu::steady_state(qp);
    const long long first = qu::brute_force_min_sensing_time(6.0, 2e6, rate, qp, 0.7, rs, 10000);
    for (long long d = first; d < first + 50; ++d) {
        qu::CompletionQuery cq{6.0, 2e6, rate, d, rs, qp.capacity};
        CHECK(qu::completion_probability(cq, ss) >= 0.7);
    }
}

TEST_CASE("theta") {
    CHECK(qu::theta(5.0, 2.0, 2.0) == doctest::Approx(3.0));   // floor(1) = 1
    CHECK(qu::theta(5.0, 1.0, 2.0) == doctest::Approx(4.0));   // ln 1 = 0
    CHECK_THROWS_AS(qu::theta(5.0, -1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(qu::theta(5.0, 2.0, 1.0), std::domain_error);

    // delta from the closed form tracks (theta R_s + Q0) / rate within a ceiling step
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        const int k = 3 + static_cast<int>(rng.next_below(10));
        const double lambda = rng.uniform(0.5, 3.0);
        const double x = rng.uniform(0.3, 3.5);
        const double rho = lambda * x;
        if (std::fabs(rho - 1.0) < 1e-3) continue;
        qu::QueueParams qp{lambda, x, k};
        auto ss = qu::steady_state(qp);
        if (!ss.probabilistic()) continue;
        const double rs = 1e6;
        const double rate = rs / x;
        const double c = rng.uniform(2.0, 15.0);
        const double q0 = rng.uniform(0.0, k * rs);
        const double pmin = rng.uniform(0.3, 0.95);
        const double rstar = qu::rho_star(ss, qp, pmin);
        if (!(rstar > 0.0) || !std::isfinite(rstar)) continue;
        const double th = qu::theta(c, rstar, lambda * x);
        const auto r = qu::min_sensing_time(c, q0, rate, qp, pmin, rs, 100000);
        if (!r.used_closed_form) continue;
        const double cont = (th * rs + q0) / rate;
        CHECK(static_cast<double>(r.slots) >= cont - 1e-9);
        CHECK(static_cast<double>(r.slots) <= std::max(cont, 0.0) + 1.0 + 1e-9);
    }
}

TEST_SUITE_END();

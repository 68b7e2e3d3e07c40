// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "uavplan/channel.hpp"
#include "uavplan/rng.hpp"

using namespace uavplan;
namespace ch = uavplan::channel;

TEST_SUITE_BEGIN("channel");

TEST_CASE("distance to target") {
    TaskTarget t{1, 10.0, -4.0};
    CHECK(ch::distance_to_target({10.0, -4.0, 0.0}, t) == doctest::Approx(0.0));
    CHECK(ch::distance_to_target({10.0, -4.0, 20.0}, t) == doctest::Approx(20.0));
    // 3-4-5 horizontally, 5-12-13 with altitude
    CHECK(ch::distance_to_target({3.0, 4.0, 12.0}, TaskTarget{1, 0.0, 0.0}) ==
          doctest::Approx(13.0));
}

TEST_CASE("sensing success probability") {
    CHECK(ch::sensing_success_prob(0.0, 0.1) == doctest::Approx(1.0));
    CHECK(ch::sensing_success_prob(20.0, 0.1) ==
          doctest::Approx(0.13533528323661269).epsilon(1e-12));
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const double nu = rng.uniform(0.001, 0.5);
        const double d = rng.uniform(0.0, 300.0);
        const double p = ch::sensing_success_prob(d, nu);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        CHECK(ch::sensing_success_prob(d + 1.0, nu) < p);
    }
}

TEST_CASE("required packets") {
    CHECK(ch::required_packets(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(ch::required_packets(0.5, 1.0) == doctest::Approx(2.0));
    CHECK(ch::required_packets(std::exp(-2.0), 1.0) ==
          doctest::Approx(7.38905609893065).epsilon(1e-12));
    CHECK_THROWS_AS(ch::required_packets(0.0, 1.0), infeasible_error);
}

TEST_CASE("los probability") {
    ChannelParams cp;
    // directly above the BS: phi = 90 degrees
    CHECK(ch::los_probability({0.0, 0.0, 120.0}, cp) ==
          doctest::Approx(0.999679431306).epsilon(1e-9));
    // phi == alpha makes the exponent vanish
    const double phi_alpha = 12.0;
    const double dz = 100.0 * std::sin(phi_alpha * 3.14159265358979323846 / 180.0);
    const double dx = 100.0 * std::cos(phi_alpha * 3.14159265358979323846 / 180.0);
    CHECK(ch::los_probability({dx, 0.0, cp.bs_height_m + dz}, cp) ==
          doctest::Approx(1.0 / 13.0).epsilon(1e-9));
    CHECK_THROWS_AS(ch::elevation_angle_deg({0.0, 0.0, 20.0}, 20.0), std::domain_error);

    // monotone increasing in elevation at fixed range
    double prev = -1.0;
    for (double phi = -80.0; phi <= 80.0; phi += 5.0) {
        const double rad = phi * 3.14159265358979323846 / 180.0;
        Position3 p{200.0 * std::cos(rad), 0.0, cp.bs_height_m + 200.0 * std::sin(rad)};
        const double pl = ch::los_probability(p, cp);
        CHECK(pl > prev);
        CHECK(pl > 0.0);
        CHECK(pl < 1.0);
        prev = pl;
    }
}

TEST_CASE("average pathloss") {
    ChannelParams cp;
    // free-space + excess at d = 0.1 km: 32.44 + 66.02 - 20 + 1
    ChannelParams flat = cp;
    flat.eta_nlos_db = flat.eta_los_db = 1.0;
    Position3 p{0.0, 0.0, cp.bs_height_m + 100.0};
    CHECK(ch::average_pathloss_db(p, flat) == doctest::Approx(79.46059991327962).epsilon(1e-12));

    // convex combination stays between the LoS and NLoS curves
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        Position3 q{rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0),
                    rng.uniform(1.0, 200.0)};
        const double mix = ch::average_pathloss_db(q, cp);
        ChannelParams los_only = cp;
        los_only.eta_nlos_db = los_only.eta_los_db;
        ChannelParams nlos_only = cp;
        nlos_only.eta_los_db = nlos_only.eta_nlos_db;
        CHECK(mix >= ch::average_pathloss_db(q, los_only) - 1e-12);
        CHECK(mix <= ch::average_pathloss_db(q, nlos_only) + 1e-12);
    }
}

TEST_CASE("link rate") {
    // received power equal to the noise floor: exactly one bandwidth-slot of bits
    ChannelParams cp;
    cp.tx_power_dbm = cp.noise_power_dbm;  // P_R = sigma^2 once pathloss is zeroed
    cp.fs_const_db = -20.0 * std::log10(cp.carrier_freq_mhz);  // cancel the frequency term
    cp.eta_los_db = cp.eta_nlos_db = 0.0;
    Position3 km_above{0.0, 0.0, cp.bs_height_m + 1000.0};  // d = 1 km => 20 log10(1) = 0
    CHECK(ch::link_rate(km_above, cp, 1.0) == doctest::Approx(cp.bandwidth_hz).epsilon(1e-12));

    // rate decays along a fixed-elevation ray
    ChannelParams def;
    const double rad = 0.3;
    double prev = std::numeric_limits<double>::infinity();
    for (double d = 50.0; d <= 2000.0; d += 50.0) {
        Position3 p{d * std::cos(rad), 0.0, def.bs_height_m + d * std::sin(rad)};
        const double r = ch::link_rate(p, def, 1.0);
        CHECK(r > 0.0);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("buffer drain step") {
    CHECK(ch::buffer_drain_step(0.0, 42.0) == 0.0);
    CHECK(ch::buffer_drain_step(100.0, 30.0) == doctest::Approx(70.0));
    CHECK(ch::buffer_drain_step(10.0, 30.0) == 0.0);

    // constant-rate drain empties in ceil(q / rate) slots
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const double rate = rng.uniform(1.0, 50.0);
        const double q0 = rng.uniform(0.5, 400.0);
        double q = q0;
        int slots = 0;
        while (q > 0.0) {
            q = ch::buffer_drain_step(q, rate);
            ++slots;
            REQUIRE(slots < 10000);
        }
        CHECK(slots == static_cast<int>(std::ceil(q0 / rate)));
    }
}

TEST_SUITE_END();

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "sirsim/process.hpp"

using namespace sirsim;

TEST_CASE("sirs propensities match the transition rates") {
    const auto sys = sirs_system(SirsParams(100, 1.0, 0.5));
    REQUIRE(sys.dimension == 2);
    REQUIRE(sys.reactions.size() == 3);

    State s = {10, 20};
    CHECK(sys.reactions[0].propensity(s) == doctest::Approx(7.0));   // infection
    CHECK(sys.reactions[1].propensity(s) == doctest::Approx(10.0));  // recovery
    CHECK(sys.reactions[2].propensity(s) == doctest::Approx(10.0));  // immunity loss
}

TEST_CASE("sirs extinction state is absorbing in i") {
    const auto sys = sirs_system(SirsParams(50, 2.0, 0.25));
    State s = {0, 17};
    CHECK(sys.reactions[0].propensity(s) == 0.0);
    CHECK(sys.reactions[1].propensity(s) == 0.0);
    CHECK(sys.reactions[2].propensity(s) > 0.0);
}

TEST_CASE("sirs infection vanishes when susceptibles run out") {
    const auto sys = sirs_system(SirsParams(30, 1.5, 1.0));
    State s = {12, 18};  // i + r == N
    CHECK(sys.reactions[0].propensity(s) == 0.0);
}

TEST_CASE("sirs total propensity identity") {
    const SirsParams params(250, 0.93, 0.31);
    const auto sys = sirs_system(params);
    for (int64_t i : {0, 1, 7, 100, 249}) {
        for (int64_t r : {0, 1, 50}) {
            if (i + r > params.n_pop) continue;
            State s = {i, r};
            const double expected =
                params.lambda * static_cast<double>(params.n_pop - i - r) *
                    static_cast<double>(i) / static_cast<double>(params.n_pop) +
                static_cast<double>(i) + params.gamma * static_cast<double>(r);
            CHECK(sys.total_propensity(s) == expected);
        }
    }
}

TEST_CASE("sirs reactions never leave the state space, exhaustively for small N") {
    for (int64_t n : {1, 2, 5, 20}) {
        const auto sys = sirs_system(SirsParams(n, 1.3, 0.7));
        for (int64_t i = 0; i <= n; ++i) {
            for (int64_t r = 0; i + r <= n; ++r) {
                State s = {i, r};
                REQUIRE(sys.feasible(s));
                for (const auto& reaction : sys.reactions) {
                    State next = s;
                    next[0] += reaction.delta[0];
                    next[1] += reaction.delta[1];
                    if (!sys.feasible(next)) CHECK(reaction.propensity(s) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("bdi rates") {
    SUBCASE("linear birth-death") {
        const auto sys = bdi_system(BdiParams(0.5, 1.0, 0.0));
        State s = {4};
        CHECK(sys.reactions[0].propensity(s) == doctest::Approx(2.0));
        CHECK(sys.reactions[1].propensity(s) == doctest::Approx(4.0));
    }
    SUBCASE("immigration keeps pushing from zero when not absorbing") {
        const auto sys = bdi_system(BdiParams(0.0, 1.0, 3.0, false));
        State zero = {0};
        CHECK(sys.reactions[0].propensity(zero) == doctest::Approx(3.0));
        CHECK(sys.reactions[1].propensity(zero) == 0.0);
    }
    SUBCASE("absorbing at zero freezes both rates") {
        const auto sys = bdi_system(BdiParams(0.0, 1.0, 3.0, true));
        State zero = {0};
        CHECK(sys.reactions[0].propensity(zero) == 0.0);
        CHECK(sys.reactions[1].propensity(zero) == 0.0);
        State one = {1};
        CHECK(sys.reactions[0].propensity(one) == doctest::Approx(3.0));
    }
    SUBCASE("without immigration zero is absorbing regardless of the flag") {
        for (bool absorb : {false, true}) {
            const auto sys = bdi_system(BdiParams(0.8, 1.0, 0.0, absorb));
            State zero = {0};
            CHECK(sys.total_propensity(zero) == 0.0);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SirsParams(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SirsParams(10, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SirsParams(10, 1.0, 0.0), std::invalid_argument);  // gamma > 0 required
    CHECK_THROWS_AS(SirsParams(10, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BdiParams(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BdiParams(-0.5, 1.0, 0.0), std::invalid_argument);
    CHECK_NOTHROW(BdiParams(0.0, 0.0, 2.0));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zeno/projective.hpp"
#include "zeno/sweeps.hpp"

using namespace zeno;
using doctest::Approx;

TEST_SUITE("projective") {

TEST_CASE("flat decay is immune to repeated measurement") {
    auto m = SurvivalModel::flat(1.0);
    for (double t : {1e-3, 1.0, 1e3}) CHECK(std::abs(decay_rate_repeated(m, t) - 1.0) <= 1e-10);
    CHECK_FALSE(find_transition_interval(m, 1.0).has_value());
    CHECK(decay_rate_perturbative(Flat{1.0}, {0.0}, 0.3) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("repeated measurement result") {
    auto m = SurvivalModel::lorentzian(1.0, 20.0, 40.0, 0.0);
    auto st = exponential_stage(1.0, 20.0, 40.0, 0.0);
    auto r = repeated_measurement(m, st.rate, 0.05);
    CHECK(r.tau_i == 0.05);
    CHECK(r.rate == Approx(-std::log(m.probability(0.05)) / 0.05));
    CHECK(r.normalized == Approx(r.rate / st.rate));
    CHECK_THROWS(decay_rate_repeated(SurvivalModel::from_function([](double) { return 0.0; }), 1.0));
}

TEST_CASE("small and long interval laws") {
    auto m = SurvivalModel::lorentzian(1.0, 20.0, 0.0, 0.0);
    CHECK(decay_rate_repeated(m, 1e-4) / 1e-4 == Approx(10.0).epsilon(0.01));
    auto st = exponential_stage(1.0, 20.0, 0.0, 0.0);
    CHECK(decay_rate_repeated(m, 1e3) == Approx(st.rate).epsilon(0.01));
}

TEST_CASE("weight function") {
    CHECK(weight_repeated(2.0, 2.0, 0.3) == Approx(0.3));
    for (int n : {1, 2, -3}) CHECK(std::abs(weight_repeated(2.0 + 2 * std::numbers::pi * n / 0.3, 2.0, 0.3)) <= 1e-12);
}

TEST_CASE("perturbative rate") {
    Lorentzian l{1.0, 20.0, 0.0};
    auto m = SurvivalModel::lorentzian(1.0, 20.0, 0.0, 0.0);
    CHECK(decay_rate_perturbative(l, {0.0}, 0.01) == Approx(decay_rate_repeated(m, 0.01)).epsilon(0.02));
    CHECK(decay_rate_perturbative(l, {40.0}, 500.0) == Approx(0.2).epsilon(5e-3));
    for (double t : {1e-3, 0.1, 3.0}) CHECK(decay_rate_perturbative(l, {20.0}, t) >= 0);
}

TEST_CASE("AZE peak for large detuning") {
    auto m = SurvivalModel::lorentzian(1.0, 20.0, 40.0, 0.0);
    auto st = exponential_stage(1.0, 20.0, 40.0, 0.0);
    auto opt = optimum_interval(m);
    REQUIRE(opt);
    CHECK(opt->tau == Approx(0.066).epsilon(0.1));
    CHECK(opt->rate > st.rate);
    auto ts = find_transition_interval(m, st.rate);
    REQUIRE(ts);
    CHECK(*ts > 0);
    CHECK(*ts < 0.066);
    CHECK(decay_rate_repeated(m, *ts) == Approx(st.rate).epsilon(1e-7));
}

TEST_CASE("no transition on resonance") {
    auto m = SurvivalModel::lorentzian(1.0, 20.0, 0.0, 0.0);
    auto st = exponential_stage(1.0, 20.0, 0.0, 0.0);
    CHECK_FALSE(find_transition_interval(m, st.rate).has_value());
}

TEST_CASE("Z classification") {
    CHECK(classify_by_z(exponential_stage(1.0, 20.0, 10.0, 0.0)) == ZClass::TypeA);
    CHECK(classify_by_z(exponential_stage(1.0, 20.0, 30.0, 0.0)) == ZClass::TypeB);
    CHECK(classify_by_z(ExponentialStage{1.0, 0.5, 1.0}) == ZClass::Boundary);
    CHECK(std::string(to_string(ZClass::TypeA)) == "type_a");
}

TEST_CASE("Z classification matches transition existence") {
    for (double d : linspace(0.0, 80.0, 20)) {
        if (std::abs(d / 20.0 - 1.0) <= 0.05) continue;
        auto st = exponential_stage(1.0, 20.0, d, 0.0);
        auto m = SurvivalModel::lorentzian(1.0, 20.0, d, 0.0);
        CAPTURE(d);
        CHECK((classify_by_z(st) == ZClass::TypeB) == find_transition_interval(m, st.rate).has_value());
    }
}

}

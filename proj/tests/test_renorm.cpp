#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "zeno/errors.hpp"
#include "zeno/quadrature.hpp"
#include "zeno/renorm.hpp"

using namespace zeno;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("renorm") {

TEST_CASE("eta profiles") {
    auto e = EtaProfile::piecewise({-1.0, -1.0, 1.0, 1.0}, {0.0, 2.0, 2.0, 0.0});
    CHECK(e(0.0) == 2.0);
    CHECK(e(5.0) == 0.0);
    CHECK(e(1.0) == 1.0);
    CHECK(e.max() == 2.0);
    CHECK(e.zero_weight(3.0) == 1.0);
    CHECK(e.zero_weight(1.0) == 0.5);
    CHECK(e.zero_weight(0.0) == 0.0);
    CHECK(EtaProfile::constant(3.0)(-1e9) == 3.0);
}

TEST_CASE("response validation") {
    CHECK_THROWS_AS(validate(DetectorResponse{FlatResponse{-1.0}}), ConfigError);
    CHECK_THROWS_AS(validate(DetectorResponse{Geometric{1.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(validate(DetectorResponse{CustomResponse{{0.0, 1.0}, {1.0, -1.0}}}), ConfigError);
    CHECK_NOTHROW(validate(DetectorResponse{ActiveBand{1.0, 1.0, std::nullopt}}));
}

TEST_CASE("custom response csv") {
    auto c = parse_custom_response_csv("eps,eta\n-1,0\n-1,2\n1,2\n1,0\n");
    CHECK(c.eps.size() == 4);
    CHECK_THROWS_AS(parse_custom_response_csv("mu,g2\n0,1\n"), ConfigError);
}

TEST_CASE("per-mode sum rule") {
    for (double eta : {0.01, 1.0, 40.0}) {
        double v = integrate_pieces([&](double mu) { return eta / (2 * kPi) / (mu * mu + eta * eta / 4); },
                                    {-kInf, -eta, 0.0, eta, kInf}, {1e-12, 1e-10})
                       .value;
        CHECK(v == Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("no measurement recovers the bare form factor") {
    Lorentzian l{1.0, 20.0, 0.0};
    for (double mu : {-30.0, 0.0, 17.0}) CHECK(renormalized_density(l, NoMeasurement{}, {0.0}, mu) == evaluate(l, mu));
    CHECK(measured_rate(l, NoMeasurement{}, {40.0}) == fgr_rate(l, {40.0}));
}

TEST_CASE("lorentzian with flat response") {
    const double g = 1.0, d = 20.0;
    for (double tau : {0.005, 0.025, 0.5})
        for (double mu : {-25.0, 0.0, 10.0, 60.0}) {
            double w = d + 1 / (2 * tau);
            double closed = g / (2 * kPi) * d * w / (mu * mu + w * w);
            CHECK(lorentzian_flat_renormalized_density(g, d, 0.0, tau, mu) == Approx(closed).epsilon(1e-13));
            CHECK(renormalized_density(Lorentzian{g, d, 0.0}, FlatResponse{tau}, {mu + 3.0}, mu) ==
                  Approx(closed).epsilon(1e-6));
        }
    for (double det : {0.0, 20.0, 40.0})
        for (double tau : {0.01, 0.5}) {
            double w = d + 1 / (2 * tau);
            CHECK(flat_response_rate(g, d, det, tau) == Approx(g * d * w / (det * det + w * w)).epsilon(1e-14));
            CHECK(measured_rate(Lorentzian{g, d, 0.0}, FlatResponse{tau}, {det}) ==
                  Approx(flat_response_rate(g, d, det, tau)).epsilon(1e-6));
        }
}

TEST_CASE("total weight preserved under flat response") {
    for (double tau : {0.003, 0.1, 2.0}) {
        double v = integrate([&](double mu) { return lorentzian_flat_renormalized_density(1.0, 20.0, 0.0, tau, mu); },
                             -kInf, kInf)
                       .value;
        CHECK(v == Approx(10.0).epsilon(1e-4));
    }
}

TEST_CASE("normalized rate") {
    CHECK(flat_response_normalized_rate(1.0, 20.0, 40.0, 1e9) == Approx(1.0).epsilon(1e-7));
    double prev = flat_response_normalized_rate(1.0, 20.0, 0.0, 10.0);
    for (double tau = 5.0; tau > 1e-4; tau /= 1.5) {
        double v = flat_response_normalized_rate(1.0, 20.0, 0.0, tau);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("phase boundary and optimum") {
    CHECK(*phase_boundary_flat(40.0, 20.0) == Approx(1.0 / 120.0).epsilon(1e-14));
    CHECK_FALSE(phase_boundary_flat(20.0, 20.0).has_value());
    CHECK_FALSE(phase_boundary_flat(5.0, 20.0).has_value());
    auto o = optimum_tau_flat(40.0, 20.0);
    REQUIRE(o);
    CHECK(o->tau_r == Approx(0.025).epsilon(1e-14));
    CHECK(o->max_enhancement == Approx(0.25).epsilon(1e-14));
    CHECK(o->max_ratio == Approx(1.25).epsilon(1e-14));
    CHECK(flat_response_normalized_rate(1.0, 20.0, 40.0, o->tau_r) == Approx(o->max_ratio).epsilon(1e-12));
    CHECK(flat_response_normalized_rate(1.0, 20.0, 40.0, 1.0 / 120.0) == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(optimum_tau_flat(10.0, 20.0).has_value());
}

TEST_CASE("flat weight") {
    CHECK(weight_flat(3.0, 3.0, 0.2) == Approx(0.8));
    double v = integrate([](double mu) { return weight_flat(mu, 0.0, 0.2); }, -kInf, kInf).value;
    CHECK(v == Approx(2 * kPi).epsilon(1e-4));
}

TEST_CASE("geometric mixture") {
    const double g = 1.0, d = 20.0;
    double free = g * d * d / (d * d);
    CHECK(geometric_rate(g, d, 0.0, 0.5, 1.0) == Approx(free));
    CHECK(geometric_rate(g, d, 0.0, 0.5, 0.0) == Approx(flat_response_rate(g, d, 0.0, 0.5)));
    CHECK(geometric_rate(g, d, 0.0, 0.5, 0.2) == Approx(0.2 * free + 0.8 * flat_response_rate(g, d, 0.0, 0.5)));
    FormFactor ff = Lorentzian{g, d, 0.0};
    CHECK(measured_rate(ff, Geometric{0.2, 0.5}, {0.0}) ==
          Approx(geometric_rate(g, d, 0.0, 0.5, 0.2)).epsilon(1e-6));
    CHECK(build_channels(ff, Geometric{0.2, 0.5}, {0.0}).size() == 2);
    CHECK_THROWS_AS(build_channels(make_geometric_split(ff, 0.2), Geometric{0.2, 0.5}, {0.0}), ConfigError);
}

TEST_CASE("banded closed forms") {
    const double g = 1.0;
    CHECK(banded_renormalized_density(g, 10.0, 0.05, 0.0, 0.0) ==
          Approx(g / (kPi * kPi) * std::atan(2 * 0.05 * 10.0)).epsilon(1e-14));
    CHECK(banded_renormalized_density(g, 10.0, 0.05, 1e7, 0.0) == Approx(g / (2 * kPi)).epsilon(1e-6));
    CHECK(banded_renormalized_density(g, 1e8, 1.0, 0.0, 0.0) == Approx(g / (2 * kPi)).epsilon(1e-6));
    double f0 = false_renormalized_density(g, 10.0, 1.0 / 30, 0.0, 0.0);
    CHECK(2 * kPi * f0 == Approx(false_measurement_rate(g, 10.0, 1.0 / 30)).epsilon(1e-14));
    CHECK(false_measurement_rate(g, 10.0, 1.0 / 30) == Approx(2 - (2 / kPi) * std::atan(2.0 / 3)).epsilon(1e-14));
    CHECK(banded_rate(g, 10.0, 0.05) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("generic quadrature reproduces banded closed forms") {
    FormFactor ff = Flat{1.0};
    for (double mu : {-30.0, -10.0, -3.0, 0.0, 4.0, 10.0, 12.0}) {
        CAPTURE(mu);
        CHECK(renormalized_density(ff, ActiveBand{10.0, 0.05, std::nullopt}, {0.0}, mu) ==
              Approx(banded_renormalized_density(1.0, 10.0, 0.05, mu, 0.0)).epsilon(1e-6));
        CHECK(renormalized_density(ff, InactiveBand{10.0, 1.0 / 30, std::nullopt}, {0.0}, mu) ==
              Approx(false_renormalized_density(1.0, 10.0, 1.0 / 30, mu, 0.0)).epsilon(1e-6));
    }
}

TEST_CASE("custom profiles match built-in closed forms") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(0.5, 20.0), ut(0.01, 2.0), uo(-5.0, 5.0);
    for (int i = 0; i < 10; ++i) {
        double dd = ud(rng), tau = ut(rng), om = uo(rng);
        CustomResponse active{{om - dd, om - dd, om + dd, om + dd}, {0.0, 1 / tau, 1 / tau, 0.0}};
        CustomResponse inactive{{om - dd, om - dd, om + dd, om + dd}, {1 / tau, 0.0, 0.0, 1 / tau}};
        CHECK(measured_rate(Flat{1.0}, active, {om}) == Approx(banded_rate(1.0, dd, tau)).epsilon(1e-4));
        CHECK(measured_rate(Flat{1.0}, inactive, {om}) == Approx(false_measurement_rate(1.0, dd, tau)).epsilon(1e-4));
    }
}

TEST_CASE("false measurement never suppresses; banded never enhances") {
    for (double dd : {0.1, 2.0, 50.0})
        for (double tau : {1e-3, 0.1, 10.0}) {
            CHECK(false_measurement_rate(1.0, dd, tau) >= 1.0);
            CHECK(banded_rate(1.0, dd, tau) <= 1.0);
        }
}

}

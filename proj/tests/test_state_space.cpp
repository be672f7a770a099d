#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "baltrunc/balance.hpp"
#include "baltrunc/gramian.hpp"
#include "baltrunc/gridmodel.hpp"
#include "baltrunc/state_space.hpp"
#include "support/oracles.hpp"

using baltrunc::Complex;
using baltrunc::Matrix;
using baltrunc::StateSpace;

namespace {

StateSpace first_order() {
    return StateSpace(Matrix{{-1.0}}, Matrix{{1.0}}, Matrix{{1.0}}, 0.0);
}

StateSpace example31() {
    return baltrunc::build_canonical({10.0, 1.0, 0.1, 0.01}, {1, 1, -1, -1},
                                     {1.0, 2.0, 3.0, 4.0});
}

baltrunc::GridConfig example52() {
    baltrunc::GridConfig cfg;
    cfg.m_hat = 0.044;
    cfg.d_hat = 0.038;
    cfg.droop_inv = {0.013, 0.014, 0.022, 0.025};
    cfg.tau = {5.01, 6.82, 7.38, 7.79};
    return cfg;
}

}  // namespace

TEST_CASE("transfer_eval") {
    StateSpace sys = first_order();
    SECTION("1/(s+1) at s=0") {
        REQUIRE(std::abs(baltrunc::transfer_eval(sys, Complex(0, 0)) - Complex(1, 0)) < 1e-14);
    }
    SECTION("1/(s+1) at s=i") {
        Complex g = baltrunc::transfer_eval(sys, Complex(0, 1));
        REQUIRE(std::abs(g - Complex(0.5, -0.5)) < 1e-14);
    }
    SECTION("pure feedthrough (n = 0)") {
        StateSpace d_only(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), -3.5);
        REQUIRE(baltrunc::transfer_eval(d_only, Complex(2, 7)) == Complex(-3.5, 0));
    }
    SECTION("evaluation at a pole throws") {
        REQUIRE_THROWS_AS(baltrunc::transfer_eval(sys, Complex(-1, 0)), baltrunc::SingularMatrix);
    }
}

TEST_CASE("check_stability") {
    SECTION("stable scalar") {
        auto r = baltrunc::check_stability(first_order());
        REQUIRE(r.stable);
        REQUIRE(r.spectral_abscissa == Catch::Approx(-1.0));
    }
    SECTION("marginal rotation counts as unstable") {
        StateSpace sys(Matrix{{0.0, 1.0}, {-1.0, 0.0}}, Matrix{{1.0}, {0.0}}, Matrix{{1.0, 0.0}},
                       0.0);
        auto r = baltrunc::check_stability(sys);
        REQUIRE_FALSE(r.stable);
        REQUIRE(std::abs(r.spectral_abscissa) < 1e-12);
    }
    SECTION("canonical fourth-order example is stable") {
        REQUIRE(baltrunc::check_stability(example31()).stable);
    }
}

TEST_CASE("check_minimality") {
    SECTION("first-order system is minimal") { REQUIRE(baltrunc::check_minimality(first_order())); }
    SECTION("unobservable duplicate copy is flagged") {
        StateSpace sys(Matrix{{-1.0, 0.0}, {0.0, -1.0}}, Matrix{{1.0}, {1.0}}, Matrix{{1.0, 0.0}},
                       0.0);
        REQUIRE_FALSE(baltrunc::check_minimality(sys));
    }
    SECTION("power model is minimal") {
        StateSpace sys = baltrunc::to_state_space(baltrunc::build_grid_model(example52()));
        REQUIRE(baltrunc::check_minimality(sys));
    }
    SECTION("unstable input throws") {
        StateSpace sys(Matrix{{1.0}}, Matrix{{1.0}}, Matrix{{1.0}}, 0.0);
        REQUIRE_THROWS_AS(baltrunc::check_minimality(sys), baltrunc::NotStable);
    }
}

TEST_CASE("leading_subsystem") {
    StateSpace sys = example31();
    SECTION("k = 2 matches the upper-left partition") {
        StateSpace sub = baltrunc::leading_subsystem(sys, 2);
        REQUIRE(sub.a(0, 0) == Catch::Approx(-0.05));
        REQUIRE(sub.a(0, 1) == Catch::Approx(-2.0 / 11.0));
        REQUIRE(sub.a(1, 1) == Catch::Approx(-2.0));
        REQUIRE(sub.b(0, 0) == Catch::Approx(1.0));
        REQUIRE(sub.b(1, 0) == Catch::Approx(2.0));
        REQUIRE(sub.c(0, 1) == Catch::Approx(2.0));
    }
    SECTION("k = 1 gives the scalar system") {
        StateSpace sub = baltrunc::leading_subsystem(sys, 1);
        REQUIRE(sub.size() == 1);
        REQUIRE(sub.a(0, 0) == Catch::Approx(-0.05));
    }
    SECTION("power model k = n-1 drops the last generator") {
        StateSpace full = baltrunc::to_state_space(baltrunc::build_grid_model(example52()));
        StateSpace sub = baltrunc::leading_subsystem(full, 4);
        REQUIRE(sub.size() == 4);
        REQUIRE(sub.a(3, 3) == Catch::Approx(-1.0 / 7.38));
    }
    SECTION("nesting property") {
        StateSpace a = baltrunc::leading_subsystem(baltrunc::leading_subsystem(sys, 3), 2);
        StateSpace b = baltrunc::leading_subsystem(sys, 2);
        REQUIRE((a.a - b.a).max_abs() == 0.0);
        REQUIRE((a.b - b.b).max_abs() == 0.0);
        REQUIRE((a.c - b.c).max_abs() == 0.0);
    }
    SECTION("bad k throws") {
        REQUIRE_THROWS_AS(baltrunc::leading_subsystem(sys, 0), baltrunc::BadDimension);
        REQUIRE_THROWS_AS(baltrunc::leading_subsystem(sys, 4), baltrunc::BadDimension);
    }
}

TEST_CASE("error_system") {
    StateSpace sys = example31();
    SECTION("error against itself vanishes on a grid") {
        StateSpace err = baltrunc::error_system(sys, sys);
        for (double w : {0.0, 0.3, 1.0, 12.0}) {
            REQUIRE(std::abs(baltrunc::transfer_eval(err, Complex(0, w))) < 1e-12);
        }
    }
    SECTION("error against the zero system equals the full system") {
        StateSpace zero(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), 0.0);
        StateSpace err = baltrunc::error_system(sys, zero);
        for (double w : {0.0, 0.5, 2.0}) {
            Complex a = baltrunc::transfer_eval(err, Complex(0, w));
            Complex b = baltrunc::transfer_eval(sys, Complex(0, w));
            REQUIRE(std::abs(a - b) < 1e-12);
        }
    }
    SECTION("transfer of the error system is the difference of transfers") {
        std::mt19937 gen(31);
        StateSpace red = baltrunc::leading_subsystem(sys, 2);
        StateSpace err = baltrunc::error_system(sys, red);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (int k = 0; k < 50; ++k) {
            Complex s(std::abs(dist(gen)) + 0.1, dist(gen));
            Complex lhs = baltrunc::transfer_eval(err, s);
            Complex rhs = baltrunc::transfer_eval(sys, s) - baltrunc::transfer_eval(red, s);
            REQUIRE(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("dc_gain") {
    SECTION("1/(s+1)") { REQUIRE(baltrunc::dc_gain(first_order()) == Catch::Approx(1.0)); }
    SECTION("power model dc gain is 1/(d_hat + sum droop_inv)") {
        StateSpace sys = baltrunc::to_state_space(baltrunc::build_grid_model(example52()));
        REQUIRE(oracles::rel_err(baltrunc::dc_gain(sys), 1.0 / 0.112) < 1e-12);
    }
    SECTION("pure feedthrough") {
        StateSpace d_only(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), 4.25);
        REQUIRE(baltrunc::dc_gain(d_only) == 4.25);
    }
    SECTION("agrees with transfer_eval at zero") {
        StateSpace sys = example31();
        Complex g0 = baltrunc::transfer_eval(sys, Complex(0, 0));
        REQUIRE(std::abs(baltrunc::dc_gain(sys) - g0.real()) < 1e-12);
    }
}

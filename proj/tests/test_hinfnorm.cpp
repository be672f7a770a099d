#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "baltrunc/balance.hpp"
#include "baltrunc/hinfnorm.hpp"
#include "support/oracles.hpp"

using baltrunc::Complex;
using baltrunc::Matrix;
using baltrunc::StateSpace;
using oracles::rel_err;

namespace {

StateSpace example31() {
    return baltrunc::build_canonical({10.0, 1.0, 0.1, 0.01}, {1, 1, -1, -1},
                                     {1.0, 2.0, 3.0, 4.0});
}

}  // namespace

TEST_CASE("hinf_norm basics") {
    SECTION("1/(s+1) has norm one at dc") {
        StateSpace sys(Matrix{{-1.0}}, Matrix{{1.0}}, Matrix{{1.0}}, 0.0);
        auto r = baltrunc::hinf_norm(sys);
        REQUIRE(rel_err(r.norm, 1.0) < 1e-8);
        REQUIRE(r.peak_frequency < 1e-6);
    }
    SECTION("static gain") {
        StateSpace sys(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), -3.0);
        REQUIRE(baltrunc::hinf_norm(sys).norm == 3.0);
    }
    SECTION("order-1 truncation error of the canonical example") {
        StateSpace sys = example31();
        StateSpace red = baltrunc::leading_subsystem(sys, 1);
        auto r = baltrunc::hinf_norm(baltrunc::error_system(sys, red));
        REQUIRE(rel_err(r.norm, 1.78) < 1e-6);
    }
    SECTION("unstable input throws") {
        StateSpace sys(Matrix{{0.5}}, Matrix{{1.0}}, Matrix{{1.0}}, 0.0);
        REQUIRE_THROWS_AS(baltrunc::hinf_norm(sys), baltrunc::NotStable);
    }
    SECTION("error system of a system against itself is numerically zero") {
        StateSpace sys = example31();
        auto r = baltrunc::hinf_norm(baltrunc::error_system(sys, sys));
        REQUIRE(r.norm <= 1e-12);
    }
    SECTION("norm dominated by a sampled lower bound") {
        StateSpace sys = example31();
        auto r = baltrunc::hinf_norm(sys);
        for (double w : {0.0, 0.01, 0.3, 1.0, 17.0}) {
            const double v = std::abs(baltrunc::transfer_eval(sys, Complex(0, w)));
            REQUIRE(r.norm >= v - 1e-8 * std::max(1.0, v));
        }
        const double peak_val =
            std::abs(baltrunc::transfer_eval(sys, Complex(0, r.peak_frequency)));
        REQUIRE(peak_val >= r.norm * (1.0 - 1e-7));
    }
}

TEST_CASE("hinf_norm agrees with a dense grid oracle") {
    std::mt19937 gen(97);
    int done = 0;
    while (done < 12) {
        const std::size_t n = 2 + gen() % 7;
        Matrix a = oracles::random_stable(gen, n);
        Matrix b = oracles::random_matrix(gen, n, 1);
        Matrix c = oracles::random_matrix(gen, 1, n);
        StateSpace sys(a, b, c, 0.0);
        ++done;
        const double nrm = baltrunc::hinf_norm(sys).norm;
        double lo = 1e300, hi = 0.0;
        for (const Complex& l : baltrunc::eigenvalues(sys.a).eigenvalues) {
            lo = std::min(lo, std::abs(l));
            hi = std::max(hi, std::abs(l));
        }
        auto grid = baltrunc::log_grid(lo * 1e-3, hi * 1e3, 100000);
        double best = std::abs(baltrunc::transfer_eval(sys, Complex(0, 0)));
        for (const auto& [w, g] : baltrunc::frequency_response(sys, grid))
            best = std::max(best, std::abs(g));
        REQUIRE(nrm >= best * (1.0 - 1e-6));
        REQUIRE(rel_err(nrm, best) < 1e-6);
    }
}

TEST_CASE("frequency_response") {
    StateSpace sys = example31();
    SECTION("empty grid") { REQUIRE(baltrunc::frequency_response(sys, {}).empty()); }
    SECTION("omega zero returns the dc gain") {
        auto rows = baltrunc::frequency_response(sys, {0.0});
        REQUIRE(rows.size() == 1);
        REQUIRE(std::abs(rows[0].second.real() - baltrunc::dc_gain(sys)) < 1e-12);
        REQUIRE(std::abs(rows[0].second.imag()) < 1e-14);
    }
    SECTION("hessenberg fast path matches the direct solve") {
        auto grid = baltrunc::log_grid(1e-3, 1e3, 64);  // above the fast-path cutoff
        auto rows = baltrunc::frequency_response(sys, grid);
        for (const auto& [w, g] : rows) {
            Complex direct = baltrunc::transfer_eval(sys, Complex(0, w));
            REQUIRE(std::abs(g - direct) < 1e-10 * (1.0 + std::abs(direct)));
        }
    }
}

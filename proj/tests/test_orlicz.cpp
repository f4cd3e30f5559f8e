#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccp/operators.hpp"
#include "ccp/orlicz.hpp"
#include "helpers.hpp"

using namespace ccp;
using namespace ccp::testing;

TEST_CASE("young function construction") {
    SUBCASE("power is normalized out of the box") {
        const auto psi = YoungFunction::power(2.5);
        CHECK(psi(1.0) == doctest::Approx(1.0));
        CHECK(psi(0.0) == 0.0);
        CHECK(psi(2.0) == doctest::Approx(std::pow(2.0, 2.5)));
    }
    SUBCASE("power_log normalizes and stays a Young function") {
        for (auto [r, d] : std::vector<std::pair<double, double>>{
                 {2.0, 1.0}, {2.0, -1.5}, {3.0, -2.0}, {1.5, 0.75}, {2.0, -0.5}}) {
            const auto psi = YoungFunction::power_log(r, d);
            CHECK(psi(1.0) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(psi(0.0) == 0.0);
            // increasing on a grid (validate() already audits convexity)
            double prev = 0.0;
            for (double t = 1e-4; t < 1e6; t *= 3.0) {
                CHECK(psi(t) >= prev);
                prev = psi(t);
            }
        }
    }
    SUBCASE("inverse inverts to high accuracy") {
        const auto psi = YoungFunction::power_log(2.0, -1.5);
        for (double t : {1e-3, 0.1, 1.0, 7.0, 1e4}) {
            CHECK(rel_err(psi(psi.inverse(t)), t) < 1e-9);
        }
    }
    SUBCASE("parse specs") {
        CHECK(YoungFunction::parse("power:3")(2.0) == doctest::Approx(8.0));
        CHECK_NOTHROW(YoungFunction::parse("powerlog:2:-1.5"));
        CHECK_THROWS_AS(YoungFunction::parse("gauss:1"), input_error);
    }
    SUBCASE("custom tables validate monotonicity") {
        CHECK_NOTHROW(YoungFunction::custom_table({0.5, 1.0, 2.0, 8.0}, {0.25, 1.0, 4.0, 64.0}));
        CHECK_THROWS_AS(YoungFunction::custom_table({1.0, 2.0}, {4.0, 1.0}), input_error);
    }
    SUBCASE("doubling constants are finite") {
        const auto [c, n] = YoungFunction::power_log(2.0, 1.0).doubling_constants();
        CHECK(std::isfinite(c));
        CHECK(c >= 1.0);
        CHECK(n == 1.0);
    }
}

TEST_CASE("complementary pairing") {
    SUBCASE("power pair has the exact inverse product t") {
        const auto psi = YoungFunction::power(3.0);
        const auto bar = psi.complementary();
        CHECK(bar.r() == doctest::Approx(1.5));
        for (double t = 1e-3; t <= 1e6; t *= 10.0)
            CHECK(rel_err(psi.inverse(t) * bar.inverse(t), t) < 1e-8);
    }
    SUBCASE("log pair follows the analytic exponent rule and is an involution") {
        const double r = 2.0, eps = 1.0;
        const auto psi = YoungFunction::power_log(r, -(1.0 + eps));
        const auto bar = psi.complementary();
        const double rp = r / (r - 1.0);
        CHECK(bar.r() == doctest::Approx(rp));
        CHECK(bar.delta() == doctest::Approx((rp - 1.0) * (1.0 + eps)));
        const auto back = bar.complementary();
        CHECK(back.r() == doctest::Approx(r));
        CHECK(back.delta() == doctest::Approx(-(1.0 + eps)));
    }
    SUBCASE("log pair inverse product stays within equivalence bounds") {
        // The normalized analytic pair is complementary up to constants, not
        // exactly; record the sandwich on the sampled range.
        const auto psi = YoungFunction::power_log(2.0, -1.5);
        const auto bar = psi.complementary();
        double lo = kInf, hi = 0.0;
        for (double t = 1e-3; t <= 1e6; t *= 2.0) {
            const double prod = psi.inverse(t) * bar.inverse(t) / t;
            lo = std::min(lo, prod);
            hi = std::max(hi, prod);
        }
        CHECK(lo > 0.05);
        CHECK(hi < 4.0);
        // at the normalization point both inverses are 1
        CHECK(rel_err(psi.inverse(1.0) * bar.inverse(1.0), 1.0) < 1e-8);
    }
    SUBCASE("custom functions have no pairing") {
        const auto c = YoungFunction::custom_table({0.5, 1.0, 2.0}, {0.25, 1.0, 4.0});
        CHECK_THROWS_AS(c.complementary(), input_error);
    }
}

TEST_CASE("luxemburg ball norms") {
    Rng rng(61);
    const DiscreteSpace s = random_euclidean_space(30, 1, rng);
    const Ball b{4, 0.6};
    REQUIRE(s.ball_count(b) >= 3);

    SUBCASE("constants come back exactly") {
        const std::vector<double> f(30, 3.14);
        for (const auto& psi :
             {YoungFunction::power(2.0), YoungFunction::power_log(2.0, -1.5)})
            CHECK(orlicz_ball_norm(s, b, f, psi) == doctest::Approx(3.14).epsilon(1e-10));
    }
    SUBCASE("power case equals the closed form") {
        for (int t = 0; t < 30; ++t) {
            const auto f = random_function(30, rng, -2.0, 2.0);
            const double r = rng.uniform(1.1, 4.0);
            const auto pts = s.ball_points(b);
            double mass = 0.0, acc = 0.0;
            for (int p : pts) {
                mass += s.mu(p);
                acc += std::pow(std::abs(f[p]), r) * s.mu(p);
            }
            const double want = std::pow(acc / mass, 1.0 / r);
            CHECK(rel_err(orlicz_ball_norm(s, b, f, YoungFunction::power(r)), want) < 1e-8);
        }
    }
    SUBCASE("zero function has zero norm, empty balls error") {
        const std::vector<double> z(30, 0.0);
        CHECK(orlicz_ball_norm(s, b, z, YoungFunction::power(2.0)) == 0.0);
        CHECK_THROWS_AS(orlicz_ball_norm(s, Ball{0, 0.0}, z, YoungFunction::power(2.0)),
                        input_error);
    }
    SUBCASE("homogeneity and monotonicity") {
        const auto f = random_function(30, rng, -1.0, 1.0);
        const auto psi = YoungFunction::power_log(2.0, 1.0);
        const double base = orlicz_ball_norm(s, b, f, psi);
        auto scaled = f;
        for (auto& v : scaled) v *= 5.0;
        CHECK(rel_err(orlicz_ball_norm(s, b, scaled, psi), 5.0 * base) < 1e-8);
        auto bigger = f;
        for (auto& v : bigger) v = std::abs(v) + 0.2;
        CHECK(orlicz_ball_norm(s, b, bigger, psi) >= base - 1e-10);
    }
    SUBCASE("luxemburg defining property at the returned gauge") {
        const auto f = random_function(30, rng, 0.1, 3.0);
        for (const auto& psi :
             {YoungFunction::power(1.7), YoungFunction::power_log(2.0, -1.5)}) {
            const double lam = orlicz_ball_norm(s, b, f, psi);
            const auto pts = s.ball_points(b);
            double mass = 0.0, avg = 0.0;
            for (int p : pts) {
                mass += s.mu(p);
                avg += psi(std::abs(f[p]) / lam) * s.mu(p);
            }
            avg /= mass;
            CHECK(avg <= 1.0 + 1e-12);
            CHECK(avg >= 1.0 - 1e-6);
        }
    }
}

TEST_CASE("orlicz maximal function") {
    Rng rng(67);
    const DiscreteSpace s = random_euclidean_space(15, 2, rng);
    const BallScanner scanner(s);
    const auto f = random_function(15, rng, -2.0, 2.0);

    SUBCASE("constants") {
        const std::vector<double> c(15, 1.5);
        for (int x = 0; x < 15; ++x)
            CHECK(orlicz_maximal(scanner, c, YoungFunction::power(2.0), x) ==
                  doctest::Approx(1.5).epsilon(1e-9));
    }
    SUBCASE("power case equals the maximal function of |f|^r") {
        const double r = 2.5;
        std::vector<double> fr(15);
        for (int i = 0; i < 15; ++i) fr[i] = std::pow(std::abs(f[i]), r);
        const auto mf = multilinear_maximal_all(scanner, {fr});
        const auto mo = orlicz_maximal_all(scanner, f, YoungFunction::power(r));
        for (int x = 0; x < 15; ++x)
            CHECK(rel_err(mo[x], std::pow(mf[x], 1.0 / r)) < 1e-8);
    }
    SUBCASE("brute force over center and radius agrees") {
        const auto psi = YoungFunction::power_log(2.0, 1.0);
        const auto mo = orlicz_maximal_all(scanner, f, psi);
        for (int x = 0; x < 15; ++x) {
            double best = 0.0;
            for (std::size_t c = 0; c < s.size(); ++c)
                for (double r : s.radii_grid(static_cast<int>(c))) {
                    if (!(r > 0.0) || s.dist(c, x) >= r) continue;
                    best = std::max(
                        best, orlicz_ball_norm(s, {static_cast<int>(c), r}, f, psi));
                }
            CHECK(rel_err(mo[x], best) < 1e-9);
        }
    }
}

TEST_CASE("bp tail verdicts") {
    SUBCASE("powers against p") {
        CHECK(bp_condition_check(YoungFunction::power(2.0), 3.0, 1.0).verdict ==
              TailVerdict::finite);
        CHECK(bp_condition_check(YoungFunction::power(2.0), 2.0, 1.0).verdict ==
              TailVerdict::divergent);
        CHECK(bp_condition_check(YoungFunction::power(3.0), 2.0, 1.0).verdict ==
              TailVerdict::divergent);
    }
    SUBCASE("log-tempered power converges slowly but is classified finite") {
        // integrand ~ 1/(t log^{1.5} t): the doubly geometric schedule shows
        // the geometric decay a plain 2^j ladder would miss
        const auto psi = YoungFunction::power_log(2.0, -1.5);
        CHECK(bp_condition_check(psi, 2.0, 1.0).verdict == TailVerdict::finite);
    }
    SUBCASE("log-boosted power at p = r diverges") {
        const auto psi = YoungFunction::power_log(2.0, 1.0);
        CHECK(bp_condition_check(psi, 2.0, 1.0).verdict == TailVerdict::divergent);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(bp_condition_check(YoungFunction::power(2.0), 1.0, 1.0), input_error);
        CHECK_THROWS_AS(bp_condition_check(YoungFunction::power(2.0), 2.0, 0.0), input_error);
    }
}

TEST_CASE("generalized holder") {
    Rng rng(71);
    const DiscreteSpace s = random_euclidean_space(25, 1, rng);
    std::vector<int> pts;
    for (int i = 0; i < 25; ++i) pts.push_back(i);

    SUBCASE("zero factor zeroes the left side") {
        const auto f = random_function(25, rng);
        const std::vector<double> z(25, 0.0);
        const auto rep = generalized_holder_check(s, pts, f, z, YoungFunction::power(2.0));
        CHECK(rep.lhs == 0.0);
        CHECK(rep.ratio == 0.0);
    }
    SUBCASE("square pair reduces to Cauchy-Schwarz") {
        for (int t = 0; t < 50; ++t) {
            const auto f = random_function(25, rng, -1.0, 1.0);
            const auto g = random_function(25, rng, -1.0, 1.0);
            const auto rep = generalized_holder_check(s, pts, f, g, YoungFunction::power(2.0));
            CHECK(rep.ratio <= 2.0 + 1e-9);
        }
    }
    SUBCASE("log pair stays within the recorded constant") {
        const auto psi = YoungFunction::power_log(2.0, -2.0);  // r=2, eps=1
        for (int t = 0; t < 100; ++t) {
            const auto f = random_function(25, rng, -1.0, 1.0);
            const auto g = random_function(25, rng, -1.0, 1.0);
            const auto rep = generalized_holder_check(s, pts, f, g, psi);
            CHECK(rep.ratio <= 4.0);
        }
    }
    SUBCASE("custom psi without pairing errors") {
        const auto c = YoungFunction::custom_table({0.5, 1.0, 2.0}, {0.25, 1.0, 4.0});
        const auto f = random_function(25, rng);
        CHECK_THROWS_AS(generalized_holder_check(s, pts, f, f, c), input_error);
    }
}

// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fail. Tolerances and budgets are pinned in the criterion bodies.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ccp/dyadic.hpp"
#include "ccp/fields.hpp"
#include "ccp/operators.hpp"
#include "ccp/orlicz.hpp"
#include "ccp/poincare.hpp"
#include "ccp/space.hpp"
#include "ccp/weights.hpp"
#include "helpers.hpp"

using namespace ccp;
using namespace ccp::testing;

namespace {

int g_failures = 0;

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

void criterion(int number, const std::string& name, double budget_s,
               const std::function<void(Check&)>& body) {
    Check chk;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(chk);
    } catch (const std::exception& e) {
        chk.ok = false;
        chk.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    chk.require(secs <= budget_s,
                "runtime " + std::to_string(secs) + " s over budget " +
                    std::to_string(budget_s) + " s");
    std::printf("[%s] criterion %2d: %s (%.1f s)%s%s\n", chk.ok ? "PASS" : "FAIL", number,
                name.c_str(), secs, chk.ok ? "" : " -- ", chk.ok ? "" : chk.detail.c_str());
    std::fflush(stdout);
    if (!chk.ok) ++g_failures;
}

std::vector<double> polynomial_on(const RectGrid& grid, const std::vector<double>& coef2d) {
    // quadratic in up to 2 vars: c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto p = grid.point(i);
        const double x = p[0];
        const double y = p.size() > 1 ? p[1] : 0.0;
        f[i] = coef2d[0] + coef2d[1] * x + coef2d[2] * y + coef2d[3] * x * x +
               coef2d[4] * x * y + coef2d[5] * y * y;
    }
    return f;
}

double c2_over_tree_pairs(const DyadicTree& tree, const DiscreteSpace& s,
                          const PhiFunctional& phi, double eps) {
    struct Entry {
        Ball ball;
        std::vector<int> pts;
        double mass, phi_val;
    };
    std::vector<Entry> entries;
    for (std::size_t d = 0; d < tree.num_levels(); ++d)
        for (const Cube& q : tree.levels[d]) {
            const Ball b = tree.cube_ball(q);
            if (s.ball_count(b) <= 1 || !phi.defined(s, b)) continue;
            entries.push_back({b, s.ball_points(b), s.ball_measure(b), phi(s, b)});
        }
    const int m = phi.kernel().m();
    double c2 = 0.0;
    for (const auto& big : entries)
        for (const auto& small : entries) {
            if (small.ball.radius > big.ball.radius) continue;
            if (!std::includes(big.pts.begin(), big.pts.end(), small.pts.begin(),
                               small.pts.end()))
                continue;
            const double denom = std::pow(small.ball.radius / big.ball.radius, eps) *
                                 big.phi_val * std::pow(big.mass, m);
            if (denom > 0.0)
                c2 = std::max(c2, small.phi_val * std::pow(small.mass, m) / denom);
        }
    return c2;
}

}  // namespace

int main() {
    criterion(1, "dyadic properties on random and CC spaces", 30.0, [](Check& chk) {
        Rng rng(1001);
        int done = 0;
        for (int t = 0; t < 20; ++t) {
            DiscreteSpace s = [&]() {
                switch (t % 4) {
                    case 0: return random_euclidean_space(50 + 22 * t, 2, rng);
                    case 1: return random_euclidean_space(60 + 20 * t, 1, rng);
                    case 2: return snowflake_space(50 + 15 * t, 2, 0.7, rng);
                    default: return random_euclidean_space(40 + 23 * t, 3, rng, true);
                }
            }();
            const DyadicTree tree = build_dyadic(s);
            const auto rep = verify_properties(tree, s);
            chk.require(rep.all(), "space " + std::to_string(t) + ": " + rep.witness);
            chk.require(rep.measured_a0 > 0.0, "a0 not positive on space " + std::to_string(t));
            ++done;
        }
        chk.require(done == 20, "expected 20 random spaces");

        const GridSpace eu =
            cc_distance_matrix(FieldFamily::euclidean(2), RectGrid::box({0, 0}, {1, 1}, {9, 9}));
        const GridSpace gr = cc_distance_matrix(FieldFamily::grushin(),
                                                RectGrid::box({-1, -1}, {1, 1}, {9, 9}));
        const GridSpace he = cc_distance_matrix(
            FieldFamily::heisenberg(), RectGrid::box({-1, -1, -1}, {1, 1, 1}, {5, 5, 5}));
        for (const GridSpace* gs : {&eu, &gr, &he}) {
            const auto rep = verify_properties(build_dyadic(gs->space), gs->space);
            chk.require(rep.all() && rep.measured_a0 > 0.0, "CC space failed: " + rep.witness);
        }
    });

    criterion(2, "discretization inequality margins", 60.0, [](Check& chk) {
        Rng rng(1002);
        int trials = 0;
        struct Config {
            GridSpace gs;
            int m;
        };
        std::vector<Config> configs;
        configs.push_back({unit_grid_1d(48), 1});
        configs.push_back({unit_grid_1d(48), 2});
        configs.push_back({unit_grid_2d(7), 1});
        configs.push_back({unit_grid_2d(7), 2});
        for (auto& cfg : configs) {
            const DyadicTree tree = build_dyadic(cfg.gs.space);
            const PhiFunctional phi =
                PhiFunctional::for_tree(Kernel::cc_alpha(1.0, cfg.m), cfg.gs.space, tree);
            for (int t = 0; t < 13 && trials < 52; ++t, ++trials) {
                std::vector<std::vector<double>> fs(cfg.m);
                for (auto& f : fs) f = random_function(cfg.gs.space.size(), rng);
                const auto rep = discretize_bound_check(cfg.gs.space, tree, phi, fs);
                chk.require(rep.min_margin >= -1e-12,
                            "margin " + std::to_string(rep.min_margin) + " at point " +
                                std::to_string(rep.argmin));
            }
        }
        chk.require(trials >= 50, "expected at least 50 trials");
    });

    criterion(3, "stopping-time density and nesting", 30.0, [](Check& chk) {
        Rng rng(1003);
        for (const int n : {64, 100}) {
            const GridSpace gs = unit_grid_1d(n);
            const DyadicTree tree = build_dyadic(gs.space);
            for (int t = 0; t < 8; ++t) {
                auto f = random_function(gs.space.size(), rng, 0.01, 1.0);
                f[rng.index(gs.space.size())] += rng.uniform(5.0, 80.0);
                const double a = suggest_stopping_base(tree, gs.space, {f});
                const auto dec = stopping_decomposition(tree, gs.space, {f}, a);
                chk.require(!dec.empty, "unexpected empty decomposition");
                chk.require(dec.gamma > 0.0, "gamma not positive");
                // exact nesting of the S^k masks
                for (std::size_t li = 1; li < dec.levels.size(); ++li)
                    for (std::size_t x = 0; x < gs.space.size(); ++x)
                        if (dec.levels[li].in_sk[x] && !dec.levels[li - 1].in_sk[x])
                            chk.require(false, "S-level nesting violated");
            }
        }
        // 2d diet as well
        const GridSpace g2 = unit_grid_2d(8);
        const DyadicTree t2 = build_dyadic(g2.space);
        for (int t = 0; t < 4; ++t) {
            auto f = random_function(g2.space.size(), rng, 0.01, 1.0);
            f[rng.index(g2.space.size())] += 30.0;
            const double a = suggest_stopping_base(t2, g2.space, {f});
            const auto dec = stopping_decomposition(t2, g2.space, {f}, a);
            chk.require(dec.gamma > 0.0 && dec.two_sided_ok, "2d stopping failed");
        }
    });

    criterion(4, "packing lemma ratio", 30.0, [](Check& chk) {
        Rng rng(1004);
        const GridSpace gs = unit_grid_1d(64);
        const DyadicTree tree = build_dyadic(gs.space);
        const double eps = 1.0;  // = alpha for the cc kernel
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tree);
        const double c2 = c2_over_tree_pairs(tree, gs.space, phi, eps);
        chk.require(c2 > 0.0, "no admissible tree pairs for C2");
        for (int t = 0; t < 50; ++t) {
            const auto g = random_function(gs.space.size(), rng);
            const auto u = random_function(gs.space.size(), rng, 0.05, 1.0);
            const std::size_t depth = rng.index(tree.num_levels());
            const std::size_t idx = rng.index(tree.levels[depth].size());
            const auto rep =
                packing_sum_check(tree, gs.space, phi, g, u, depth, idx, c2, eps);
            if (rep.rhs > 0.0)
                chk.require(rep.ratio <= 1.0 + 1e-9,
                            "ratio " + std::to_string(rep.ratio) + " above 1");
        }
    });

    criterion(5, "orlicz power-case exactness", 20.0, [](Check& chk) {
        Rng rng(1005);
        const DiscreteSpace s = random_euclidean_space(40, 1, rng);
        int done = 0;
        for (int t = 0; t < 200; ++t) {
            const auto f = random_function(40, rng, -3.0, 3.0);
            const double r = rng.uniform(1.2, 4.0);
            const Ball b{static_cast<int>(rng.index(40)), rng.uniform(0.1, 1.2)};
            const auto pts = s.ball_points(b);
            if (pts.empty()) continue;
            double mass = 0.0, acc = 0.0;
            for (int p : pts) {
                mass += s.mu(p);
                acc += std::pow(std::abs(f[p]), r) * s.mu(p);
            }
            if (!(mass > 0.0)) continue;
            const double want = std::pow(acc / mass, 1.0 / r);
            const double got = orlicz_ball_norm(s, b, f, YoungFunction::power(r));
            chk.require(rel_err(got, want) < 1e-8,
                        "norm mismatch " + std::to_string(rel_err(got, want)));
            ++done;
        }
        chk.require(done >= 190, "not enough usable draws");

        const DiscreteSpace small = random_euclidean_space(25, 2, rng);
        const BallScanner scanner(small);
        const auto f = random_function(25, rng, -2.0, 2.0);
        const double r = 2.5;
        std::vector<double> fr(25);
        for (int i = 0; i < 25; ++i) fr[i] = std::pow(std::abs(f[i]), r);
        const auto mo = orlicz_maximal_all(scanner, f, YoungFunction::power(r));
        const auto mf = multilinear_maximal_all(scanner, {fr});
        for (int x = 0; x < 25; ++x)
            chk.require(rel_err(mo[x], std::pow(mf[x], 1.0 / r)) < 1e-8,
                        "maximal mismatch at point " + std::to_string(x));
    });

    criterion(6, "B_p verdict matrix", 10.0, [](Check& chk) {
        struct Case {
            std::function<TailReport()> run;
            TailVerdict want;
        };
        const double p = 2.0, eps = 1.0;
        const double pp = p / (p - 1.0);
        std::vector<Case> cases = {
            {[] { return bp_condition_check(YoungFunction::power(2.0), 3.0, 1.0); },
             TailVerdict::finite},
            {[] { return bp_condition_check(YoungFunction::power(2.0), 2.5, 1.0); },
             TailVerdict::finite},
            {[] { return bp_condition_check(YoungFunction::power(2.0), 2.0, 1.0); },
             TailVerdict::divergent},
            {[] { return bp_condition_check(YoungFunction::power(2.0), 1.5, 1.0); },
             TailVerdict::divergent},
            {[] { return bp_condition_check(YoungFunction::power(3.0), 4.0, 1.0); },
             TailVerdict::finite},
            {[] { return bp_condition_check(YoungFunction::power(3.0), 3.0, 1.0); },
             TailVerdict::divergent},
            {[] { return bp_condition_check(YoungFunction::power(1.5), 2.5, 1.0); },
             TailVerdict::finite},
            {[] { return bp_condition_check(YoungFunction::power_log(2.0, -1.5), 2.0, 1.0); },
             TailVerdict::finite},
            {[] { return bp_condition_check(YoungFunction::power_log(2.0, 1.0), 2.0, 1.0); },
             TailVerdict::divergent},
            {[] { return bp_condition_check(YoungFunction::power_log(2.0, -2.0), 2.0, 1.0); },
             TailVerdict::finite},
            // L log L presets of the corollary: Psi and Phi growth integrals
            {[=] {
                 return orlicz_growth_integral(YoungFunction::power_log(p, p - 1.0 + eps), p,
                                               pp - 1.0, 1.0);
             },
             TailVerdict::finite},
            {[=] {
                 return orlicz_growth_integral(YoungFunction::power_log(pp, pp - 1.0 + eps),
                                               pp, p - 1.0, 1.0);
             },
             TailVerdict::finite},
        };
        int idx = 0;
        for (const auto& c : cases) {
            const auto rep = c.run();
            chk.require(rep.verdict == c.want,
                        "case " + std::to_string(idx) + " got " +
                            std::string(to_string(rep.verdict)));
            ++idx;
        }
        chk.require(idx == 12, "matrix must have 12 cases");
    });

    criterion(7, "CC metric sanity", 120.0, [](Check& chk) {
        // grushin on a 41x41 grid
        {
            const RectGrid g = RectGrid::box({-1, -1}, {1, 1}, {41, 41});
            const GridSpace gs = cc_distance_matrix(FieldFamily::grushin(), g);
            for (const auto& [ia, ib] : std::vector<std::pair<int, int>>{
                     {5, 35}, {0, 40}, {10, 30}}) {
                const std::size_t a = g.flatten({ia, 20}), b = g.flatten({ib, 20});
                const double want = std::abs(g.point(a)[0] - g.point(b)[0]);
                const double got = gs.space.dist(a, b);
                chk.require(std::abs(got - want) / want <= 0.05,
                            "grushin horizontal distance off by " +
                                std::to_string(std::abs(got - want) / want));
            }
            const auto comp = comparability_check(gs, 2);
            chk.require(std::isfinite(comp.c1) && comp.c1 > 0.0 && std::isfinite(comp.c2),
                        "grushin comparability constants not finite");
        }
        // heisenberg on a 17^3 grid (41^3 capped at the 5000-node limit)
        {
            const RectGrid g = RectGrid::box({-1, -1, -1}, {1, 1, 1}, {17, 17, 17});
            const GridSpace gs = cc_distance_matrix(FieldFamily::heisenberg(), g);
            for (const auto& [ia, ib] :
                 std::vector<std::pair<int, int>>{{0, 16}, {4, 12}}) {
                const std::size_t a = g.flatten({ia, 8, 8}), b = g.flatten({ib, 8, 8});
                const double want = std::abs(g.point(a)[0] - g.point(b)[0]);
                const double got = gs.space.dist(a, b);
                chk.require(std::abs(got - want) / want <= 0.05,
                            "heisenberg horizontal distance off by " +
                                std::to_string(std::abs(got - want) / want));
            }
            const auto comp = comparability_check(gs, 2);
            chk.require(std::isfinite(comp.c1) && comp.c1 > 0.0 && std::isfinite(comp.c2),
                        "heisenberg comparability constants not finite");
        }
        // euclidean graph distance vs straight line, 2d
        {
            const RectGrid g = RectGrid::box({0, 0}, {1, 1}, {41, 41});
            const GridSpace gs = cc_distance_matrix(FieldFamily::euclidean(2), g);
            double worst = 0.0;
            for (std::size_t i = 0; i < gs.space.size(); i += 7)
                for (std::size_t j = i + 1; j < gs.space.size(); j += 3) {
                    const double e = gs.space.euclidean_dist(i, j);
                    if (e <= 0.0) continue;
                    worst = std::max(worst, gs.space.dist(i, j) / e);
                    chk.require(gs.space.dist(i, j) >= e - 1e-9, "graph shorter than euclid");
                }
            chk.require(worst <= 1.10, "euclidean graph detour " + std::to_string(worst));
            const auto comp = comparability_check(gs, 1);
            chk.require(comp.c1 >= 1.0 - 1e-9 && comp.c2 <= 1.10 + 1e-9,
                        "euclidean comparability out of band");
        }
    });

    criterion(8, "product metric factorization", 5.0, [](Check& chk) {
        Rng rng(1008);
        const DiscreteSpace a = random_euclidean_space(20, 1, rng);
        const DiscreteSpace b = random_euclidean_space(20, 2, rng);
        const DiscreteSpace prod = product_metric(a, b);
        for (double r : prod.radii_grid()) {
            if (!(r > 0.0) || r > prod.diameter() + 1.0) continue;
            for (std::size_t ca = 0; ca < a.size(); ++ca)
                for (std::size_t cb = 0; cb < b.size(); ++cb) {
                    const auto pts = prod.ball_points({static_cast<int>(ca * b.size() + cb), r});
                    std::size_t expect = 0;
                    for (std::size_t i = 0; i < a.size(); ++i)
                        for (std::size_t j = 0; j < b.size(); ++j)
                            if (a.dist(ca, i) < r && b.dist(cb, j) < r) ++expect;
                    if (pts.size() != expect) {
                        chk.require(false, "ball cardinality mismatch");
                        return;
                    }
                    for (int p : pts)
                        if (!(a.dist(ca, p / b.size()) < r && b.dist(cb, p % b.size()) < r)) {
                            chk.require(false, "membership is not the conjunction");
                            return;
                        }
                }
        }
    });

    criterion(9, "representation formula stability", 120.0, [](Check& chk) {
        Rng rng(1009);
        struct Config {
            const char* name;
            bool grushin;
            int m;
        };
        for (const Config cfg : std::initializer_list<Config>{
                 {"euclid-m1", false, 1},
                 {"euclid-m2", false, 2},
                 {"grushin-m1", true, 1},
                 {"grushin-m2", true, 2}}) {
            double cs[2];
            for (int pass = 0; pass < 2; ++pass) {
                const int n = pass == 0 ? 11 : 21;
                const RectGrid g = cfg.grushin
                                       ? RectGrid::box({-1, -1}, {1, 1}, {n, n})
                                       : RectGrid::box({0, 0}, {1, 1}, {n, n});
                const GridSpace gs = cfg.grushin
                                         ? cc_distance_matrix(FieldFamily::grushin(), g)
                                         : euclidean_grid_space(g);
                const FieldFamily field =
                    cfg.grushin ? FieldFamily::grushin() : FieldFamily::euclidean(2);
                const Ball ball{static_cast<int>(g.flatten({(n - 1) / 2, (n - 1) / 2})),
                                cfg.grushin ? 0.8 : 0.4};
                // fixed analytic functions across the two passes
                std::vector<std::vector<double>> fs;
                Rng local(4242);
                for (int k = 0; k < cfg.m; ++k) {
                    std::vector<double> coef(6);
                    for (auto& c : coef) c = local.uniform(-1.0, 1.0);
                    coef[0] += 1.5;  // keep factors away from zero
                    fs.push_back(polynomial_on(g, coef));
                }
                const auto rep = representation_check(gs, field, ball, fs);
                chk.require(!rep.violation, std::string(cfg.name) + ": violation candidate");
                cs[pass] = rep.C;
            }
            const double drift = std::abs(cs[1] - cs[0]) / cs[0];
            chk.require(drift <= 0.15,
                        std::string(cfg.name) + ": C drift " + std::to_string(drift));
        }
    });

    criterion(10, "poincare harness: pinned value and refinement stability", 180.0,
              [](Check& chk) {
        // pinned closed-form trial
        {
            const GridSpace gs = unit_grid_1d(129);
            WeightSystem ws;
            ws.u.assign(129, 1.0);
            ws.v = {std::vector<double>(129, 1.0)};
            ws.p = 2.0;
            ws.q = 2.0;
            ws.p_i = {2.0};
            std::vector<double> fx(129);
            for (int i = 0; i < 129; ++i) fx[i] = gs.space.point(i)[0];
            std::vector<std::vector<double>> pinned = {fx};
            const auto cond = check_power_condition(gs.space, nullptr, 1.0, ws,
                                                    ConditionVariant::theorem1_q_gt1);
            const auto rep = verify_theorem(gs, FieldFamily::euclidean(1), ws, {64, 0.5},
                                            TestFunctionFamily{}, 1, 7, &pinned, cond.sup);
            const double want = 1.0 / std::sqrt(12.0);
            chk.require(std::abs(rep.trials[0].ratio - want) / want <= 0.02,
                        "pinned ratio " + std::to_string(rep.trials[0].ratio));
        }
        // m = 2 grushin harness, 200 trials, one refinement
        {
            double maxr[2];
            for (int pass = 0; pass < 2; ++pass) {
                const int n = pass == 0 ? 17 : 33;
                const RectGrid g = RectGrid::box({-1, -1}, {1, 1}, {n, n});
                const GridSpace gs = cc_distance_matrix(FieldFamily::grushin(), g);
                WeightSystem ws;
                ws.u.assign(gs.space.size(), 1.0);
                ws.v.assign(2, std::vector<double>(gs.space.size(), 1.0));
                ws.p = 2.0;
                ws.q = 2.0;
                ws.p_i = {4.0, 4.0};
                const auto cond = check_power_condition(gs.space, nullptr, 1.0, ws,
                                                        ConditionVariant::theorem1_q_gt1);
                chk.require(std::isfinite(cond.sup), "weight condition not finite");
                const Ball ball{static_cast<int>(g.flatten({(n - 1) / 2, (n - 1) / 2})), 0.8};
                TestFunctionFamily fam;
                fam.degree = 2;
                const auto rep = verify_theorem(gs, FieldFamily::grushin(), ws, ball, fam, 200,
                                                99, nullptr, cond.sup);
                maxr[pass] = rep.max_ratio;
            }
            const double drift = std::abs(maxr[1] - maxr[0]) / maxr[0];
            chk.require(drift <= 0.20, "max ratio drift " + std::to_string(drift));
        }
    });

    criterion(11, "linear failure vs bilinear alternative", 30.0, [](Check& chk) {
        std::vector<double> eps;
        for (int k = 3; k <= 8; ++k) eps.push_back(std::pow(2.0, -k));
        for (double p : {0.5, 0.75, 0.9}) {
            const auto rep = linear_failure_demo(p, std::nullopt, eps);
            const double want = -(1.0 - p) / p;
            chk.require(std::abs(rep.slope - want) <= 0.15 * std::abs(want),
                        "slope " + std::to_string(rep.slope) + " for p " + std::to_string(p));
        }
        const auto alt =
            bilinear_alternative_check(2.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0, eps);
        chk.require(alt.max_ratio / alt.min_ratio < 3.0,
                    "bilinear spread " + std::to_string(alt.max_ratio / alt.min_ratio));
    });

    criterion(12, "cross-module oracles", 60.0, [](Check& chk) {
        Rng rng(1012);
        // potential routes agree to 1e-12 over 100 random inputs
        {
            const DiscreteSpace s1 = random_euclidean_space(18, 1, rng);
            const DiscreteSpace s2 = random_euclidean_space(12, 2, rng);
            for (int t = 0; t < 100; ++t) {
                const DiscreteSpace& s = t % 2 ? s1 : s2;
                const int m = t % 3 == 0 ? 1 : 2;
                const double alpha = rng.uniform(0.5, 2.0);
                std::vector<std::vector<double>> fs(m);
                for (auto& f : fs) f = random_function(s.size(), rng);
                const int x = static_cast<int>(rng.index(s.size()));
                const double a = eval_I_alpha(s, alpha, fs, x);
                const double b = eval_potential(s, Kernel::cc_alpha(alpha, m), fs, x);
                chk.require(rel_err(a, b) < 1e-12, "route mismatch " + std::to_string(rel_err(a, b)));
            }
        }
        // maximal operators vs brute force on N <= 20
        {
            const DiscreteSpace s = random_euclidean_space(16, 2, rng);
            const BallScanner scanner(s);
            const auto f1 = random_function(16, rng);
            const auto f2 = random_function(16, rng);
            auto brute = [&](const std::vector<std::vector<double>>& fs, int x) {
                double best = 0.0;
                for (std::size_t c = 0; c < s.size(); ++c)
                    for (double r : s.radii_grid(static_cast<int>(c))) {
                        if (!(r > 0.0) || s.dist(c, x) >= r) continue;
                        const auto pts = s.ball_points({static_cast<int>(c), r});
                        double mass = 0.0;
                        for (int p : pts) mass += s.mu(p);
                        if (!(mass > 0.0)) continue;
                        double v = 1.0;
                        for (const auto& f : fs) {
                            double acc = 0.0;
                            for (int p : pts) acc += std::abs(f[p]) * s.mu(p);
                            v *= acc / mass;
                        }
                        best = std::max(best, v);
                    }
                return best;
            };
            const auto joint = multilinear_maximal_all(scanner, {f1, f2});
            const auto m1 = multilinear_maximal_all(scanner, {f1});
            const auto m2 = multilinear_maximal_all(scanner, {f2});
            const DyadicTree tree = build_dyadic(s);
            const DyadicMaximal dm(tree, s, {f1, f2});
            for (int x = 0; x < 16; ++x) {
                chk.require(rel_err(joint[x], brute({f1, f2}, x)) < 1e-12, "M_mu brute mismatch");
                chk.require(rel_err(m1[x], brute({f1}, x)) < 1e-12, "M_mu m=1 brute mismatch");
                chk.require(joint[x] <= m1[x] * m2[x] + 1e-12, "product domination broken");
                chk.require(dm.at(x) <= joint[x] + 1e-12, "dyadic maximal above ball maximal");
                const double ms = m_s_maximal(scanner, f1, 2.0, x);
                std::vector<double> sq(16);
                for (int i = 0; i < 16; ++i) sq[i] = f1[i] * f1[i];
                chk.require(rel_err(ms, std::sqrt(brute({sq}, x))) < 1e-12, "M_s brute mismatch");
            }
        }
        // power vs orlicz checker agreement to 1e-8
        {
            const GridSpace gs = unit_grid_1d(20);
            const DyadicTree tree = build_dyadic(gs.space);
            const PhiFunctional phi =
                PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tree);
            const double r = 1.5;
            WeightSystem ws;
            ws.u.resize(20);
            ws.v = {std::vector<double>(20)};
            for (auto& x : ws.u) x = rng.uniform(0.5, 2.0);
            for (auto& x : ws.v[0]) x = rng.uniform(0.5, 2.0);
            ws.p = 2.0;
            ws.q = 2.0;
            ws.p_i = {2.0};
            ws.t = r;
            ws.Psi = YoungFunction::power(r * ws.q);
            ws.Phi = {YoungFunction::power(r * ws.p_prime(0))};
            const auto orl = check_orlicz_condition(gs.space, phi, ws);
            const auto pow = check_power_condition(gs.space, &phi, 1.0, ws,
                                                   ConditionVariant::general_q_gt1);
            chk.require(rel_err(orl.sup, pow.sup) < 1e-8,
                        "checker mismatch " + std::to_string(rel_err(orl.sup, pow.sup)));
        }
    });

    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}

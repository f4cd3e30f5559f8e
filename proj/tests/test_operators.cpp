#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ccp/operators.hpp"
#include "helpers.hpp"

using namespace ccp;
using namespace ccp::testing;

namespace {

// Reference triple-loop potential for tiny spaces, kept deliberately naive.
double naive_I_alpha_m2(const DiscreteSpace& s, double alpha, const std::vector<double>& f1,
                        const std::vector<double>& f2, int x) {
    double total = 0.0;
    for (std::size_t y1 = 0; y1 < s.size(); ++y1)
        for (std::size_t y2 = 0; y2 < s.size(); ++y2) {
            const double rho = s.dist(x, y1) + s.dist(x, y2);
            if (rho == 0.0) continue;
            const double mb = s.ball_measure({x, rho});
            const double k = std::pow(rho, alpha) / (mb * mb);
            if (!std::isfinite(k)) continue;
            total += f1[y1] * f2[y2] * s.mu(y1) * s.mu(y2) * k;
        }
    return total;
}

// Largest mainassump constant over all nested pairs drawn from the tree's
// B(Q) family plus same-center shrinkages; the honest "measured C2".
double measured_c2_tree(const DyadicTree& tree, const DiscreteSpace& s, const PhiFunctional& phi,
                        double eps) {
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
            const double lhs = small.phi_val * std::pow(small.mass, m);
            const double rhs = std::pow(small.ball.radius / big.ball.radius, eps) * big.phi_val *
                               std::pow(big.mass, m);
            if (rhs > 0.0) c2 = std::max(c2, lhs / rhs);
        }
    return c2;
}

}  // namespace

TEST_CASE("eval_I_alpha fundamentals") {
    SUBCASE("a zero slot kills the sum") {
        const GridSpace gs = unit_grid_1d(16);
        Rng rng(2);
        const auto f = random_function(16, rng);
        const std::vector<double> z(16, 0.0);
        CHECK(eval_I_alpha(gs.space, 1.0, {f, z}, 5) == 0.0);
    }
    SUBCASE("two point space by hand") {
        const auto s = DiscreteSpace::euclidean({{0.0}, {1.0}}, {0.5, 0.5});
        const std::vector<double> f = {0.0, 1.0};  // delta at b
        // I f(a) = f(b) * rho(a,b)^1 / mu(B(a,1)) * mu(b) = 1 * (1/0.5) * 0.5
        CHECK(eval_I_alpha(s, 1.0, {f}, 0) == doctest::Approx(1.0));
    }
    SUBCASE("m = 2 against the naive triple loop") {
        const auto s =
            DiscreteSpace::euclidean({{0.0}, {0.7}, {1.1}}, {0.4, 0.25, 0.35});
        Rng rng(4);
        for (int t = 0; t < 20; ++t) {
            const auto f1 = random_function(3, rng);
            const auto f2 = random_function(3, rng);
            for (int x = 0; x < 3; ++x)
                CHECK(eval_I_alpha(s, 1.0, {f1, f2}, x) ==
                      doctest::Approx(naive_I_alpha_m2(s, 1.0, f1, f2, x)).epsilon(1e-12));
        }
    }
    SUBCASE("term cap refuses huge sums") {
        const GridSpace gs = unit_grid_1d(200);
        Rng rng(5);
        std::vector<std::vector<double>> fs(4, random_function(200, rng));
        CHECK_THROWS_AS(eval_I_alpha(gs.space, 1.0, fs, 0), cap_error);
    }
}

TEST_CASE("eval_potential as the independent route") {
    Rng rng(12);
    const DiscreteSpace s = random_euclidean_space(14, 2, rng);

    SUBCASE("kernel identically 1 integrates f") {
        const Kernel one = Kernel::custom(
            1, [](const DiscreteSpace&, int, const std::vector<int>&) { return 1.0; });
        const auto f = random_function(14, rng);
        double want = 0.0;
        for (std::size_t i = 0; i < 14; ++i) want += f[i] * s.mu(i);
        CHECK(eval_potential(s, one, {f}, 3) == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("euclidean kernel with zero exponent also integrates f") {
        const Kernel k = Kernel::euclidean_alpha(1.0, 1, 1);  // alpha - nm = 0
        const auto one_d = DiscreteSpace::euclidean({{0.0}, {0.5}, {1.0}}, {0.3, 0.3, 0.4});
        const std::vector<double> f = {1.0, 2.0, 3.0};
        double want = 0.0;
        for (int i = 0; i < 3; ++i) want += f[i] * one_d.mu(i);
        CHECK(eval_potential(one_d, k, {f}, 1) == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("cc kernel agrees with eval_I_alpha across random inputs") {
        for (int t = 0; t < 25; ++t) {
            const auto f1 = random_function(14, rng);
            const auto f2 = random_function(14, rng);
            const int x = static_cast<int>(rng.index(14));
            const double alpha = rng.uniform(0.5, 2.0);
            const Kernel k = Kernel::cc_alpha(alpha, 2);
            CHECK(rel_err(eval_potential(s, k, {f1, f2}, x),
                          eval_I_alpha(s, alpha, {f1, f2}, x)) < 1e-12);
        }
    }
}

TEST_CASE("operator linearity and monotonicity") {
    Rng rng(13);
    const DiscreteSpace s = random_euclidean_space(12, 1, rng);
    const auto f1 = random_function(12, rng);
    const auto f2 = random_function(12, rng);
    SUBCASE("scaling one slot scales the output exactly") {
        const double lam = 3.75;
        auto f1s = f1;
        for (auto& v : f1s) v *= lam;
        for (int x = 0; x < 12; ++x)
            CHECK(eval_I_alpha(s, 1.0, {f1s, f2}, x) ==
                  doctest::Approx(lam * eval_I_alpha(s, 1.0, {f1, f2}, x)).epsilon(1e-13));
    }
    SUBCASE("pointwise domination passes through") {
        auto g1 = f1;
        auto g2 = f2;
        for (auto& v : g1) v += 0.3;
        for (auto& v : g2) v += 0.1;
        for (int x = 0; x < 12; ++x)
            CHECK(eval_I_alpha(s, 1.0, {f1, f2}, x) <=
                  eval_I_alpha(s, 1.0, {g1, g2}, x) + 1e-12);
    }
}

TEST_CASE("phi functional") {
    SUBCASE("two point hand computation") {
        const auto s = DiscreteSpace::euclidean({{0.0}, {1.0}}, {0.5, 0.5});
        const Ball whole{0, 1.0 + s.radius_bump()};
        const PhiFunctional phi =
            PhiFunctional::with_auto_c(Kernel::cc_alpha(1.0, 1), s, {whole}, 4.0);
        // admissible pairs are (a,b) and (b,a); K = 1 / mu(B(.,1)) = 2
        CHECK(phi(s, whole) == doctest::Approx(2.0));
    }
    SUBCASE("empty constraint set errors with guidance") {
        const auto s = DiscreteSpace::euclidean({{0.0}, {1.0}}, {0.5, 0.5});
        PhiFunctional phi(Kernel::cc_alpha(1.0, 1), 1.0, 4.0);
        // singleton ball: only the diagonal tuple exists
        CHECK_THROWS_AS(phi(s, Ball{0, 0.5}), input_error);
    }
    SUBCASE("euclidean kernel tracks r^(alpha - nm)") {
        Rng rng(17);
        const DiscreteSpace s = random_euclidean_space(40, 2, rng, true);
        const double alpha = 1.0;
        const Kernel k = Kernel::euclidean_alpha(alpha, 2, 1);
        std::vector<Ball> family;
        for (int t = 0; t < 50; ++t)
            family.push_back({static_cast<int>(rng.index(40)), rng.uniform(0.3, 1.2)});
        std::vector<Ball> usable;
        for (const auto& b : family)
            if (s.ball_count(b) > 1) usable.push_back(b);
        const PhiFunctional phi = PhiFunctional::with_auto_c(k, s, usable, 4.0);
        double lo = kInf, hi = 0.0;
        for (const auto& b : usable) {
            const double ratio = phi(s, b) / std::pow(b.radius, alpha - 2.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(std::isfinite(hi));
        CHECK(lo > 0.0);
        CHECK(hi / lo < 50.0);  // equivalence constants stay tame
    }
    SUBCASE("cc kernel tracks r^alpha / mu(B)^m over 50 balls") {
        Rng rng(19);
        const DiscreteSpace s = random_euclidean_space(40, 1, rng, true);
        const Kernel k = Kernel::cc_alpha(1.0, 1);
        std::vector<Ball> usable;
        for (int t = 0; t < 80 && usable.size() < 50; ++t) {
            Ball b{static_cast<int>(rng.index(40)), rng.uniform(0.2, 1.0)};
            if (s.ball_count(b) > 1) usable.push_back(b);
        }
        const PhiFunctional phi = PhiFunctional::with_auto_c(k, s, usable, 4.0);
        double lo = kInf, hi = 0.0;
        for (const auto& b : usable) {
            const double ratio =
                phi(s, b) * s.ball_measure(b) / std::pow(b.radius, 1.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(lo > 0.0);
        CHECK(std::isfinite(hi));
    }
    SUBCASE("coinciding point sets agree within the measured nesting constant") {
        Rng rng(23);
        const DiscreteSpace s = random_euclidean_space(25, 1, rng, true);
        std::vector<Ball> family;
        for (std::size_t c = 0; c < s.size(); ++c)
            for (double r : s.radii_grid(static_cast<int>(c)))
                if (r > 0.0 && s.ball_count({static_cast<int>(c), r}) > 1)
                    family.push_back({static_cast<int>(c), r});
        const PhiFunctional phi =
            PhiFunctional::with_auto_c(Kernel::cc_alpha(1.0, 1), s, family, 4.0);
        // measured (P2)-style constant: phi(B) <= C phi(B') over nested pairs
        double c_p2 = 0.0;
        std::vector<std::vector<int>> ptsets;
        for (const auto& b : family) ptsets.push_back(s.ball_points(b));
        for (std::size_t i = 0; i < family.size(); ++i)
            for (std::size_t j = 0; j < family.size(); ++j) {
                if (family[j].radius > family[i].radius) continue;
                if (!std::includes(ptsets[i].begin(), ptsets[i].end(), ptsets[j].begin(),
                                   ptsets[j].end()))
                    continue;
                c_p2 = std::max(c_p2, phi(s, family[i]) / phi(s, family[j]));
            }
        for (std::size_t i = 0; i < family.size(); ++i)
            for (std::size_t j = i + 1; j < family.size(); ++j)
                if (ptsets[i] == ptsets[j]) {
                    const double ratio = phi(s, family[i]) / phi(s, family[j]);
                    CHECK(ratio <= c_p2 * (1.0 + 1e-9));
                    CHECK(ratio >= 1.0 / c_p2 * (1.0 - 1e-9));
                }
    }
}

TEST_CASE("growth conditions") {
    Rng rng(29);
    const DiscreteSpace s = random_euclidean_space(30, 1, rng, true);
    SUBCASE("cc kernel has a finite growth constant") {
        const auto rep = growth_check(Kernel::cc_alpha(1.0, 2), s, 2.0, 4000, 7);
        CHECK(rep.samples > 0);
        CHECK(std::isfinite(rep.C));
        CHECK(rep.C >= 1.0);
    }
    SUBCASE("euclidean kernel has a finite growth constant") {
        const auto rep = growth_check(Kernel::euclidean_alpha(1.0, 1, 2), s, 2.0, 4000, 7);
        CHECK(std::isfinite(rep.C));
        CHECK(rep.C >= 1.0);
    }
    SUBCASE("discontinuous kernel is caught with a witness") {
        auto jump = [](const DiscreteSpace& sp, const std::vector<int>& xs,
                       const std::vector<int>& ys) {
            return sp.point(xs[0])[0] < sp.point(ys[0])[0] ? 1.0 : 100.0;
        };
        const Kernel k = Kernel::custom(
            1,
            [&](const DiscreteSpace& sp, int x, const std::vector<int>& ys) {
                return sp.point(x)[0] < sp.point(ys[0])[0] ? 1.0 : 100.0;
            },
            jump);
        const auto rep = growth_check(k, s, 2.0, 4000, 7);
        CHECK(rep.C >= 100.0);
        CHECK_FALSE(rep.witness_x.empty());
    }
    SUBCASE("custom kernel without an extension is unsupported") {
        const Kernel k = Kernel::custom(
            1, [](const DiscreteSpace&, int, const std::vector<int>&) { return 1.0; });
        CHECK_THROWS_AS(growth_check(k, s, 2.0), input_error);
    }
}

TEST_CASE("mainassump scan") {
    Rng rng(37);
    const DiscreteSpace s = random_euclidean_space(40, 1, rng, true);
    const DyadicTree tree = build_dyadic(s);
    SUBCASE("cc kernel at eps = alpha is uniformly bounded") {
        const PhiFunctional phi = PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), s, tree);
        const auto rep = mainassump_check(phi, s, 1.0, 2.0, 4000, 5);
        CHECK(rep.pairs > 0);
        CHECK(std::isfinite(rep.C2));
        CHECK(rep.C2 > 0.0);
    }
    SUBCASE("euclidean kernel at eps = alpha is uniformly bounded") {
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::euclidean_alpha(1.0, 1, 1), s, tree);
        const auto rep = mainassump_check(phi, s, 1.0, 2.0, 4000, 5);
        CHECK(std::isfinite(rep.C2));
    }
    SUBCASE("overshooting eps fails to stabilize under refinement") {
        // same construction on finer grids: C2 for eps = alpha stays put while
        // eps = alpha + 5 explodes as radius ratios shrink
        double c2_good[2], c2_bad[2];
        int idx = 0;
        for (int n : {32, 128}) {
            const GridSpace gs = unit_grid_1d(n);
            const DyadicTree tr = build_dyadic(gs.space);
            const PhiFunctional phi =
                PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tr);
            c2_good[idx] = mainassump_check(phi, gs.space, 1.0, 2.0, 6000, 5).C2;
            c2_bad[idx] = mainassump_check(phi, gs.space, 6.0, 2.0, 6000, 5).C2;
            ++idx;
        }
        CHECK(c2_good[1] < c2_good[0] * 8.0);
        CHECK(c2_bad[1] > c2_bad[0] * 16.0);
    }
}

TEST_CASE("maximal operators vs brute force") {
    Rng rng(41);
    const DiscreteSpace s = random_euclidean_space(10, 2, rng);
    const BallScanner scanner(s);
    const auto f1 = random_function(10, rng);
    const auto f2 = random_function(10, rng);

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

    SUBCASE("constants give the product of moduli") {
        const std::vector<double> c1(10, 2.0), c2(10, -3.0);
        for (int x = 0; x < 10; ++x)
            CHECK(multilinear_maximal(scanner, {c1, c2}, x) == doctest::Approx(6.0));
    }
    SUBCASE("bilinear maximal matches enumeration everywhere") {
        const auto all = multilinear_maximal_all(scanner, {f1, f2});
        for (int x = 0; x < 10; ++x) {
            CHECK(all[x] == doctest::Approx(brute({f1, f2}, x)).epsilon(1e-12));
            CHECK(multilinear_maximal(scanner, {f1, f2}, x) ==
                  doctest::Approx(all[x]).epsilon(1e-12));
        }
    }
    SUBCASE("product domination is exact") {
        const auto joint = multilinear_maximal_all(scanner, {f1, f2});
        const auto m1 = multilinear_maximal_all(scanner, {f1});
        const auto m2 = multilinear_maximal_all(scanner, {f2});
        for (int x = 0; x < 10; ++x) CHECK(joint[x] <= m1[x] * m2[x] + 1e-12);
    }
    SUBCASE("m_s specialization") {
        CHECK_THROWS_AS(m_s_maximal(scanner, f1, 0.5, 0), input_error);
        for (int x = 0; x < 10; ++x) {
            CHECK(m_s_maximal(scanner, f1, 1.0, x) ==
                  doctest::Approx(multilinear_maximal(scanner, {f1}, x)));
            // s = 2 against enumeration
            std::vector<double> sq(10);
            for (int i = 0; i < 10; ++i) sq[i] = f1[i] * f1[i];
            CHECK(m_s_maximal(scanner, f1, 2.0, x) ==
                  doctest::Approx(std::sqrt(brute({sq}, x))).epsilon(1e-12));
        }
        const std::vector<double> c(10, 4.2);
        CHECK(m_s_maximal(scanner, c, 3.0, 2) == doctest::Approx(4.2));
    }
}

TEST_CASE("dyadic maximal") {
    Rng rng(43);
    const DiscreteSpace s = random_euclidean_space(40, 1, rng);
    const DyadicTree tree = build_dyadic(s);
    const BallScanner scanner(s);
    const auto f1 = random_function(40, rng);
    const auto f2 = random_function(40, rng);
    const DyadicMaximal dm(tree, s, {f1, f2});

    SUBCASE("constants") {
        const std::vector<double> c1(40, 2.0), c2(40, 0.5);
        const DyadicMaximal dmc(tree, s, {c1, c2});
        for (int x = 0; x < 40; ++x) CHECK(dmc.at(x) == doctest::Approx(1.0));
    }
    SUBCASE("dominated by the ball maximal pointwise") {
        // every B(Q) containing x is itself an admissible ball
        const auto mm = multilinear_maximal_all(scanner, {f1, f2});
        for (int x = 0; x < 40; ++x) CHECK(dm.at(x) <= mm[x] + 1e-12);
    }
    SUBCASE("bottom-level average reduces to the point itself when B(Q) is a point") {
        // find a leaf whose ball contains just the leaf point, if any
        for (const Cube& q : tree.levels.back()) {
            const Ball b = tree.cube_ball(q);
            const auto pts = s.ball_points(b);
            if (pts.size() == 1) {
                const DyadicMaximal one(tree, s, {f1});
                CHECK(one.cube_average(tree.num_levels() - 1,
                                       static_cast<std::size_t>(&q - tree.levels.back().data())) ==
                      doctest::Approx(std::abs(f1[pts[0]])));
            }
        }
    }
}

TEST_CASE("discretization inequality") {
    Rng rng(47);
    SUBCASE("zero inputs give zero margin everywhere") {
        const GridSpace gs = unit_grid_1d(24);
        const DyadicTree tree = build_dyadic(gs.space);
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tree);
        const std::vector<double> z(24, 0.0);
        const auto rep = discretize_bound_check(gs.space, tree, phi, {z});
        CHECK(rep.min_margin == doctest::Approx(0.0));
    }
    SUBCASE("random nonnegative inputs keep the margin nonnegative, m = 2") {
        const GridSpace gs = unit_grid_1d(50);
        const DyadicTree tree = build_dyadic(gs.space);
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 2), gs.space, tree);
        for (int t = 0; t < 5; ++t) {
            const auto f1 = random_function(50, rng);
            const auto f2 = random_function(50, rng);
            const auto rep = discretize_bound_check(gs.space, tree, phi, {f1, f2});
            CHECK(rep.min_margin >= -1e-12);
            CHECK(rep.max_ratio <= 1.0 + 1e-12);
        }
    }
    SUBCASE("point masses stay finite and bounded") {
        const GridSpace gs = unit_grid_1d(32);
        const DyadicTree tree = build_dyadic(gs.space);
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 2), gs.space, tree);
        std::vector<double> d(32, 0.0);
        d[13] = 1.0;
        const auto rep = discretize_bound_check(gs.space, tree, phi, {d, d});
        CHECK(rep.min_margin >= -1e-12);
        for (double v : rep.rhs) CHECK(std::isfinite(v));
    }
    SUBCASE("negative inputs are rejected") {
        const GridSpace gs = unit_grid_1d(16);
        const DyadicTree tree = build_dyadic(gs.space);
        const PhiFunctional phi =
            PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tree);
        std::vector<double> f(16, 1.0);
        f[3] = -0.1;
        CHECK_THROWS_AS(discretize_bound_check(gs.space, tree, phi, {f}), input_error);
    }
}

TEST_CASE("stopping decomposition") {
    const GridSpace gs = unit_grid_1d(64);
    const DyadicTree tree = build_dyadic(gs.space, 4.0);

    SUBCASE("zero input is an empty, legal decomposition") {
        const std::vector<double> z(64, 0.0);
        const auto dec = stopping_decomposition(tree, gs.space, {z}, 16.0);
        CHECK(dec.empty);
        CHECK(dec.levels.empty());
    }
    SUBCASE("bump input: exact level-set nesting and disjoint stopping cubes") {
        std::vector<double> f(64, 0.0);
        for (int i = 0; i < 64; ++i)
            f[i] = std::exp(-sqr((i - 32) / 4.0)) * 1000.0 + 0.01;
        const auto dec = stopping_decomposition(tree, gs.space, {f}, 16.0);
        REQUIRE_FALSE(dec.empty);
        REQUIRE_FALSE(dec.levels.empty());

        // compare S^k against the pointwise dyadic maximal level sets
        const DyadicMaximal dm(tree, gs.space, {f});
        for (const auto& lvl : dec.levels) {
            const double thr = std::pow(dec.a, lvl.k);
            for (int x = 0; x < 64; ++x)
                CHECK(static_cast<bool>(lvl.in_sk[x]) == (dm.at(x) > thr));
        }
        // nesting S^{k+1} subset S^k
        for (std::size_t li = 1; li < dec.levels.size(); ++li)
            for (int x = 0; x < 64; ++x)
                if (dec.levels[li].in_sk[x]) CHECK(dec.levels[li - 1].in_sk[x]);
        // disjointness of stopping cubes per level
        for (const auto& lvl : dec.levels) {
            std::vector<int> hit(64, 0);
            for (const auto& sc : lvl.cubes)
                for (int p : tree.levels[sc.depth][sc.idx].members) hit[p]++;
            for (int x = 0; x < 64; ++x) CHECK(hit[x] <= 1);
        }
    }
    SUBCASE("default base keeps the density positive and the two-sided bound") {
        Rng rng(53);
        for (int t = 0; t < 5; ++t) {
            auto f = random_function(64, rng, 0.01, 1.0);
            f[rng.index(64)] += 50.0;
            const double a = suggest_stopping_base(tree, gs.space, {f});
            const auto dec = stopping_decomposition(tree, gs.space, {f}, a);
            CHECK(dec.gamma > 0.0);
            CHECK(dec.two_sided_ok);
            CHECK(dec.parent_step_constant <= a + 1e-9);
        }
    }
    SUBCASE("base must exceed 1") {
        const std::vector<double> f(64, 1.0);
        CHECK_THROWS_AS(stopping_decomposition(tree, gs.space, {f}, 1.0), input_error);
    }
}

TEST_CASE("packing lemma sums") {
    const GridSpace gs = unit_grid_1d(64);
    const DyadicTree tree = build_dyadic(gs.space, 4.0);
    const PhiFunctional phi = PhiFunctional::for_tree(Kernel::cc_alpha(1.0, 1), gs.space, tree);
    const double eps = 1.0;
    const double c2 = measured_c2_tree(tree, gs.space, phi, eps);
    REQUIRE(c2 > 0.0);

    SUBCASE("zero density zeroes both sides") {
        const std::vector<double> z(64, 0.0), u(64, 1.0);
        const auto rep = packing_sum_check(tree, gs.space, phi, z, u, 0, 0, c2, eps);
        CHECK(rep.lhs == 0.0);
        CHECK(rep.rhs == 0.0);
    }
    SUBCASE("bottom-level cube contributes a single term") {
        std::vector<double> g(64, 0.5), u(64, 1.0);
        const std::size_t depth = tree.num_levels() - 1;
        const auto rep = packing_sum_check(tree, gs.space, phi, g, u, depth, 2, c2, eps);
        CHECK(rep.terms == 1);
        if (rep.rhs > 0.0) CHECK(rep.ratio == doctest::Approx(1.0 / rep.C));
    }
    SUBCASE("random densities stay below the assembled bound") {
        Rng rng(59);
        for (int t = 0; t < 10; ++t) {
            const auto g = random_function(64, rng);
            const auto u = random_function(64, rng, 0.1, 1.0);
            const std::size_t depth = rng.index(tree.num_levels() - 1);
            const std::size_t idx = rng.index(tree.levels[depth].size());
            const auto rep = packing_sum_check(tree, gs.space, phi, g, u, depth, idx, c2, eps);
            if (rep.rhs > 0.0) CHECK(rep.ratio <= 1.0 + 1e-9);
        }
    }
}

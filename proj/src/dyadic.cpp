#include "ccp/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ccp {

namespace {

// Fixed-width bitsets over point indices for the pairwise cube checks.
struct Bits {
    std::vector<std::uint64_t> w;
    explicit Bits(std::size_t n) : w((n + 63) / 64, 0) {}
    void set(int i) { w[i >> 6] |= (1ull << (i & 63)); }
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }
    bool disjoint_from(const Bits& o) const {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] & o.w[i]) return false;
        return true;
    }
};

}  // namespace

Ball DyadicTree::cube_ball(const Cube& q) const {
    return Ball{q.center, 2.0 * kappa * a1 * std::pow(A, q.level)};
}

std::vector<std::pair<std::size_t, std::size_t>> DyadicTree::chain(int x) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(levels.size());
    for (std::size_t d = 0; d < levels.size(); ++d) out.emplace_back(d, point_cube_[d][x]);
    return out;
}

void DyadicTree::rebuild_point_index() {
    const std::size_t npts = levels.empty() ? 0 : levels[0][0].members.size();
    point_cube_.assign(levels.size(), std::vector<std::size_t>(npts, SIZE_MAX));
    for (std::size_t d = 0; d < levels.size(); ++d)
        for (std::size_t c = 0; c < levels[d].size(); ++c)
            for (int p : levels[d][c].members)
                if (point_cube_[d][p] == SIZE_MAX) point_cube_[d][p] = c;
}

double default_dyadic_base(const DiscreteSpace& space) {
    return std::max(4.0 * space.kappa(), 4.0);
}

DyadicTree build_dyadic(const DiscreteSpace& space, double A) {
    const double kappa = space.kappa();
    if (A <= 0.0) A = default_dyadic_base(space);
    if (!(A > 2.0 * kappa))
        throw input_error("build_dyadic: scale base A must exceed 2*kappa = " +
                          std::to_string(2.0 * kappa));
    const std::size_t n = space.size();
    const double diam = space.diameter();

    // Smallest k with A^k > diam; the whole space is one cube there.
    int k_max = 0;
    if (diam > 0.0) {
        k_max = static_cast<int>(std::floor(std::log(diam) / std::log(A))) + 1;
        while (std::pow(A, k_max) <= diam) ++k_max;
        while (k_max > 0 && std::pow(A, k_max - 1) > diam) --k_max;
    }

    // Heavier points become net centers first; ties by index.
    std::vector<int> mass_order(n);
    std::iota(mass_order.begin(), mass_order.end(), 0);
    std::stable_sort(mass_order.begin(), mass_order.end(),
                     [&](int a, int b) { return space.mu(a) > space.mu(b); });

    DyadicTree tree;
    tree.A = A;
    tree.kappa = kappa;
    tree.k_max = k_max;

    Cube top;
    top.level = k_max;
    top.center = mass_order[0];
    top.members.resize(n);
    std::iota(top.members.begin(), top.members.end(), 0);
    top.mass = space.total_measure();
    tree.levels.push_back({top});

    std::vector<int> net = {top.center};

    auto all_zero_diameter = [&](const std::vector<Cube>& cubes) {
        for (const Cube& q : cubes)
            for (std::size_t a = 0; a < q.members.size(); ++a)
                for (std::size_t b = a + 1; b < q.members.size(); ++b)
                    if (space.dist(q.members[a], q.members[b]) > 0.0) return false;
        return true;
    };

    while (!all_zero_diameter(tree.levels.back())) {
        const int k = k_max - static_cast<int>(tree.levels.size());
        const double sep = std::pow(A, k);

        // Nets nest: the previous level's centers seed this one (they are
        // A^{k+1} > A^k separated), then extend greedily.
        std::vector<bool> in_net(n, false);
        for (int c : net) in_net[c] = true;
        for (int p : mass_order) {
            if (in_net[p]) continue;
            bool ok = true;
            for (int c : net)
                if (space.dist(p, c) < sep) {
                    ok = false;
                    break;
                }
            if (ok) {
                net.push_back(p);
                in_net[p] = true;
            }
        }

        // Nearest-center assignment, ties to the lowest center index.
        std::vector<int> center_slot(n, -1);
        for (std::size_t s = 0; s < net.size(); ++s) center_slot[net[s]] = static_cast<int>(s);
        std::vector<int> assigned(n, -1);
        for (std::size_t p = 0; p < n; ++p) {
            double best = kInf;
            int bestc = -1;
            for (int c : net) {
                const double d = space.dist(p, c);
                if (d < best || (d == best && bestc >= 0 && c < bestc)) {
                    best = d;
                    bestc = c;
                }
            }
            assigned[p] = bestc;
        }

        const std::size_t prev_depth = tree.levels.size() - 1;
        // Locate each point's cube at the previous (currently finest) depth.
        std::vector<std::size_t> prev_of_point(n, SIZE_MAX);
        for (std::size_t c = 0; c < tree.levels[prev_depth].size(); ++c)
            for (int p : tree.levels[prev_depth][c].members) prev_of_point[p] = c;

        std::vector<Cube> cubes(net.size());
        for (std::size_t s = 0; s < net.size(); ++s) {
            cubes[s].level = k;
            cubes[s].center = net[s];
        }
        for (std::size_t p = 0; p < n; ++p)
            cubes[center_slot[assigned[p]]].members.push_back(static_cast<int>(p));
        for (Cube& q : cubes) {
            std::sort(q.members.begin(), q.members.end());
            q.mass = 0.0;
            for (int p : q.members) q.mass += space.mu(p);
            // Nesting is enforced by handing the whole cube to the cube
            // containing its center one level up.
            q.parent = static_cast<int>(prev_of_point[q.center]);
        }
        tree.levels.push_back(std::move(cubes));

        // Re-propagate memberships upward: every coarser cube is exactly the
        // union of its children.
        for (std::size_t d = tree.levels.size() - 1; d-- > 0;) {
            for (Cube& q : tree.levels[d]) {
                q.members.clear();
                q.mass = 0.0;
            }
            for (const Cube& child : tree.levels[d + 1]) {
                Cube& par = tree.levels[d][child.parent];
                par.members.insert(par.members.end(), child.members.begin(),
                                   child.members.end());
                par.mass += child.mass;
            }
            for (Cube& q : tree.levels[d]) std::sort(q.members.begin(), q.members.end());
        }

        if (tree.levels.size() > 200)
            throw std::runtime_error("build_dyadic: level limit exceeded");
    }

    // Measured constants. a1 is padded above both 1 and the worst diameter
    // ratio so every strict containment involving B(Q) has slack.
    double worst_diam_ratio = 0.0;
    double a0 = kInf;
    for (const auto& lvl : tree.levels)
        for (const Cube& q : lvl) {
            const double scale = std::pow(A, q.level);
            double diam_q = 0.0;
            for (std::size_t a = 0; a < q.members.size(); ++a)
                for (std::size_t b = a + 1; b < q.members.size(); ++b)
                    diam_q = std::max(diam_q, space.dist(q.members[a], q.members[b]));
            worst_diam_ratio = std::max(worst_diam_ratio, diam_q / scale);
            if (q.members.size() < n) {
                std::vector<bool> inq(n, false);
                for (int p : q.members) inq[p] = true;
                double nearest_out = kInf;
                for (std::size_t y = 0; y < n; ++y)
                    if (!inq[y]) nearest_out = std::min(nearest_out, space.dist(q.center, y));
                a0 = std::min(a0, nearest_out / scale);
            }
        }
    tree.a1 = std::max(worst_diam_ratio, 1.0) * (1.0 + 1e-9);
    tree.a0 = std::isfinite(a0) ? a0 : 1.0;

    tree.rebuild_point_index();
    return tree;
}

PropertyReport verify_properties(const DyadicTree& tree, const DiscreteSpace& space) {
    PropertyReport rep;
    const std::size_t n = space.size();
    std::ostringstream witness;

    auto fail = [&](bool& flag, const std::string& msg) {
        if (flag) {
            flag = false;
            if (witness.tellp() == 0) witness << msg;
        }
    };

    // (i) every level is a partition carrying all of the mass.
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        std::vector<int> seen(n, 0);
        for (const Cube& q : tree.levels[d])
            for (int p : q.members) seen[p]++;
        for (std::size_t p = 0; p < n; ++p) {
            if (seen[p] == 0 && space.mu(p) > 0.0)
                fail(rep.coverage, "level " + std::to_string(tree.level_of(d)) +
                                       ": point " + std::to_string(p) + " uncovered");
            if (seen[p] > 1)
                fail(rep.coverage, "level " + std::to_string(tree.level_of(d)) + ": point " +
                                       std::to_string(p) + " in several cubes");
        }
    }

    // Bitsets for the cross-level scans.
    std::vector<std::vector<Bits>> bits;
    bits.reserve(tree.num_levels());
    for (const auto& lvl : tree.levels) {
        std::vector<Bits> row;
        row.reserve(lvl.size());
        for (const Cube& q : lvl) {
            Bits b(n);
            for (int p : q.members) b.set(p);
            row.push_back(std::move(b));
        }
        bits.push_back(std::move(row));
    }

    // (ii)/(iii): for every finer cube and every coarser level, the cube must
    // be inside exactly one coarser cube and disjoint from the rest.
    for (std::size_t df = 1; df < tree.num_levels() && rep.disjoint_or_nested; ++df) {
        for (std::size_t ci = 0; ci < tree.levels[df].size(); ++ci) {
            const Cube& fine = tree.levels[df][ci];
            if (fine.members.empty()) continue;
            for (std::size_t dc = 0; dc < df; ++dc) {
                std::size_t ancestors = 0;
                for (std::size_t cj = 0; cj < tree.levels[dc].size(); ++cj) {
                    const bool sub = bits[df][ci].subset_of(bits[dc][cj]);
                    const bool dis = bits[df][ci].disjoint_from(bits[dc][cj]);
                    if (sub) ++ancestors;
                    if (!sub && !dis) {
                        fail(rep.disjoint_or_nested,
                             "cube level " + std::to_string(tree.level_of(df)) + " #" +
                                 std::to_string(ci) + " properly overlaps cube level " +
                                 std::to_string(tree.level_of(dc)) + " #" + std::to_string(cj));
                    }
                }
                if (ancestors != 1)
                    fail(rep.unique_ancestor,
                         "cube level " + std::to_string(tree.level_of(df)) + " #" +
                             std::to_string(ci) + " has " + std::to_string(ancestors) +
                             " ancestors at level " + std::to_string(tree.level_of(dc)));
                if (!rep.disjoint_or_nested) break;
            }
            if (!rep.disjoint_or_nested) break;
        }
    }

    // (iv) diameter bound and (v) inner ball, measured constants.
    rep.measured_a1 = 0.0;
    rep.measured_a0 = kInf;
    bool any_non_x = false;
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        for (std::size_t ci = 0; ci < tree.levels[d].size(); ++ci) {
            const Cube& q = tree.levels[d][ci];
            if (q.members.empty()) continue;
            const double scale = std::pow(tree.A, q.level);
            double diam_q = 0.0;
            for (std::size_t a = 0; a < q.members.size(); ++a)
                for (std::size_t b = a + 1; b < q.members.size(); ++b)
                    diam_q = std::max(diam_q, space.dist(q.members[a], q.members[b]));
            rep.measured_a1 = std::max(rep.measured_a1, diam_q / scale);
            if (diam_q > tree.a1 * scale)
                fail(rep.diameter_bound, "cube level " + std::to_string(q.level) + " #" +
                                             std::to_string(ci) + " diameter exceeds a1*A^k");

            if (!std::binary_search(q.members.begin(), q.members.end(), q.center)) {
                fail(rep.inner_ball, "cube level " + std::to_string(q.level) + " #" +
                                         std::to_string(ci) + " does not contain its center");
                continue;
            }
            if (q.members.size() == n) continue;  // X imposes no inner constraint
            any_non_x = true;
            std::vector<bool> inq(n, false);
            for (int p : q.members) inq[p] = true;
            double nearest_out = kInf;
            for (std::size_t y = 0; y < n; ++y)
                if (!inq[y]) nearest_out = std::min(nearest_out, space.dist(q.center, y));
            rep.measured_a0 = std::min(rep.measured_a0, nearest_out / scale);
        }
    }
    if (!any_non_x) rep.measured_a0 = 1.0;  // singleton space: any positive a0 works
    if (!(rep.measured_a0 > 0.0))
        fail(rep.inner_ball, "no positive inner-ball constant: some center touches its complement");
    // Spot-verify the ball containment the constant promises.
    if (rep.inner_ball && any_non_x) {
        for (std::size_t d = 0; d < tree.num_levels(); ++d)
            for (const Cube& q : tree.levels[d]) {
                if (q.members.size() == n || q.members.empty()) continue;
                const double r = rep.measured_a0 * std::pow(tree.A, q.level);
                for (int p : space.ball_points({q.center, r}))
                    if (!std::binary_search(q.members.begin(), q.members.end(), p))
                        fail(rep.inner_ball, "inner ball of cube level " +
                                                 std::to_string(q.level) + " leaks point " +
                                                 std::to_string(p));
            }
    }

    rep.witness = witness.str();
    return rep;
}

}  // namespace ccp

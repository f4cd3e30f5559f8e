#pragma once

#include <string>
#include <vector>

#include "ccp/space.hpp"

namespace ccp {

/// One dyadic cube: a subset of point indices at scale A^level with a
/// designated center (a net point of that level). Fields are open for the
/// fault-injection paths in the verifier tests.
struct Cube {
    int level = 0;
    int center = 0;               // point index of the net center
    std::vector<int> members;     // sorted point indices
    int parent = -1;              // index into the coarser level's cube list
    double mass = 0.0;            // cached sum of mu over members
};

/// Christ-type cube hierarchy on a DiscreteSpace. levels[0] is the single
/// top cube X at k_max; each following entry drops the level by one until
/// every cube is a singleton.
class DyadicTree {
public:
    double A = 0.0;
    double kappa = 1.0;
    int k_max = 0;  // levels[0] has level == k_max
    // a1: outer constant used in B(Q); at least the measured diameter ratio
    // and at least 1 (slightly padded so containment stays strict).
    double a1 = 1.0;
    double a0 = 0.0;  // largest feasible inner-ball constant, measured
    std::vector<std::vector<Cube>> levels;

    int level_of(std::size_t depth) const { return k_max - static_cast<int>(depth); }
    std::size_t depth_of(int level) const { return static_cast<std::size_t>(k_max - level); }
    std::size_t num_levels() const { return levels.size(); }
    const Cube& cube(std::size_t depth, std::size_t idx) const { return levels[depth][idx]; }

    /// Cube containing point x at the given depth.
    std::size_t cube_index_at(std::size_t depth, int x) const { return point_cube_[depth][x]; }

    /// B(Q) = B_rho(x_Q, 2 kappa a1 A^k).
    Ball cube_ball(const Cube& q) const;

    /// Chain of (depth, cube index) containing x, from top to leaf.
    std::vector<std::pair<std::size_t, std::size_t>> chain(int x) const;

    void rebuild_point_index();  // refresh lookup tables after a mutation

private:
    friend DyadicTree build_dyadic(const DiscreteSpace&, double);
    std::vector<std::vector<std::size_t>> point_cube_;  // [depth][point] -> cube idx
};

/// Greedy net construction: per level a maximal A^k-separated net (nets
/// nested across levels, heavier points first, ties by index), points
/// assigned to the nearest center, and cube parentage fixed by the level
/// above; coarser point sets are unions of their children, so coverage,
/// disjointness and nesting hold exactly. Requires A > 2 kappa.
DyadicTree build_dyadic(const DiscreteSpace& space, double A = 0.0);

/// Default scale base max(4 kappa, 4).
double default_dyadic_base(const DiscreteSpace& space);

struct PropertyReport {
    bool coverage = true;           // (i)  each level is a partition of X's mass
    bool disjoint_or_nested = true; // (ii) across levels l <= k
    bool unique_ancestor = true;    // (iii)
    bool diameter_bound = true;     // (iv) with the smallest feasible a1
    bool inner_ball = true;         // (v)  with the largest feasible a0 > 0
    double measured_a1 = 0.0;       // max diam(Q)/A^k
    double measured_a0 = kInf;      // min over non-X cubes of d(x_Q, X\Q)/A^k
    std::string witness;            // first failure, human-readable
    bool all() const {
        return coverage && disjoint_or_nested && unique_ancestor && diameter_bound && inner_ball;
    }
};

/// Exhaustive verification of properties (i)-(v) against the space itself
/// (bitset subset/disjointness over all cross-level cube pairs).
PropertyReport verify_properties(const DyadicTree& tree, const DiscreteSpace& space);

}  // namespace ccp

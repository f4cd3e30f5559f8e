#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccp/space.hpp"

namespace ccp {

/// Uniform rectangular lattice: origin + spacing per axis, row-major node
/// ordering (last axis fastest). The node set doubles as the point set of
/// grid-built spaces, in the same order.
struct RectGrid {
    std::vector<double> origin;
    std::vector<double> h;
    std::vector<int> shape;

    std::size_t dim() const { return shape.size(); }
    std::size_t size() const;
    double cell_volume() const;
    std::vector<int> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::vector<int>& mi) const;
    std::vector<double> point(std::size_t idx) const;
    bool on_boundary(std::size_t idx) const;
    std::vector<std::vector<double>> all_points() const;

    /// Same box, spacing halved (shape 2k+1 per axis where it was k+1).
    RectGrid refined() const;

    static RectGrid box(const std::vector<double>& lo, const std::vector<double>& hi,
                        const std::vector<int>& shape);
};

/// A named family of vector fields Y = {Y_1..Y_M} on R^n with a declared
/// commutator step. Evaluation is pure.
class FieldFamily {
public:
    static FieldFamily euclidean(int n);
    static FieldFamily grushin();    // n=2: Y1=(1,0), Y2=(0,x), step 2
    static FieldFamily heisenberg(); // n=3: Y1=(1,0,-y/2), Y2=(0,1,x/2), step 2
    /// Tabulated coefficients on a full tensor grid of sample points, looked
    /// up by multilinear interpolation.
    static FieldFamily custom(int n, int M, int step,
                              std::vector<std::vector<double>> sample_points,
                              std::vector<std::vector<std::vector<double>>> sample_vectors,
                              std::string name = "custom");
    /// Parse "euclidean:<n>" | "grushin" | "heisenberg".
    static FieldFamily by_id(const std::string& id);

    const std::string& name() const { return name_; }
    int ambient_dim() const { return n_; }
    int count() const { return m_; }
    int hormander_step() const { return step_; }

    /// M vectors of dimension n at x.
    std::vector<std::vector<double>> eval(const std::vector<double>& x) const;

private:
    std::string name_;
    int n_ = 0, m_ = 0, step_ = 1;
    std::function<std::vector<std::vector<double>>(const std::vector<double>&)> eval_;
};

struct SubellipticGradient {
    std::vector<double> components;  // Y_k f(x), k = 1..M
    bool one_sided = false;          // a boundary stencil was substituted
};

/// Y_k f = Y_k(x) . grad f(x), grad by central differences (one-sided and
/// flagged on the boundary).
SubellipticGradient subelliptic_gradient(const FieldFamily& field, const RectGrid& grid,
                                         const std::vector<double>& f, std::size_t node);

double gradient_norm(const FieldFamily& field, const RectGrid& grid,
                     const std::vector<double>& f, std::size_t node);

/// |Yf| at every node.
std::vector<double> gradient_norm_field(const FieldFamily& field, const RectGrid& grid,
                                        const std::vector<double>& f);

/// Discretized Carnot-Caratheodory structure: lattice graph whose edge costs
/// are minimal admissible-curve times, frozen at edge midpoints.
struct CCGraph {
    RectGrid grid;
    double spacing = 0.0;  // max axis spacing, for reporting
    // adjacency[i] = (neighbor, cost)
    std::vector<std::vector<std::pair<int, double>>> adjacency;
    std::size_t edges = 0;
};

CCGraph build_cc_graph(const FieldFamily& field, const RectGrid& grid);

/// A grid together with the DiscreteSpace built on its nodes (same order).
struct GridSpace {
    RectGrid grid;
    DiscreteSpace space;
};

/// Full CC distance matrix by per-source shortest paths on the lattice graph
/// with axis + face-diagonal edges; uniform measure h^n; kappa = 1 (genuine
/// shortest-path metric). Throws on disconnected graphs, naming a node.
GridSpace cc_distance_matrix(const FieldFamily& field, const RectGrid& grid,
                             std::size_t node_cap = DiscreteSpace::kDefaultNodeCap);

/// Euclidean-metric space on the same grid (reference construction).
GridSpace euclidean_grid_space(const RectGrid& grid);

struct ComparabilityReport {
    double c1 = kInf;  // largest constant with c1 |x-y| <= rho(x,y)
    double c2 = 0.0;   // smallest constant with rho(x,y) <= c2 |x-y|^(1/step)
    std::pair<int, int> c1_witness{-1, -1};
    std::pair<int, int> c2_witness{-1, -1};
};

/// Tightest constants in the two-sided comparison of rho with the Euclidean
/// metric (exponent 1/M0 on the upper side), over all point pairs.
ComparabilityReport comparability_check(const GridSpace& gs, int hormander_step);

/// Product space: concatenated coordinates, tensor measure, coordinatewise
/// max metric. Product balls factor exactly.
DiscreteSpace product_metric(const DiscreteSpace& a, const DiscreteSpace& b,
                             std::size_t node_cap = DiscreteSpace::kDefaultNodeCap);

}  // namespace ccp

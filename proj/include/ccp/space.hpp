#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccp/common.hpp"

namespace ccp {

/// Open ball B_rho(center, radius) = { y : rho(center, y) < radius }.
/// Membership is strict everywhere in this codebase; closed variants are not
/// exposed.
struct Ball {
    int center = 0;
    double radius = 0.0;
};

/// Finite stand-in for a space of homogeneous type (X, rho, mu): a point set
/// with per-point mass, a full pairwise quasi-metric matrix, and the
/// quasi-triangle constant kappa recorded alongside.
///
/// Immutable after construction; every member function is const and safe to
/// call concurrently.
class DiscreteSpace {
public:
    /// Node cap for eagerly stored N x N distance matrices.
    static constexpr std::size_t kDefaultNodeCap = 5000;

    /// Build from an explicit distance matrix (row-major N*N). kappa <= 0
    /// means "measure it from sampled triples".
    static DiscreteSpace from_matrix(std::vector<std::vector<double>> points,
                                     std::vector<double> measure,
                                     std::vector<double> dist_row_major,
                                     double kappa = 0.0);

    /// Build with the Euclidean metric on the given coordinates (kappa = 1).
    static DiscreteSpace euclidean(std::vector<std::vector<double>> points,
                                   std::vector<double> measure);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    double kappa() const { return kappa_; }
    double mu(std::size_t i) const { return measure_[i]; }
    double total_measure() const { return total_measure_; }
    double dist(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
    double diameter() const { return diameter_; }
    /// Smallest positive pairwise distance (kInf on a singleton).
    double min_positive_dist() const { return min_pos_dist_; }
    /// Half of the smallest gap between consecutive distinct distance values
    /// (values within value_tolerance() count as one: floating-point jitter
    /// on tied grid distances must not collapse the bump to an ulp).
    double radius_bump() const { return radius_bump_; }
    /// Distances closer than this are treated as equal by the enumeration.
    double value_tolerance() const { return value_tol_; }
    const std::vector<double>& point(std::size_t i) const { return points_[i]; }
    const std::vector<double>& measures() const { return measure_; }

    double euclidean_dist(std::size_t i, std::size_t j) const;

    /// Indices with rho(center, y) < radius, ascending.
    std::vector<int> ball_points(const Ball& b) const;
    /// Sum of mu over ball_points.
    double ball_measure(const Ball& b) const;
    /// Number of points with rho(center, y) < radius.
    std::size_t ball_count(const Ball& b) const;
    /// Diameter of the ball as a point set (0 for empty/singleton).
    double ball_set_diameter(const Ball& b) const;

    /// The finite radius set {rho(x_i, x_j)} cup {rho(x_i, x_j) + bump}:
    /// any open ball of the space equals a ball with one of these radii.
    const std::vector<double>& radii_grid() const { return radii_grid_; }
    /// Radii grid restricted to a single center (distances from that point).
    std::vector<double> radii_grid(int center) const;

    /// max over sampled triples of rho(x,y)/(rho(x,z)+rho(z,y)); the audit
    /// behind the recorded kappa when none is supplied analytically.
    double measure_kappa(std::size_t sample_triples = 200000, std::uint64_t seed = 17) const;

    void check_valid() const;  // throws input_error on a broken invariant

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<std::vector<double>> points_;
    std::vector<double> measure_;
    std::vector<double> dist_;  // row-major n_ x n_
    double kappa_ = 1.0;
    double total_measure_ = 0.0;
    double diameter_ = 0.0;
    double min_pos_dist_ = kInf;
    double radius_bump_ = 0.0;
    double value_tol_ = 0.0;
    std::vector<double> radii_grid_;

    void finalize(double kappa_or_zero);
};

struct DoublingReport {
    double L = 0.0;              // max mu(B(x,2r)) / mu(B(x,r)) over the sample
    int worst_center = -1;
    double worst_radius = 0.0;
    std::size_t skipped = 0;     // samples with an empty inner ball
    std::size_t checked = 0;
};

/// Doubling scan over given centers x radii. Empty inner balls are skipped
/// and counted, per the sampling contract.
DoublingReport doubling_constant(const DiscreteSpace& space,
                                 const std::vector<int>& centers,
                                 const std::vector<double>& radii);

/// Default sample: all centers, geometric radii between the smallest
/// positive distance and the diameter.
DoublingReport doubling_constant(const DiscreteSpace& space);

struct ReverseDoublingReport {
    double c = 0.0;      // largest constant valid on the sampled nested pairs
    double delta = 1.0;  // exponent used (supplied or fitted)
    bool fitted = false;
    // Worst pair: outer/inner balls attaining the minimum of
    // (mu(B1)/mu(B2)) / (r1/r2)^delta.
    Ball outer, inner;
    std::size_t pairs_checked = 0;
};

/// Scan nested ball pairs B2 subset B1 with radii <= eta * diam for the
/// reverse doubling constant. If delta is absent it is fitted by least
/// squares on log(mass ratio) vs log(radius ratio).
ReverseDoublingReport reverse_doubling_check(const DiscreteSpace& space, double eta,
                                             std::optional<double> delta = std::nullopt,
                                             std::size_t max_pairs = 20000,
                                             std::uint64_t seed = 23);

/// Per-center sorted distance orders with prefix sums: the workhorse for
/// sup-over-balls scans (maximal operators, weight conditions). Built on
/// demand by the operation that needs it; cheap for desk-scale N.
class BallScanner {
public:
    explicit BallScanner(const DiscreteSpace& space);

    const DiscreteSpace& space() const { return *space_; }
    /// Point indices sorted by distance from center (ties by index).
    const std::vector<int>& order(int center) const { return order_[center]; }
    /// prefix_mu(center)[t] = mu of the first t points in order(center).
    const std::vector<double>& prefix_mu(int center) const { return prefix_mu_[center]; }
    /// Cut positions t such that the first t points form an open ball
    /// (groups of tied distances enter together). Excludes t = 0.
    const std::vector<int>& cuts(int center) const { return cuts_[center]; }
    /// Rank of point x in center's order.
    int rank(int center, int x) const { return rank_[center][x]; }
    /// A radius realizing the first t points of order(center) as an open ball.
    double radius_for_cut(int center, int t) const;

    /// Prefix sums of |f|*mu along order(center).
    std::vector<double> prefix_abs(int center, const std::vector<double>& f) const;

private:
    const DiscreteSpace* space_;
    std::vector<std::vector<int>> order_;
    std::vector<std::vector<double>> prefix_mu_;
    std::vector<std::vector<int>> cuts_;
    std::vector<std::vector<int>> rank_;
};

}  // namespace ccp

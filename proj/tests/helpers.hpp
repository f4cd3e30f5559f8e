#pragma once

#include <cmath>
#include <vector>

#include "ccp/fields.hpp"
#include "ccp/space.hpp"

namespace ccp::testing {

inline GridSpace unit_grid_1d(int n) {
    return euclidean_grid_space(RectGrid::box({0.0}, {1.0}, {n}));
}

inline GridSpace unit_grid_2d(int n) {
    return euclidean_grid_space(RectGrid::box({0.0, 0.0}, {1.0, 1.0}, {n, n}));
}

/// Random points in the unit d-cube with random masses, Euclidean metric.
inline DiscreteSpace random_euclidean_space(std::size_t n, int d, Rng& rng,
                                            bool uniform_mass = false) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < d; ++a) pts[i][a] = rng.uniform(0.0, 1.0);
        mu[i] = uniform_mass ? 1.0 : rng.uniform(0.1, 2.0);
    }
    return DiscreteSpace::euclidean(std::move(pts), std::move(mu));
}

/// Snowflaked Euclidean metric d(x,y) = |x-y|^beta, beta in (0,1]: a genuine
/// metric, adds non-grid variety to the dyadic test diet.
inline DiscreteSpace snowflake_space(std::size_t n, int d, double beta, Rng& rng) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < d; ++a) pts[i][a] = rng.uniform(0.0, 1.0);
        mu[i] = rng.uniform(0.5, 1.5);
    }
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s2 = 0.0;
            for (int a = 0; a < d; ++a) s2 += sqr(pts[i][a] - pts[j][a]);
            const double v = std::pow(std::sqrt(s2), beta);
            dist[i * n + j] = dist[j * n + i] = v;
        }
    return DiscreteSpace::from_matrix(std::move(pts), std::move(mu), std::move(dist), 1.0);
}

inline std::vector<double> random_function(std::size_t n, Rng& rng, double lo = 0.0,
                                           double hi = 1.0) {
    std::vector<double> f(n);
    for (auto& v : f) v = rng.uniform(lo, hi);
    return f;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace ccp::testing

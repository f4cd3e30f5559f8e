#include "ccp/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ccp {

DiscreteSpace DiscreteSpace::from_matrix(std::vector<std::vector<double>> points,
                                         std::vector<double> measure,
                                         std::vector<double> dist_row_major,
                                         double kappa) {
    DiscreteSpace s;
    s.n_ = measure.size();
    s.points_ = std::move(points);
    s.measure_ = std::move(measure);
    s.dist_ = std::move(dist_row_major);
    if (s.points_.empty()) s.points_.assign(s.n_, {});
    s.dim_ = s.points_.empty() ? 0 : s.points_[0].size();
    if (s.n_ == 0) throw input_error("space: empty point set");
    if (s.n_ > kDefaultNodeCap)
        throw cap_error("space: " + std::to_string(s.n_) + " points exceeds node cap " +
                        std::to_string(kDefaultNodeCap));
    if (s.dist_.size() != s.n_ * s.n_)
        throw input_error("space: distance matrix size mismatch");
    if (s.points_.size() != s.n_)
        throw input_error("space: points/measure size mismatch");
    s.finalize(kappa);
    return s;
}

DiscreteSpace DiscreteSpace::euclidean(std::vector<std::vector<double>> points,
                                       std::vector<double> measure) {
    const std::size_t n = points.size();
    if (n == 0) throw input_error("space: empty point set");
    if (measure.size() != n) throw input_error("space: points/measure size mismatch");
    const std::size_t d = points[0].size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != d) throw input_error("space: ragged coordinates");
        for (std::size_t j = i + 1; j < n; ++j) {
            double s2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) s2 += sqr(points[i][k] - points[j][k]);
            const double v = std::sqrt(s2);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    return from_matrix(std::move(points), std::move(measure), std::move(dist), 1.0);
}

void DiscreteSpace::finalize(double kappa_or_zero) {
    total_measure_ = 0.0;
    for (double m : measure_) {
        if (!(m >= 0.0)) throw input_error("space: negative or NaN point mass");
        total_measure_ += m;
    }
    if (!(total_measure_ > 0.0)) throw input_error("space: total measure must be positive");

    diameter_ = 0.0;
    min_pos_dist_ = kInf;
    std::set<double> values;
    values.insert(0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        if (dist_[i * n_ + i] != 0.0) throw input_error("space: rho(x,x) != 0");
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = dist_[i * n_ + j];
            if (!(v >= 0.0)) throw input_error("space: negative or NaN distance");
            if (v != dist_[j * n_ + i]) throw input_error("space: asymmetric distance matrix");
            diameter_ = std::max(diameter_, v);
            if (v > 0.0) min_pos_dist_ = std::min(min_pos_dist_, v);
            values.insert(v);
        }
    }

    // Coalesce distance values closer than a relative tolerance before
    // measuring gaps: tied grid distances carry ~1 ulp of jitter from
    // different coordinate subtractions, and a bump of half an ulp would
    // vanish in the additions below. Each group contributes its smallest
    // value (a radius excluding the whole group) and its largest plus the
    // bump (a radius including it).
    value_tol_ = 1e-9 * std::max(1.0, diameter_);
    std::vector<std::pair<double, double>> groups;  // lo, hi
    for (double v : values) {
        if (groups.empty() || v - groups.back().second > value_tol_)
            groups.emplace_back(v, v);
        else
            groups.back().second = v;
    }
    double gap = kInf;
    for (std::size_t g = 1; g < groups.size(); ++g)
        gap = std::min(gap, groups[g].first - groups[g - 1].second);
    radius_bump_ = (groups.size() > 1 && std::isfinite(gap)) ? gap / 2.0 : 1.0;

    radii_grid_.clear();
    radii_grid_.reserve(2 * groups.size());
    for (const auto& [lo, hi] : groups) {
        radii_grid_.push_back(lo);
        radii_grid_.push_back(hi + radius_bump_);
    }
    std::sort(radii_grid_.begin(), radii_grid_.end());
    radii_grid_.erase(std::unique(radii_grid_.begin(), radii_grid_.end()), radii_grid_.end());

    kappa_ = (kappa_or_zero > 0.0) ? kappa_or_zero : std::max(1.0, measure_kappa());
}

double DiscreteSpace::euclidean_dist(std::size_t i, std::size_t j) const {
    double s2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) s2 += sqr(points_[i][k] - points_[j][k]);
    return std::sqrt(s2);
}

std::vector<int> DiscreteSpace::ball_points(const Ball& b) const {
    if (b.center < 0 || static_cast<std::size_t>(b.center) >= n_)
        throw input_error("ball: center index out of range");
    if (!(b.radius >= 0.0)) throw input_error("ball: negative radius");
    std::vector<int> out;
    const double* row = &dist_[static_cast<std::size_t>(b.center) * n_];
    for (std::size_t j = 0; j < n_; ++j)
        if (row[j] < b.radius) out.push_back(static_cast<int>(j));
    return out;
}

double DiscreteSpace::ball_measure(const Ball& b) const {
    if (b.center < 0 || static_cast<std::size_t>(b.center) >= n_)
        throw input_error("ball: center index out of range");
    if (!(b.radius >= 0.0)) throw input_error("ball: negative radius");
    double m = 0.0;
    const double* row = &dist_[static_cast<std::size_t>(b.center) * n_];
    for (std::size_t j = 0; j < n_; ++j)
        if (row[j] < b.radius) m += measure_[j];
    return m;
}

std::size_t DiscreteSpace::ball_count(const Ball& b) const {
    std::size_t c = 0;
    const double* row = &dist_[static_cast<std::size_t>(b.center) * n_];
    for (std::size_t j = 0; j < n_; ++j)
        if (row[j] < b.radius) ++c;
    return c;
}

double DiscreteSpace::ball_set_diameter(const Ball& b) const {
    const std::vector<int> pts = ball_points(b);
    double d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t c = a + 1; c < pts.size(); ++c)
            d = std::max(d, dist(pts[a], pts[c]));
    return d;
}

std::vector<double> DiscreteSpace::radii_grid(int center) const {
    std::set<double> values;
    const double* row = &dist_[static_cast<std::size_t>(center) * n_];
    for (std::size_t j = 0; j < n_; ++j) values.insert(row[j]);
    std::vector<std::pair<double, double>> groups;
    for (double v : values) {
        if (groups.empty() || v - groups.back().second > value_tol_)
            groups.emplace_back(v, v);
        else
            groups.back().second = v;
    }
    std::vector<double> out;
    out.reserve(2 * groups.size());
    for (const auto& [lo, hi] : groups) {
        out.push_back(lo);
        out.push_back(hi + radius_bump_);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double DiscreteSpace::measure_kappa(std::size_t sample_triples, std::uint64_t seed) const {
    if (n_ < 3) return 1.0;
    double worst = 1.0;
    const std::size_t total = n_ * n_ * n_;
    auto consider = [&](std::size_t i, std::size_t j, std::size_t k) {
        const double denom = dist(i, k) + dist(k, j);
        const double num = dist(i, j);
        if (denom > 0.0 && num / denom > worst) worst = num / denom;
    };
    if (total <= sample_triples) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = 0; k < n_; ++k) consider(i, j, k);
    } else {
        Rng rng(seed);
        for (std::size_t t = 0; t < sample_triples; ++t)
            consider(rng.index(n_), rng.index(n_), rng.index(n_));
    }
    return worst;
}

void DiscreteSpace::check_valid() const {
    // Construction already validates; re-run the checks for loaded data paths.
    DiscreteSpace copy = *this;
    copy.finalize(kappa_);
}

DoublingReport doubling_constant(const DiscreteSpace& space, const std::vector<int>& centers,
                                 const std::vector<double>& radii) {
    DoublingReport rep;
    for (int c : centers) {
        for (double r : radii) {
            if (!(r > 0.0)) throw input_error("doubling_constant: radii must be positive");
            const double inner = space.ball_measure({c, r});
            ++rep.checked;
            if (inner <= 0.0) {
                ++rep.skipped;
                continue;
            }
            const double outer = space.ball_measure({c, 2.0 * r});
            const double ratio = outer / inner;
            if (ratio > rep.L) {
                rep.L = ratio;
                rep.worst_center = c;
                rep.worst_radius = r;
            }
        }
    }
    return rep;
}

DoublingReport doubling_constant(const DiscreteSpace& space) {
    std::vector<int> centers(space.size());
    std::iota(centers.begin(), centers.end(), 0);
    std::vector<double> radii;
    const double lo = space.min_positive_dist();
    const double hi = space.diameter();
    if (!std::isfinite(lo) || hi <= 0.0) {
        // Singleton (or all-coincident) space: every ball ratio is 1.
        DoublingReport rep;
        rep.L = 1.0;
        rep.checked = 1;
        return rep;
    }
    for (double r = lo; r < hi; r *= 2.0) radii.push_back(r);
    return doubling_constant(space, centers, radii);
}

ReverseDoublingReport reverse_doubling_check(const DiscreteSpace& space, double eta,
                                             std::optional<double> delta, std::size_t max_pairs,
                                             std::uint64_t seed) {
    if (!(eta > 1.0)) throw input_error("reverse_doubling_check: eta must exceed 1");
    const double rmax = eta * space.diameter();

    // Candidate balls: every center with every admissible radius from the
    // finite enumeration, thinned to max_pairs samples of nested pairs.
    struct Cand {
        Ball ball;
        std::vector<int> pts;
        double mass;
    };
    std::vector<Cand> cands;
    for (std::size_t c = 0; c < space.size(); ++c) {
        for (double r : space.radii_grid(static_cast<int>(c))) {
            if (r <= 0.0 || r > rmax) continue;
            Cand cd;
            cd.ball = {static_cast<int>(c), r};
            cd.pts = space.ball_points(cd.ball);
            if (cd.pts.empty()) continue;
            cd.mass = space.ball_measure(cd.ball);
            cands.push_back(std::move(cd));
        }
    }

    auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };

    ReverseDoublingReport rep;
    rep.pairs_checked = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t total = cands.size() * cands.size();
    Rng rng(seed);
    auto push_if_nested = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        const Cand& outer = cands[a];
        const Cand& inner = cands[b];
        if (inner.ball.radius > outer.ball.radius) return;
        // Nestedness as ball containment: B2 subset B1 as point sets plus the
        // radius ordering used in the exponent.
        if (!contains(outer.pts, inner.pts)) return;
        pairs.emplace_back(a, b);
    };
    if (total <= max_pairs) {
        for (std::size_t a = 0; a < cands.size(); ++a)
            for (std::size_t b = 0; b < cands.size(); ++b) push_if_nested(a, b);
    } else {
        for (std::size_t t = 0; t < max_pairs; ++t)
            push_if_nested(rng.index(cands.size()), rng.index(cands.size()));
    }
    if (pairs.empty())
        throw input_error("reverse_doubling_check: no nested ball pairs in sample");

    double d = delta.value_or(0.0);
    if (!delta.has_value()) {
        // Least-squares slope of log(mass ratio) on log(radius ratio) over
        // pairs with a genuine radius gap.
        double sxx = 0.0, sxy = 0.0;
        for (auto [a, b] : pairs) {
            const double rr = cands[a].ball.radius / cands[b].ball.radius;
            if (rr <= 1.0) continue;
            const double x = std::log(rr);
            const double y = std::log(cands[a].mass / cands[b].mass);
            sxx += x * x;
            sxy += x * y;
        }
        d = (sxx > 0.0) ? std::max(1e-6, sxy / sxx) : 1.0;
        rep.fitted = true;
    }
    rep.delta = d;

    rep.c = kInf;
    for (auto [a, b] : pairs) {
        ++rep.pairs_checked;
        const double ratio = cands[a].mass / cands[b].mass;
        const double scale = std::pow(cands[a].ball.radius / cands[b].ball.radius, d);
        const double c_ab = ratio / scale;
        if (c_ab < rep.c) {
            rep.c = c_ab;
            rep.outer = cands[a].ball;
            rep.inner = cands[b].ball;
        }
    }
    return rep;
}

BallScanner::BallScanner(const DiscreteSpace& space) : space_(&space) {
    const std::size_t n = space.size();
    order_.resize(n);
    prefix_mu_.resize(n);
    cuts_.resize(n);
    rank_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        auto& ord = order_[c];
        ord.resize(n);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            const double da = space.dist(c, a), db = space.dist(c, b);
            if (da != db) return da < db;
            return a < b;
        });
        auto& pm = prefix_mu_[c];
        pm.assign(n + 1, 0.0);
        for (std::size_t t = 0; t < n; ++t) pm[t + 1] = pm[t] + space.mu(ord[t]);
        auto& cut = cuts_[c];
        for (std::size_t t = 1; t <= n; ++t) {
            // A prefix is an open ball iff the next point sits farther by more
            // than the tie tolerance (jittered ties travel together).
            if (t == n ||
                space.dist(c, ord[t]) > space.dist(c, ord[t - 1]) + space.value_tolerance())
                cut.push_back(static_cast<int>(t));
        }
        auto& rk = rank_[c];
        rk.resize(n);
        for (std::size_t t = 0; t < n; ++t) rk[ord[t]] = static_cast<int>(t);
    }
}

double BallScanner::radius_for_cut(int center, int t) const {
    const auto& ord = order_[center];
    return space_->dist(center, ord[t - 1]) + space_->radius_bump();
}

std::vector<double> BallScanner::prefix_abs(int center, const std::vector<double>& f) const {
    const auto& ord = order_[center];
    std::vector<double> out(ord.size() + 1, 0.0);
    for (std::size_t t = 0; t < ord.size(); ++t)
        out[t + 1] = out[t] + std::abs(f[ord[t]]) * space_->mu(ord[t]);
    return out;
}

}  // namespace ccp

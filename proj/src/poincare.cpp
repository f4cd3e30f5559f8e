#include "ccp/poincare.hpp"

#include <algorithm>
#include <cmath>

#include "ccp/operators.hpp"

namespace ccp {

namespace {

double inv(double x) { return 1.0 / x; }

[[noreturn]] void identity_error(const std::string& which) {
    throw input_error("exponents: inconsistent inputs violate " + which);
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)); }

}  // namespace

ExponentSet exponent_arithmetic(ExponentSet e) {
    if (e.m < 1) throw input_error("exponents: m must be >= 1");

    // 1/p = 1/r + 1/s
    if (e.r && e.s) {
        const double p = 1.0 / (inv(*e.r) + inv(*e.s));
        if (e.p && !close(*e.p, p)) identity_error("1/p = 1/r + 1/s");
        e.p = p;
    }
    if (!e.r_tilde && e.r) e.r_tilde = e.r;
    if (!e.s_tilde && e.s) e.s_tilde = e.s;
    if (e.r_tilde && e.s_tilde && e.p && !close(inv(*e.r_tilde) + inv(*e.s_tilde), inv(*e.p)))
        identity_error("1/p = 1/r~ + 1/s~");

    // 1/p = sum 1/p_i
    if (!e.p_i.empty()) {
        if (static_cast<int>(e.p_i.size()) != e.m)
            throw input_error("exponents: expected m = " + std::to_string(e.m) +
                              " values of p_i");
        double s = 0.0;
        for (double pi : e.p_i) {
            if (!(pi > 1.0)) identity_error("1 < p_i < inf");
            s += inv(pi);
        }
        if (e.p && !close(inv(*e.p), s)) identity_error("1/p = sum 1/p_i");
        e.p = 1.0 / s;
    } else if (e.m == 1 && e.p) {
        e.p_i = {*e.p};
        if (!(*e.p > 1.0)) identity_error("1 < p_1 < inf (m = 1 forces p_1 = p)");
    }

    if (!e.p) throw input_error("exponents: not enough inputs to determine p");
    if (!(*e.p > 1.0 / e.m)) identity_error("p > 1/m");

    // classical q = n p / (n - p); a supplied q may legitimately differ, so
    // the relation only fills gaps, never overrides.
    if (!e.q && e.n > 0 && *e.p < e.n) e.q = e.n * *e.p / (e.n - *e.p);
    if (!e.q) throw input_error("exponents: not enough inputs to determine q");
    if (!(*e.p <= *e.q)) identity_error("p <= q");
    for (double pi : e.p_i)
        if (!(pi > 1.0) || !std::isfinite(pi)) identity_error("1 < p_i < inf");
    return e;
}

namespace {

// (sum over ball of |g|^e mu)^{1/e}
double ball_lp(const DiscreteSpace& space, const std::vector<int>& pts,
               const std::vector<double>& g, double e) {
    double s = 0.0;
    for (int p : pts) s += std::pow(std::abs(g[p]), e) * space.mu(p);
    return std::pow(s, 1.0 / e);
}

double ball_average(const DiscreteSpace& space, const std::vector<int>& pts,
                    const std::vector<double>& g) {
    double s = 0.0, mass = 0.0;
    for (int p : pts) {
        s += g[p] * space.mu(p);
        mass += space.mu(p);
    }
    if (!(mass > 0.0)) throw input_error("ball average: zero-mass ball");
    return s / mass;
}

}  // namespace

HolderProductReport holder_product_bound(const GridSpace& gs, const FieldFamily& field,
                                         const Ball& ball, const std::vector<double>& f,
                                         const std::vector<double>& g, double p, double r,
                                         double s, double r_tilde, double s_tilde) {
    if (!close(inv(r) + inv(s), inv(p)) || !close(inv(r_tilde) + inv(s_tilde), inv(p)))
        throw input_error("holder_product_bound: exponents must satisfy 1/p = 1/r + 1/s = "
                          "1/r~ + 1/s~");
    const DiscreteSpace& space = gs.space;
    const std::vector<int> pts = space.ball_points(ball);
    if (pts.empty()) throw input_error("holder_product_bound: empty ball");

    std::vector<double> fg(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) fg[i] = f[i] * g[i];
    const std::vector<double> yfg = gradient_norm_field(field, gs.grid, fg);
    const std::vector<double> yf = gradient_norm_field(field, gs.grid, f);
    const std::vector<double> yg = gradient_norm_field(field, gs.grid, g);

    HolderProductReport rep;
    rep.lhs = ball_lp(space, pts, yfg, p);
    rep.term1 = ball_lp(space, pts, yf, r) * ball_lp(space, pts, g, s);
    rep.term2 = ball_lp(space, pts, f, r_tilde) * ball_lp(space, pts, yg, s_tilde);
    rep.rhs = rep.term1 + rep.term2;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    return rep;
}

RepresentationReport representation_check(const GridSpace& gs, const FieldFamily& field,
                                          const Ball& ball,
                                          const std::vector<std::vector<double>>& fs) {
    const DiscreteSpace& space = gs.space;
    const int m = static_cast<int>(fs.size());
    const std::vector<int> pts = space.ball_points(ball);
    if (pts.size() < 2) throw input_error("representation_check: ball too small");

    // Restrict (B, rho, mu) to its own space of homogeneous type.
    const std::size_t nb = pts.size();
    std::vector<std::vector<double>> sub_points(nb);
    std::vector<double> sub_mu(nb);
    std::vector<double> sub_dist(nb * nb);
    for (std::size_t a = 0; a < nb; ++a) {
        sub_points[a] = space.point(pts[a]);
        sub_mu[a] = space.mu(pts[a]);
        for (std::size_t b = 0; b < nb; ++b) sub_dist[a * nb + b] = space.dist(pts[a], pts[b]);
    }
    const DiscreteSpace sub = DiscreteSpace::from_matrix(std::move(sub_points), std::move(sub_mu),
                                                         std::move(sub_dist), space.kappa());

    // |f_i| and |Yf_k| on the subspace (gradients from the full grid stencil).
    std::vector<std::vector<double>> absf(m, std::vector<double>(nb));
    std::vector<std::vector<double>> gradf(m, std::vector<double>(nb));
    for (int k = 0; k < m; ++k) {
        const std::vector<double> yf = gradient_norm_field(field, gs.grid, fs[k]);
        for (std::size_t a = 0; a < nb; ++a) {
            absf[k][a] = std::abs(fs[k][pts[a]]);
            gradf[k][a] = yf[pts[a]];
        }
    }
    std::vector<double> fb(m);
    for (int k = 0; k < m; ++k) fb[k] = ball_average(space, pts, fs[k]);
    double prod_fb = 1.0;
    for (int k = 0; k < m; ++k) prod_fb *= fb[k];

    RepresentationReport rep;
    rep.ball_points = pts;
    rep.lhs.resize(nb);
    rep.rhs.resize(nb);
    std::vector<std::vector<double>> rhs_terms(m);
    for (int k = 0; k < m; ++k) {
        std::vector<std::vector<double>> args = absf;
        args[k] = gradf[k];
        rhs_terms[k] = eval_I_alpha_all(sub, 1.0, args);
    }
    for (std::size_t a = 0; a < nb; ++a) {
        double prod = 1.0;
        for (int k = 0; k < m; ++k) prod *= fs[k][pts[a]];
        rep.lhs[a] = std::abs(prod - prod_fb);
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += rhs_terms[k][a];
        rep.rhs[a] = s;
        if (rep.rhs[a] > 0.0) {
            rep.C = std::max(rep.C, rep.lhs[a] / rep.rhs[a]);
        } else if (rep.lhs[a] > 1e-12) {
            rep.violation = true;
            if (rep.violation_point < 0) rep.violation_point = pts[a];
            rep.C = kInf;
        }
    }
    return rep;
}

JerisonReport jerison_h1_check(const GridSpace& gs, const FieldFamily& field, const Ball& ball,
                               const std::vector<double>& f) {
    const DiscreteSpace& space = gs.space;
    const Ball doubled{ball.center, 2.0 * ball.radius};
    for (int p : space.ball_points(doubled))
        if (gs.grid.on_boundary(static_cast<std::size_t>(p)))
            throw input_error("jerison_h1_check: doubled ball exits the domain");

    const std::vector<int> pts = space.ball_points(ball);
    if (pts.empty()) throw input_error("jerison_h1_check: empty ball");
    const double favg = ball_average(space, pts, f);

    JerisonReport rep;
    rep.radius = ball.radius;
    for (int p : pts) rep.lhs += std::abs(f[p] - favg) * space.mu(p);
    const std::vector<double> yf = gradient_norm_field(field, gs.grid, f);
    for (int p : space.ball_points(doubled)) rep.rhs_integral += yf[p] * space.mu(p);
    rep.constant =
        rep.rhs_integral > 0.0 ? rep.lhs / (ball.radius * rep.rhs_integral) : (rep.lhs > 0.0 ? kInf : 0.0);
    return rep;
}

std::vector<double> TestFunctionFamily::sample(const RectGrid& grid, Rng& rng) const {
    const std::size_t n = grid.size();
    std::vector<double> f(n, 0.0);
    switch (kind) {
        case Kind::polynomial: {
            // random coefficients on monomials up to the given total degree
            const std::size_t d = grid.dim();
            std::vector<std::vector<int>> monos;
            std::vector<int> cur(d, 0);
            std::function<void(std::size_t, int)> gen = [&](std::size_t axis, int left) {
                if (axis == d) {
                    monos.push_back(cur);
                    return;
                }
                for (int e = 0; e <= left; ++e) {
                    cur[axis] = e;
                    gen(axis + 1, left - e);
                }
                cur[axis] = 0;
            };
            gen(0, degree);
            std::vector<double> coef(monos.size());
            for (auto& c : coef) c = rng.uniform(coeff_lo, coeff_hi);
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = grid.point(i);
                double v = 0.0;
                for (std::size_t j = 0; j < monos.size(); ++j) {
                    double term = coef[j];
                    for (std::size_t a = 0; a < d; ++a) term *= std::pow(x[a], monos[j][a]);
                    v += term;
                }
                f[i] = v;
            }
            break;
        }
        case Kind::bump: {
            const std::size_t d = grid.dim();
            std::vector<double> lo(d), hi(d);
            for (std::size_t a = 0; a < d; ++a) {
                lo[a] = grid.origin[a];
                hi[a] = grid.origin[a] + grid.h[a] * (grid.shape[a] - 1);
            }
            for (int b = 0; b < bump_count; ++b) {
                std::vector<double> c(d);
                double width = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    c[a] = rng.uniform(lo[a], hi[a]);
                    width += hi[a] - lo[a];
                }
                width = rng.uniform(0.05, 0.3) * width / d;
                const double amp = rng.uniform(coeff_lo, coeff_hi);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto x = grid.point(i);
                    double s2 = 0.0;
                    for (std::size_t a = 0; a < d; ++a) s2 += sqr(x[a] - c[a]);
                    f[i] += amp * std::exp(-s2 / (2.0 * width * width));
                }
            }
            break;
        }
        case Kind::ramp: {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = grid.point(i)[0];
                f[i] = x <= 0.0 ? 0.0 : (x >= ramp_eps ? 1.0 : x / ramp_eps);
            }
            break;
        }
    }
    return f;
}

PoincareReport verify_theorem(const GridSpace& gs, const FieldFamily& field,
                              const WeightSystem& ws, const Ball& ball,
                              const TestFunctionFamily& family, int trials, std::uint64_t seed,
                              const std::vector<std::vector<double>>* pinned,
                              std::optional<double> precheck_sup) {
    const DiscreteSpace& space = gs.space;
    ws.validate(space.size());
    const int m = ws.m();
    const std::vector<int> pts = space.ball_points(ball);
    if (pts.empty()) throw input_error("verify_theorem: empty ball");

    PoincareReport rep;
    rep.seed = seed;
    if (precheck_sup) {
        rep.condition_checked = true;
        rep.condition_sup = *precheck_sup;
    } else {
        rep.warning = "weight condition not pre-checked; exploratory run";
    }

    // Draw all trial functions up front (deterministic given the seed), then
    // evaluate trials in parallel.
    std::vector<std::vector<std::vector<double>>> draws;
    Rng rng(seed);
    if (pinned) {
        if (static_cast<int>(pinned->size()) != m)
            throw input_error("verify_theorem: pinned trial needs m functions");
        draws.push_back(*pinned);
    }
    while (static_cast<int>(draws.size()) < trials) {
        std::vector<std::vector<double>> fs(m);
        for (int k = 0; k < m; ++k) fs[k] = family.sample(gs.grid, rng);
        draws.push_back(std::move(fs));
    }

    rep.trials.resize(draws.size());
    parallel_for(draws.size(), [&](std::size_t tix) {
        const auto& fs = draws[tix];
        std::vector<std::vector<double>> yf(m);
        for (int k = 0; k < m; ++k) yf[k] = gradient_norm_field(field, gs.grid, fs[k]);

        double prod_fb = 1.0;
        for (int k = 0; k < m; ++k) prod_fb *= ball_average(space, pts, fs[k]);
        double lhs = 0.0;
        for (int p : pts) {
            double prod = 1.0;
            for (int k = 0; k < m; ++k) prod *= fs[k][p];
            lhs += std::pow(std::abs(prod - prod_fb) * ws.u[p], ws.q) * space.mu(p);
        }
        lhs = std::pow(lhs, 1.0 / ws.q);

        double rhs = 0.0;
        for (int k = 0; k < m; ++k) {
            std::vector<double> weighted(space.size());
            for (int p : pts) weighted[p] = yf[k][p] * ws.v[k][p];
            double term = ball_lp(space, pts, weighted, ws.p_i[k]);
            for (int i = 0; i < m; ++i) {
                if (i == k) continue;
                for (int p : pts) weighted[p] = fs[i][p] * ws.v[i][p];
                term *= ball_lp(space, pts, weighted, ws.p_i[i]);
            }
            rhs += term;
        }
        PoincareTrial& tr = rep.trials[tix];
        tr.lhs = lhs;
        tr.rhs = rhs;
        tr.ratio = rhs > 0.0 ? lhs / rhs : (lhs > 1e-14 ? kInf : 0.0);
    });

    std::vector<double> ratios;
    for (const auto& tr : rep.trials) {
        rep.max_ratio = std::max(rep.max_ratio, tr.ratio);
        ratios.push_back(tr.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    if (!ratios.empty()) {
        rep.q50 = ratios[ratios.size() / 2];
        rep.q90 = ratios[(ratios.size() * 9) / 10];
    }
    return rep;
}

namespace {

struct Ramp1D {
    std::vector<double> x, u;
    double h = 0.0;

    Ramp1D(int n, double eps) {
        if (n < 8) throw input_error("ramp: grid too small");
        h = 2.0 / (n - 1);
        if (eps < 2.0 * h)
            throw input_error("ramp: eps below grid resolution (eps=" + std::to_string(eps) +
                              ", h=" + std::to_string(h) + ")");
        x.resize(n);
        u.resize(n);
        for (int i = 0; i < n; ++i) {
            x[i] = -1.0 + i * h;
            u[i] = x[i] <= 0.0 ? 0.0 : (x[i] >= eps ? 1.0 : x[i] / eps);
        }
    }

    // forward-difference |u'|, last node one-sided copy
    std::vector<double> deriv() const {
        std::vector<double> d(x.size(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = std::abs(u[i + 1] - u[i]) / h;
        d[x.size() - 1] = d[x.size() - 2];
        return d;
    }
};

double lq_distance(const std::vector<double>& u, double a, double q, double h) {
    double s = 0.0;
    for (double v : u) s += std::pow(std::abs(v - a), q) * h;
    return std::pow(s, 1.0 / q);
}

// inf over the centering constant a: golden-section for q >= 1 (convex),
// dense grid scan otherwise.
double inf_center(const std::vector<double>& u, double q, double h) {
    double lo = *std::min_element(u.begin(), u.end());
    double hi = *std::max_element(u.begin(), u.end());
    if (lo == hi) return 0.0;
    if (q >= 1.0) {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = lq_distance(u, c, q, h), fd = lq_distance(u, d, q, h);
        for (int i = 0; i < 120; ++i) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = lq_distance(u, c, q, h);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = lq_distance(u, d, q, h);
            }
        }
        return lq_distance(u, 0.5 * (a + b), q, h);
    }
    double best = kInf;
    for (int i = 0; i <= 200; ++i)
        best = std::min(best, lq_distance(u, lo + (hi - lo) * i / 200.0, q, h));
    return best;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

FailureDemoReport linear_failure_demo(double p, std::optional<double> q,
                                      const std::vector<double>& eps_schedule, int grid_points) {
    if (!(p > 0.0 && p <= 1.0))
        throw input_error("linear_failure_demo: p must lie in (0, 1]");
    double qq;
    if (q) {
        qq = *q;
    } else if (p < 1.0) {
        qq = p / (1.0 - p);  // classical q with n = 1
    } else {
        qq = 2.0;
    }
    if (eps_schedule.empty()) throw input_error("linear_failure_demo: empty eps schedule");

    FailureDemoReport rep;
    rep.expected_slope = -(1.0 - p) / p;
    std::vector<double> log_eps, log_ratio;
    for (double eps : eps_schedule) {
        Ramp1D ramp(grid_points, eps);
        const double lhs = inf_center(ramp.u, qq, ramp.h);
        const auto du = ramp.deriv();
        double rp = 0.0;
        for (double v : du) rp += std::pow(v, p) * ramp.h;
        const double rhs = std::pow(rp, 1.0 / p);
        rep.eps.push_back(eps);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.ratio.push_back(lhs / rhs);
        log_eps.push_back(std::log(eps));
        log_ratio.push_back(std::log(lhs / rhs));
    }
    rep.slope = fit_slope(log_eps, log_ratio);
    return rep;
}

BilinearAltReport bilinear_alternative_check(double q, double r, double s, double r_tilde,
                                             double s_tilde,
                                             const std::vector<double>& eps_schedule,
                                             int grid_points) {
    BilinearAltReport rep;
    for (double eps : eps_schedule) {
        Ramp1D ramp(grid_points, eps);
        const std::size_t n = ramp.x.size();
        const double h = ramp.h;
        std::vector<double> fg(n);
        for (std::size_t i = 0; i < n; ++i) fg[i] = ramp.u[i] * ramp.u[i];
        double fbar = 0.0;
        for (double v : ramp.u) fbar += v * h;
        fbar /= 2.0;  // |(-1,1)| = 2
        double lhs = 0.0;
        for (double v : fg) lhs += std::pow(std::abs(v - fbar * fbar), q) * h;
        lhs = std::pow(lhs, 1.0 / q);

        const auto du = ramp.deriv();
        auto lp = [&](const std::vector<double>& g, double e) {
            double acc = 0.0;
            for (double v : g) acc += std::pow(std::abs(v), e) * h;
            return std::pow(acc, 1.0 / e);
        };
        const double rhs = lp(ramp.u, r) * lp(du, s) + lp(du, r_tilde) * lp(ramp.u, s_tilde);
        const double ratio = lhs / rhs;
        rep.eps.push_back(eps);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.ratio.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
    return rep;
}

HolderProductReport bilinear_poincare_trial(const GridSpace& gs, const FieldFamily& field,
                                            const Ball& ball, const std::vector<double>& f,
                                            const std::vector<double>& g, double q, double r,
                                            double s, double r_tilde, double s_tilde) {
    const DiscreteSpace& space = gs.space;
    const std::vector<int> pts = space.ball_points(ball);
    if (pts.empty()) throw input_error("bilinear trial: empty ball");

    const double fb = ball_average(space, pts, f);
    const double gb = ball_average(space, pts, g);
    double lhs = 0.0;
    for (int p : pts)
        lhs += std::pow(std::abs(f[p] * g[p] - fb * gb), q) * space.mu(p);
    lhs = std::pow(lhs, 1.0 / q);

    const std::vector<double> yf = gradient_norm_field(field, gs.grid, f);
    const std::vector<double> yg = gradient_norm_field(field, gs.grid, g);
    HolderProductReport rep;
    rep.lhs = lhs;
    rep.term1 = ball_lp(space, pts, f, r) * ball_lp(space, pts, yg, s);
    rep.term2 = ball_lp(space, pts, yf, r_tilde) * ball_lp(space, pts, g, s_tilde);
    rep.rhs = rep.term1 + rep.term2;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    return rep;
}

}  // namespace ccp

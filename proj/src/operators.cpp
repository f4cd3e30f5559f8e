#include "ccp/operators.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

namespace ccp {

namespace {

void require_m_functions(const std::vector<std::vector<double>>& fs, int m, std::size_t n,
                         const char* who) {
    if (static_cast<int>(fs.size()) != m)
        throw input_error(std::string(who) + ": expected " + std::to_string(m) +
                          " functions, got " + std::to_string(fs.size()));
    for (const auto& f : fs)
        if (f.size() != n) throw input_error(std::string(who) + ": grid function size mismatch");
}

void check_term_cap(std::size_t n, int m, const char* who) {
    const double terms = m * std::pow(static_cast<double>(n), m);
    if (terms > kPotentialTermCap)
        throw cap_error(std::string(who) + ": " + std::to_string(terms) +
                        " terms exceed the 1e8 cap; use a smaller space or lower m");
}

// Distances from x sorted ascending with mu prefix sums; mu(B(x,s)) lookups
// by binary search on the strict inequality.
struct LocalBallTable {
    std::vector<double> dist;
    std::vector<double> prefix_mu;

    LocalBallTable(const DiscreteSpace& space, int x) {
        const std::size_t n = space.size();
        std::vector<int> ord(n);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(),
                  [&](int a, int b) { return space.dist(x, a) < space.dist(x, b); });
        dist.resize(n);
        prefix_mu.assign(n + 1, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            dist[t] = space.dist(x, ord[t]);
            prefix_mu[t + 1] = prefix_mu[t] + space.mu(ord[t]);
        }
    }

    double mu_ball(double r) const {
        const auto it = std::lower_bound(dist.begin(), dist.end(), r);
        return prefix_mu[it - dist.begin()];
    }
};

// Distinct distance values from x per slot with aggregated f*mu weights;
// the multilinear sum only sees the scalar sum of slot distances.
struct SlotAggregate {
    std::vector<double> d;                   // distinct distances, ascending
    std::vector<std::vector<double>> w;      // [slot][j] aggregated weights
};

SlotAggregate aggregate_slots(const std::vector<double>& dists,
                              const std::vector<std::vector<double>>& fs,
                              const std::vector<double>& mu) {
    const std::size_t n = dists.size();
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return dists[a] < dists[b]; });
    SlotAggregate agg;
    agg.w.assign(fs.size(), {});
    for (std::size_t t = 0; t < n; ++t) {
        const int y = ord[t];
        if (agg.d.empty() || dists[y] > agg.d.back()) {
            agg.d.push_back(dists[y]);
            for (auto& wi : agg.w) wi.push_back(0.0);
        }
        for (std::size_t i = 0; i < fs.size(); ++i)
            agg.w[i].back() += fs[i][y] * mu[y];
    }
    return agg;
}

// sum over distinct-distance tuples of prod(weights) * g(sum of distances),
// skipping tuples where g is not finite.
double multilinear_sum(const SlotAggregate& agg, const std::function<double(double)>& g) {
    const std::size_t m = agg.w.size();
    const std::size_t d = agg.d.size();
    double total = 0.0;
    std::vector<std::size_t> pick(m, 0);
    std::vector<double> partial_w(m + 1, 1.0);
    std::vector<double> partial_s(m + 1, 0.0);
    std::size_t slot = 0;
    for (;;) {
        if (pick[slot] == d) {
            if (slot == 0) break;
            --slot;
            ++pick[slot];
            continue;
        }
        partial_w[slot + 1] = partial_w[slot] * agg.w[slot][pick[slot]];
        partial_s[slot + 1] = partial_s[slot] + agg.d[pick[slot]];
        if (partial_w[slot + 1] == 0.0) {  // zero slot weight kills the branch
            ++pick[slot];
            continue;
        }
        if (slot + 1 == m) {
            const double k = g(partial_s[m]);
            if (std::isfinite(k)) total += partial_w[m] * k;
            ++pick[slot];
        } else {
            ++slot;
            pick[slot] = 0;
        }
    }
    return total;
}

}  // namespace

Kernel Kernel::cc_alpha(double alpha, int m) {
    if (!(alpha > 0.0)) throw input_error("kernel: alpha must be positive");
    if (m < 1) throw input_error("kernel: m must be >= 1");
    Kernel k;
    k.kind_ = Kind::cc_alpha;
    k.alpha_ = alpha;
    k.m_ = m;
    return k;
}

Kernel Kernel::euclidean_alpha(double alpha, int n, int m) {
    if (m < 1 || n < 1) throw input_error("kernel: n, m must be >= 1");
    Kernel k;
    k.kind_ = Kind::euclidean_alpha;
    k.alpha_ = alpha;
    k.n_ = n;
    k.m_ = m;
    return k;
}

Kernel Kernel::custom(int m, PointFn fn, TildeFn tilde) {
    if (m < 1) throw input_error("kernel: m must be >= 1");
    Kernel k;
    k.kind_ = Kind::custom;
    k.m_ = m;
    k.fn_ = std::move(fn);
    k.tilde_ = std::move(tilde);
    return k;
}

double Kernel::value(const DiscreteSpace& space, int x, const std::vector<int>& ys) const {
    switch (kind_) {
        case Kind::cc_alpha: {
            double s = 0.0;
            for (int y : ys) s += space.dist(x, y);
            if (s == 0.0) return std::nan("");  // 0/0 diagonal, omitted by convention
            const double mb = space.ball_measure({x, s});
            return std::pow(s, alpha_) / std::pow(mb, m_);
        }
        case Kind::euclidean_alpha: {
            double s = 0.0;
            for (int y : ys) s += space.euclidean_dist(x, y);
            const double e = alpha_ - static_cast<double>(n_) * m_;
            if (s == 0.0) return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : kInf);
            return std::pow(s, e);
        }
        case Kind::custom:
            return fn_(space, x, ys);
    }
    return std::nan("");
}

bool Kernel::has_tilde() const { return kind_ != Kind::custom || static_cast<bool>(tilde_); }

double Kernel::tilde(const DiscreteSpace& space, const std::vector<int>& xs,
                     const std::vector<int>& ys) const {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += space.dist(xs[i], ys[i]);
    switch (kind_) {
        case Kind::cc_alpha: {
            if (s == 0.0) return std::nan("");
            double denom = 1.0;
            for (int xk : xs) denom *= space.ball_measure({xk, s});
            return std::pow(s, alpha_) / denom;
        }
        case Kind::euclidean_alpha: {
            double se = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) se += space.euclidean_dist(xs[i], ys[i]);
            const double e = alpha_ - static_cast<double>(n_) * m_;
            if (se == 0.0) return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : kInf);
            return std::pow(se, e);
        }
        case Kind::custom:
            if (!tilde_)
                throw input_error("kernel: custom kernel has no diagonal extension K~");
            return tilde_(space, xs, ys);
    }
    return std::nan("");
}

double eval_I_alpha(const DiscreteSpace& space, double alpha,
                    const std::vector<std::vector<double>>& fs, int x) {
    const std::size_t n = space.size();
    const int m = static_cast<int>(fs.size());
    require_m_functions(fs, m, n, "eval_I_alpha");
    if (!(alpha > 0.0)) throw input_error("eval_I_alpha: alpha must be positive");
    check_term_cap(n, m, "eval_I_alpha");

    std::vector<double> dists(n);
    for (std::size_t y = 0; y < n; ++y) dists[y] = space.dist(x, y);
    const SlotAggregate agg = aggregate_slots(dists, fs, space.measures());
    const LocalBallTable table(space, x);
    const auto g = [&](double s) -> double {
        if (s == 0.0) return std::nan("");
        return std::pow(s, alpha) / std::pow(table.mu_ball(s), m);
    };
    return multilinear_sum(agg, g);
}

std::vector<double> eval_I_alpha_all(const DiscreteSpace& space, double alpha,
                                     const std::vector<std::vector<double>>& fs) {
    std::vector<double> out(space.size());
    parallel_for(space.size(), [&](std::size_t x) {
        out[x] = eval_I_alpha(space, alpha, fs, static_cast<int>(x));
    });
    return out;
}

double eval_potential(const DiscreteSpace& space, const Kernel& kernel,
                      const std::vector<std::vector<double>>& fs, int x) {
    const std::size_t n = space.size();
    require_m_functions(fs, kernel.m(), n, "eval_potential");
    check_term_cap(n, kernel.m(), "eval_potential");
    const int m = kernel.m();

    // Plain odometer over X^m; the independent reference route.
    std::vector<int> ys(m, 0);
    double total = 0.0;
    for (;;) {
        const double k = kernel.value(space, x, ys);
        if (std::isfinite(k) && k != 0.0) {
            double w = 1.0;
            for (int i = 0; i < m; ++i) w *= fs[i][ys[i]] * space.mu(ys[i]);
            total += w * k;
        }
        int slot = m - 1;
        while (slot >= 0 && ++ys[slot] == static_cast<int>(n)) {
            ys[slot] = 0;
            --slot;
        }
        if (slot < 0) break;
    }
    return total;
}

std::vector<double> eval_potential_all(const DiscreteSpace& space, const Kernel& kernel,
                                       const std::vector<std::vector<double>>& fs) {
    std::vector<double> out(space.size());
    parallel_for(space.size(), [&](std::size_t x) {
        out[x] = eval_potential(space, kernel, fs, static_cast<int>(x));
    });
    return out;
}

PhiFunctional::PhiFunctional(Kernel kernel, double c, double eta)
    : kernel_(std::move(kernel)), c_(c), eta_(eta), cache_(std::make_shared<Cache>()) {
    if (!(c_ > 0.0)) throw input_error("phi: constant c must be positive");
    if (!(eta_ > 1.0)) throw input_error("phi: eta must exceed 1");
}

PhiFunctional PhiFunctional::with_auto_c(Kernel kernel, const DiscreteSpace& space,
                                         const std::vector<Ball>& family, double eta) {
    for (int j = 0; j <= 60; ++j) {
        const double c = std::pow(2.0, -j);
        PhiFunctional phi(kernel, c, eta);
        bool ok = true;
        for (const Ball& b : family) {
            if (space.ball_count(b) <= 1) continue;  // singletons never admit a tuple
            if (!phi.defined(space, b)) {
                ok = false;
                break;
            }
        }
        if (ok) return phi;
    }
    throw input_error("phi: no c in {2^-j} gives nonempty constraint sets for the family");
}

PhiFunctional PhiFunctional::for_tree(Kernel kernel, const DiscreteSpace& space,
                                      const DyadicTree& tree) {
    const double c = 1.0 / (2.0 * tree.kappa * tree.a1 * tree.A);
    double eta = 2.0;
    if (space.diameter() > 0.0) {
        const double top_radius = 2.0 * tree.kappa * tree.a1 * std::pow(tree.A, tree.k_max);
        eta = std::max(2.0, 1.01 * top_radius / space.diameter());
    }
    return PhiFunctional(std::move(kernel), c, eta);
}

bool PhiFunctional::defined(const DiscreteSpace& space, const Ball& b) const {
    const std::vector<int> pts = space.ball_points(b);
    if (pts.empty()) return false;
    // Slots maximize independently: the largest reachable rho(x, y_vec) is
    // m * max_{y in B} rho(x, y) for the best x.
    double best = 0.0;
    for (int x : pts) {
        double far = 0.0;
        for (int y : pts) far = std::max(far, space.dist(x, y));
        best = std::max(best, kernel_.m() * far);
    }
    return best >= c_ * b.radius;
}

double PhiFunctional::compute(const DiscreteSpace& space, const Ball& b) const {
    const std::vector<int> pts = space.ball_points(b);
    const int m = kernel_.m();
    const double threshold = c_ * b.radius;
    double sup = -kInf;
    bool any = false;

    if (kernel_.kind() == Kernel::Kind::custom) {
        std::vector<int> ys(m, 0);
        for (int x : pts) {
            std::vector<std::size_t> pick(m, 0);
            for (;;) {
                double s = 0.0;
                for (int i = 0; i < m; ++i) {
                    ys[i] = pts[pick[i]];
                    s += space.dist(x, ys[i]);
                }
                if (s >= threshold) {
                    const double k = kernel_.value(space, x, ys);
                    if (std::isfinite(k)) {
                        sup = std::max(sup, k);
                        any = true;
                    }
                }
                int slot = m - 1;
                while (slot >= 0 && ++pick[slot] == pts.size()) {
                    pick[slot] = 0;
                    --slot;
                }
                if (slot < 0) break;
            }
        }
    } else if (kernel_.kind() == Kernel::Kind::cc_alpha) {
        // K_alpha depends only on the aggregated slot distance; recurse over
        // distinct in-ball distances per evaluation point.
        for (int x : pts) {
            std::vector<double> dd;
            for (int y : pts) dd.push_back(space.dist(x, y));
            std::sort(dd.begin(), dd.end());
            dd.erase(std::unique(dd.begin(), dd.end()), dd.end());
            const LocalBallTable table(space, x);
            std::function<void(int, double)> rec = [&](int slot, double s) {
                if (slot == m) {
                    if (s < threshold || s == 0.0) return;
                    const double k =
                        std::pow(s, kernel_.alpha()) / std::pow(table.mu_ball(s), m);
                    if (std::isfinite(k)) {
                        sup = std::max(sup, k);
                        any = true;
                    }
                    return;
                }
                for (double d : dd) rec(slot + 1, s + d);
            };
            rec(0, 0.0);
        }
    } else {
        // euclidean_alpha: the constraint uses rho while the kernel uses
        // Euclidean distance, so enumerate tuples over the ball directly.
        for (int x : pts) {
            std::vector<std::size_t> pick(m, 0);
            std::vector<int> ys(m, 0);
            for (;;) {
                double s = 0.0;
                for (int i = 0; i < m; ++i) {
                    ys[i] = pts[pick[i]];
                    s += space.dist(x, ys[i]);
                }
                if (s >= threshold) {
                    const double k = kernel_.value(space, x, ys);
                    if (std::isfinite(k)) {
                        sup = std::max(sup, k);
                        any = true;
                    }
                }
                int slot = m - 1;
                while (slot >= 0 && ++pick[slot] == pts.size()) {
                    pick[slot] = 0;
                    --slot;
                }
                if (slot < 0) break;
            }
        }
    }
    if (!any)
        throw input_error("phi: empty constraint set for ball (center " +
                          std::to_string(b.center) + ", r " + std::to_string(b.radius) +
                          "); try a smaller c");
    return sup;
}

double PhiFunctional::operator()(const DiscreteSpace& space, const Ball& b) const {
    if (space.diameter() > 0.0 && b.radius > eta_ * space.diameter())
        throw input_error("phi: ball radius exceeds eta * diam");
    const std::pair<int, double> key{b.center, b.radius};
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->values.find(key);
        if (it != cache_->values.end()) return it->second;
    }
    const double v = compute(space, b);
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->values.emplace(key, v);
    return v;
}

GrowthReport growth_check(const Kernel& kernel, const DiscreteSpace& space, double c,
                          std::size_t sample_size, std::uint64_t seed) {
    if (!(c > 1.0)) throw input_error("growth_check: c must exceed 1");
    if (!kernel.has_tilde())
        throw input_error("growth_check: custom kernel without a diagonal extension");
    const int m = kernel.m();
    const std::size_t n = space.size();
    Rng rng(seed);
    auto rho_vec = [&](const std::vector<int>& as, const std::vector<int>& bs) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += space.dist(as[i], bs[i]);
        return s;
    };
    GrowthReport rep;
    std::vector<int> xs(m), ys(m), zs(m);
    for (std::size_t t = 0; t < sample_size; ++t) {
        for (int i = 0; i < m; ++i) {
            xs[i] = static_cast<int>(rng.index(n));
            ys[i] = static_cast<int>(rng.index(n));
            zs[i] = static_cast<int>(rng.index(n));
        }
        const double num = kernel.tilde(space, xs, ys);
        if (!std::isfinite(num) || num == 0.0) continue;
        const double rxy = rho_vec(xs, ys);
        ++rep.samples;
        if (rho_vec(zs, ys) <= c * rxy) {
            const double den = kernel.tilde(space, zs, ys);
            if (std::isfinite(den) && den > 0.0 && num / den > rep.C) {
                rep.C = num / den;
                rep.witness_x = xs;
                rep.witness_y = ys;
                rep.witness_z = zs;
                rep.witness_case = 1;
            }
        }
        if (rho_vec(ys, zs) <= c * rxy) {
            const double den = kernel.tilde(space, ys, zs);
            if (std::isfinite(den) && den > 0.0 && num / den > rep.C) {
                rep.C = num / den;
                rep.witness_x = xs;
                rep.witness_y = ys;
                rep.witness_z = zs;
                rep.witness_case = 2;
            }
        }
    }
    return rep;
}

MainAssumpReport mainassump_check(const PhiFunctional& phi, const DiscreteSpace& space,
                                  double eps, double C1, std::size_t max_pairs,
                                  std::uint64_t seed) {
    if (!(eps > 0.0)) throw input_error("mainassump_check: eps must be positive");
    if (!(C1 > 1.0)) throw input_error("mainassump_check: C1 must exceed 1");
    const double rmax = C1 * space.diameter();
    Rng rng(seed);

    struct Cand {
        Ball ball;
        std::vector<int> pts;
        double mass;
        double phi_val;
    };
    std::vector<Cand> cands;
    const std::size_t want = std::max<std::size_t>(40, max_pairs / 50);
    std::size_t attempts = 0;
    while (cands.size() < want && attempts < 40 * want) {
        ++attempts;
        const int c = static_cast<int>(rng.index(space.size()));
        const auto radii = space.radii_grid(c);
        double r = radii[rng.index(radii.size())];
        if (!(r > 0.0) || r >= rmax) continue;
        Ball b{c, r};
        if (space.ball_count(b) <= 1) continue;
        if (!phi.defined(space, b)) continue;
        Cand cd;
        cd.ball = b;
        cd.pts = space.ball_points(b);
        cd.mass = space.ball_measure(b);
        cd.phi_val = phi(space, b);
        cands.push_back(std::move(cd));
    }
    if (cands.size() < 2) throw input_error("mainassump_check: not enough admissible balls");

    MainAssumpReport rep;
    const int m = phi.kernel().m();
    for (std::size_t a = 0; a < cands.size(); ++a)
        for (std::size_t b = 0; b < cands.size(); ++b) {
            if (a == b) continue;
            const Cand& big = cands[a];
            const Cand& small = cands[b];
            if (small.ball.radius > big.ball.radius) continue;
            if (!std::includes(big.pts.begin(), big.pts.end(), small.pts.begin(),
                               small.pts.end()))
                continue;
            ++rep.pairs;
            const double lhs = small.phi_val * std::pow(small.mass, m);
            const double scale = std::pow(small.ball.radius / big.ball.radius, eps);
            const double rhs_unit = scale * big.phi_val * std::pow(big.mass, m);
            if (rhs_unit <= 0.0) continue;
            const double c2 = lhs / rhs_unit;
            if (c2 > rep.C2) {
                rep.C2 = c2;
                rep.outer = big.ball;
                rep.inner = small.ball;
                rep.ratio_at_witness = small.ball.radius / big.ball.radius;
            }
        }
    if (rep.pairs == 0) throw input_error("mainassump_check: no nested pairs in sample");
    return rep;
}

namespace {

// Per-center cut values v(t) = prod_i prefix_i[t]/mu[t], then the best value
// over cuts strictly past each rank (suffix maxima). Shared by the maximal
// operators.
std::vector<double> center_suffix_best(const BallScanner& sc, int center,
                                       const std::vector<std::vector<double>>& prefixes) {
    const auto& pm = sc.prefix_mu(center);
    const auto& cuts = sc.cuts(center);
    const std::size_t n = pm.size() - 1;
    std::vector<double> best_from(n + 1, -kInf);
    double running = -kInf;
    int ci = static_cast<int>(cuts.size()) - 1;
    for (int r = static_cast<int>(n); r >= 0; --r) {
        // cuts t with t >= r+1 become available as r decreases
        while (ci >= 0 && cuts[ci] >= r + 1) {
            const int t = cuts[ci];
            if (pm[t] > 0.0) {
                double v = 1.0;
                for (const auto& pf : prefixes) v *= pf[t] / pm[t];
                running = std::max(running, v);
            }
            --ci;
        }
        best_from[r] = running;
        if (r == 0) break;
    }
    return best_from;
}

}  // namespace

double multilinear_maximal(const BallScanner& scanner,
                           const std::vector<std::vector<double>>& fs, int x) {
    const DiscreteSpace& space = scanner.space();
    double best = -kInf;
    for (std::size_t c = 0; c < space.size(); ++c) {
        std::vector<std::vector<double>> prefixes;
        prefixes.reserve(fs.size());
        for (const auto& f : fs) prefixes.push_back(scanner.prefix_abs(static_cast<int>(c), f));
        const auto best_from = center_suffix_best(scanner, static_cast<int>(c), prefixes);
        best = std::max(best, best_from[scanner.rank(static_cast<int>(c), x)]);
    }
    return std::isfinite(best) ? best : 0.0;
}

std::vector<double> multilinear_maximal_all(const BallScanner& scanner,
                                            const std::vector<std::vector<double>>& fs) {
    const DiscreteSpace& space = scanner.space();
    const std::size_t n = space.size();
    std::vector<std::vector<double>> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        std::vector<std::vector<double>> prefixes;
        prefixes.reserve(fs.size());
        for (const auto& f : fs) prefixes.push_back(scanner.prefix_abs(static_cast<int>(c), f));
        per_center[c] = center_suffix_best(scanner, static_cast<int>(c), prefixes);
    });
    std::vector<double> out(n, -kInf);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t c = 0; c < n; ++c)
            out[x] = std::max(out[x], per_center[c][scanner.rank(static_cast<int>(c),
                                                                 static_cast<int>(x))]);
        if (!std::isfinite(out[x])) out[x] = 0.0;
    }
    return out;
}

double m_s_maximal(const BallScanner& scanner, const std::vector<double>& g, double s, int x) {
    if (!(s >= 1.0)) throw input_error("m_s_maximal: s must be >= 1");
    std::vector<double> gs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gs[i] = std::pow(std::abs(g[i]), s);
    return std::pow(multilinear_maximal(scanner, {gs}, x), 1.0 / s);
}

std::vector<double> m_s_maximal_all(const BallScanner& scanner, const std::vector<double>& g,
                                    double s) {
    if (!(s >= 1.0)) throw input_error("m_s_maximal: s must be >= 1");
    std::vector<double> gs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gs[i] = std::pow(std::abs(g[i]), s);
    auto out = multilinear_maximal_all(scanner, {gs});
    for (double& v : out) v = std::pow(v, 1.0 / s);
    return out;
}

std::vector<double> m_gamma_maximal_all(const BallScanner& scanner, const std::vector<double>& f,
                                        const std::function<double(const Ball&)>& gamma) {
    const DiscreteSpace& space = scanner.space();
    const std::size_t n = space.size();
    std::vector<std::vector<double>> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        const auto prefix = scanner.prefix_abs(static_cast<int>(c), f);
        const auto& cuts = scanner.cuts(static_cast<int>(c));
        const auto& ord = scanner.order(static_cast<int>(c));
        std::vector<double> best_from(n + 1, -kInf);
        double running = -kInf;
        int ci = static_cast<int>(cuts.size()) - 1;
        for (int r = static_cast<int>(n); r >= 0; --r) {
            while (ci >= 0 && cuts[ci] >= r + 1) {
                const int t = cuts[ci];
                // Two radius representatives realize the same point set; the
                // functional may distinguish them, so take both.
                const double d_last = space.dist(static_cast<int>(c), ord[t - 1]);
                for (double rad : {d_last + space.radius_bump(),
                                   (t < static_cast<int>(n))
                                       ? space.dist(static_cast<int>(c), ord[t])
                                       : d_last + space.radius_bump()}) {
                    if (!(rad > 0.0)) continue;
                    const double gv = gamma(Ball{static_cast<int>(c), rad});
                    if (std::isfinite(gv)) running = std::max(running, gv * prefix[t]);
                }
                --ci;
            }
            best_from[r] = running;
            if (r == 0) break;
        }
        per_center[c] = std::move(best_from);
    });
    std::vector<double> out(n, -kInf);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t c = 0; c < n; ++c)
            out[x] = std::max(out[x], per_center[c][scanner.rank(static_cast<int>(c),
                                                                 static_cast<int>(x))]);
        if (!std::isfinite(out[x])) out[x] = 0.0;
    }
    return out;
}

DyadicMaximal::DyadicMaximal(const DyadicTree& tree, const DiscreteSpace& space,
                             const std::vector<std::vector<double>>& fs)
    : tree_(&tree), npoints_(space.size()) {
    avg_.resize(tree.num_levels());
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        avg_[d].assign(tree.levels[d].size(), -kInf);
        for (std::size_t i = 0; i < tree.levels[d].size(); ++i) {
            const Ball bq = tree.cube_ball(tree.levels[d][i]);
            const std::vector<int> pts = space.ball_points(bq);
            const double mb = space.ball_measure(bq);
            if (!(mb > 0.0)) continue;
            double v = 1.0;
            for (const auto& f : fs) {
                double s = 0.0;
                for (int p : pts) s += std::abs(f[p]) * space.mu(p);
                v *= s / mb;
            }
            avg_[d][i] = v;
        }
    }
}

double DyadicMaximal::cube_average(std::size_t depth, std::size_t idx) const {
    return avg_[depth][idx];
}

double DyadicMaximal::at(int x) const {
    double best = -kInf;
    for (const auto& [d, i] : tree_->chain(x)) best = std::max(best, avg_[d][i]);
    return std::isfinite(best) ? best : 0.0;
}

std::vector<double> DyadicMaximal::all() const {
    std::vector<double> out(npoints_);
    for (std::size_t x = 0; x < npoints_; ++x) out[x] = at(static_cast<int>(x));
    return out;
}

DiscretizeReport discretize_bound_check(const DiscreteSpace& space, const DyadicTree& tree,
                                        const PhiFunctional& phi,
                                        const std::vector<std::vector<double>>& fs) {
    const int m = phi.kernel().m();
    require_m_functions(fs, m, space.size(), "discretize_bound_check");
    for (const auto& f : fs)
        for (double v : f)
            if (v < 0.0)
                throw input_error("discretize_bound_check: inputs must be nonnegative");

    // Left side: the potential itself (fast route for cc_alpha, reference
    // engine otherwise).
    DiscretizeReport rep;
    if (phi.kernel().kind() == Kernel::Kind::cc_alpha)
        rep.lhs = eval_I_alpha_all(space, phi.kernel().alpha(), fs);
    else
        rep.lhs = eval_potential_all(space, phi.kernel(), fs);

    // Right side: per-cube term phi(B(Q)) * prod_i int_{B(Q)} f_i, summed
    // over the chain of cubes containing each x. Cubes whose B(Q) admits no
    // tuple are skipped; the scale-matched cube of every pair survives by the
    // choice of c in PhiFunctional::for_tree.
    std::vector<std::vector<double>> term(tree.num_levels());
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        term[d].assign(tree.levels[d].size(), 0.0);
        for (std::size_t i = 0; i < tree.levels[d].size(); ++i) {
            const Ball bq = tree.cube_ball(tree.levels[d][i]);
            if (space.ball_count(bq) <= 1 || !phi.defined(space, bq)) continue;
            double t = phi(space, bq);
            for (const auto& f : fs) {
                double s = 0.0;
                for (int p : space.ball_points(bq)) s += f[p] * space.mu(p);
                t *= s;
            }
            term[d][i] = t;
        }
    }
    rep.rhs.assign(space.size(), 0.0);
    rep.margin.assign(space.size(), 0.0);
    for (std::size_t x = 0; x < space.size(); ++x) {
        double s = 0.0;
        for (const auto& [d, i] : tree.chain(static_cast<int>(x))) s += term[d][i];
        rep.rhs[x] = s;
        rep.margin[x] = s - rep.lhs[x];
        if (rep.margin[x] < rep.min_margin) {
            rep.min_margin = rep.margin[x];
            rep.argmin = static_cast<int>(x);
        }
        if (s > 0.0) rep.max_ratio = std::max(rep.max_ratio, rep.lhs[x] / s);
    }
    return rep;
}

namespace {

// prod_i avg_{B(Q)} f_i for every cube (no absolute values: stopping inputs
// are validated nonnegative).
std::vector<std::vector<double>> cube_averages(const DyadicTree& tree,
                                               const DiscreteSpace& space,
                                               const std::vector<std::vector<double>>& fs) {
    std::vector<std::vector<double>> avg(tree.num_levels());
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        avg[d].assign(tree.levels[d].size(), 0.0);
        for (std::size_t i = 0; i < tree.levels[d].size(); ++i) {
            const Ball bq = tree.cube_ball(tree.levels[d][i]);
            const double mb = space.ball_measure(bq);
            if (!(mb > 0.0)) continue;
            double v = 1.0;
            for (const auto& f : fs) {
                double s = 0.0;
                for (int p : space.ball_points(bq)) s += f[p] * space.mu(p);
                v *= s / mb;
            }
            avg[d][i] = v;
        }
    }
    return avg;
}

std::vector<std::vector<std::vector<std::size_t>>> build_children(const DyadicTree& tree) {
    std::vector<std::vector<std::vector<std::size_t>>> ch(tree.num_levels());
    for (std::size_t d = 0; d + 1 < tree.num_levels(); ++d) {
        ch[d].assign(tree.levels[d].size(), {});
        for (std::size_t j = 0; j < tree.levels[d + 1].size(); ++j)
            ch[d][tree.levels[d + 1][j].parent].push_back(j);
    }
    if (!tree.levels.empty()) ch[tree.num_levels() - 1].assign(tree.levels.back().size(), {});
    return ch;
}

}  // namespace

double suggest_stopping_base(const DyadicTree& tree, const DiscreteSpace& space,
                             const std::vector<std::vector<double>>& fs) {
    const auto avg = cube_averages(tree, space, fs);
    double c = 0.0;
    for (std::size_t d = 1; d < tree.num_levels(); ++d)
        for (std::size_t i = 0; i < tree.levels[d].size(); ++i) {
            const double parent = avg[d - 1][tree.levels[d][i].parent];
            if (parent > 0.0) c = std::max(c, avg[d][i] / parent);
        }
    return 2.0 * std::max(2.0, c);
}

StoppingDecomposition stopping_decomposition(const DyadicTree& tree, const DiscreteSpace& space,
                                             const std::vector<std::vector<double>>& fs, double a,
                                             const PhiFunctional* phi_for_ck1) {
    if (!(a > 1.0)) throw input_error("stopping_decomposition: base a must exceed 1");
    for (const auto& f : fs)
        for (double v : f)
            if (v < 0.0) throw input_error("stopping_decomposition: inputs must be nonnegative");

    StoppingDecomposition dec;
    dec.a = a;
    const auto avg = cube_averages(tree, space, fs);
    const auto children = build_children(tree);
    const std::size_t n = space.size();

    double max_avg = 0.0;
    for (const auto& lvl : avg)
        for (double v : lvl) max_avg = std::max(max_avg, v);
    const double top_avg = avg[0][0];
    if (!(top_avg > 0.0)) {
        dec.empty = true;
        dec.k1 = INT_MIN;
        return dec;
    }

    // a^{k1} < avg(X) <= a^{k1+1}
    int k1 = static_cast<int>(std::floor(std::log(top_avg) / std::log(a)));
    while (std::pow(a, k1) >= top_avg) --k1;
    while (std::pow(a, k1 + 1) < top_avg) ++k1;
    dec.k1 = k1;

    int k_top = k1;
    while (std::pow(a, k_top + 1) < max_avg) ++k_top;

    double gamma = 1.0;
    double parent_step = 0.0;

    // Build levels top threshold first so S^{k+1} masks exist before E_{k,j}.
    std::vector<StoppingLevel> levels;
    for (int k = k_top; k > k1; --k) {
        StoppingLevel lvl;
        lvl.k = k;
        lvl.in_sk.assign(n, 0);
        const double threshold = std::pow(a, k);
        // Maximal cubes by generation and inclusion: DFS stopping at the
        // first cube along each branch whose average exceeds the threshold.
        std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
        while (!stack.empty()) {
            auto [d, i] = stack.back();
            stack.pop_back();
            if (avg[d][i] > threshold) {
                StoppingCube sc;
                sc.depth = d;
                sc.idx = i;
                sc.average = avg[d][i];
                sc.q_mass = tree.levels[d][i].mass;
                for (int p : tree.levels[d][i].members) lvl.in_sk[p] = 1;
                lvl.cubes.push_back(sc);
            } else {
                for (std::size_t j : children[d][i]) stack.emplace_back(d + 1, j);
            }
        }
        levels.push_back(std::move(lvl));
    }
    std::reverse(levels.begin(), levels.end());  // ascending k

    for (std::size_t li = 0; li < levels.size(); ++li) {
        StoppingLevel& lvl = levels[li];
        const std::vector<char>* next_mask =
            (li + 1 < levels.size()) ? &levels[li + 1].in_sk : nullptr;
        for (StoppingCube& sc : lvl.cubes) {
            const Cube& q = tree.levels[sc.depth][sc.idx];
            double emass = 0.0;
            for (int p : q.members)
                if (!next_mask || !(*next_mask)[p]) emass += space.mu(p);
            sc.e_mass = emass;
            const bool is_x = q.members.size() == n;
            if (!is_x) {
                if (sc.q_mass > 0.0) gamma = std::min(gamma, sc.e_mass / sc.q_mass);
                parent_step = std::max(parent_step, sc.average / std::pow(a, lvl.k));
                if (sc.average > std::pow(a, lvl.k + 1)) dec.two_sided_ok = false;
            }
        }
    }
    dec.levels = std::move(levels);
    dec.gamma = gamma;
    dec.parent_step_constant = parent_step;

    if (phi_for_ck1) {
        const Cube& top = tree.levels[0][0];
        const Ball bx = tree.cube_ball(top);
        if (phi_for_ck1->defined(space, bx)) {
            double v = (*phi_for_ck1)(space, bx) *
                       std::pow(space.ball_measure(bx), static_cast<int>(fs.size()));
            v *= avg[0][0];
            v *= space.total_measure();
            dec.ck1_term = v;
        }
    }
    return dec;
}

PackingReport packing_sum_check(const DyadicTree& tree, const DiscreteSpace& space,
                                const PhiFunctional& phi, const std::vector<double>& g,
                                const std::vector<double>& u, std::size_t q0_depth,
                                std::size_t q0_idx, double C2, double eps, double C1) {
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] < 0.0 || u[i] < 0.0)
            throw input_error("packing_sum_check: g and u must be nonnegative");
    const int m = phi.kernel().m();
    const Ball b0 = tree.cube_ball(tree.levels[q0_depth][q0_idx]);
    if (C1 > 0.0 && b0.radius > C1 * space.diameter())
        throw input_error("packing_sum_check: r(B(Q0)) exceeds C1 * diam");

    const auto children = build_children(tree);
    auto gu_int = [&](const Cube& q) {
        double s = 0.0;
        for (int p : q.members) s += g[p] * u[p] * space.mu(p);
        return s;
    };
    auto term = [&](std::size_t d, std::size_t i) -> double {
        const Cube& q = tree.levels[d][i];
        const Ball bq = tree.cube_ball(q);
        if (space.ball_count(bq) <= 1 || !phi.defined(space, bq)) return 0.0;
        return phi(space, bq) * std::pow(space.ball_measure(bq), m) * gu_int(q);
    };

    PackingReport rep;
    std::vector<std::pair<std::size_t, std::size_t>> stack = {{q0_depth, q0_idx}};
    while (!stack.empty()) {
        auto [d, i] = stack.back();
        stack.pop_back();
        rep.lhs += term(d, i);
        ++rep.terms;
        if (d + 1 < tree.num_levels())
            for (std::size_t j : children[d][i]) stack.emplace_back(d + 1, j);
    }
    rep.C = C2 / (1.0 - std::pow(tree.A, -eps));
    rep.rhs = rep.C * term(q0_depth, q0_idx);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    return rep;
}

}  // namespace ccp

#include "ccp/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ccp {

namespace {

double find_root_increasing(const std::function<double(double)>& f, double lo, double hi) {
    // f increasing with f(lo) < 0 < f(hi); plain bisection on a log scale.
    for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-14; ++i) {
        const double mid = std::sqrt(lo * hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

double YoungFunction::raw(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::power:
            return std::pow(t, r_);
        case Kind::power_log: {
            if (knee_ > 0.0 && t < knee_) return slope_ * t;
            const double l = std::log1p(t);
            return std::exp(r_ * std::log(t) + delta_ * std::log(l));
        }
        case Kind::custom: {
            if (t <= ts_.front()) return ps_.front() * (t / ts_.front());
            if (t >= ts_.back()) {
                // power-law tail from the last segment's log-log slope
                const std::size_t k = ts_.size() - 1;
                const double slope = std::log(ps_[k] / ps_[k - 1]) / std::log(ts_[k] / ts_[k - 1]);
                return ps_[k] * std::pow(t / ts_[k], slope);
            }
            const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
            const std::size_t k = it - ts_.begin();
            const double w = (t - ts_[k - 1]) / (ts_[k] - ts_[k - 1]);
            return ps_[k - 1] + w * (ps_[k] - ps_[k - 1]);
        }
    }
    return 0.0;
}

void YoungFunction::normalize() {
    double hi = 1.0;
    while (raw(hi) < 1.0) hi *= 2.0;
    double lo = hi;
    while (raw(lo) > 1.0) lo /= 2.0;
    scale_ = (raw(lo) == 1.0)
                 ? lo
                 : find_root_increasing([&](double t) { return raw(t) - 1.0; }, lo, hi);
}

void YoungFunction::validate() const {
    // Sampled grid audit of the Young properties.
    double prev = 0.0, prev_slope = -kInf, prev_t = 0.0;
    for (double t = 1e-6; t < 1e9; t *= 1.9) {
        const double v = (*this)(t);
        if (!(v >= prev))
            throw input_error("young: function not increasing near t=" + std::to_string(t));
        const double slope = (v - prev) / (t - prev_t);
        if (slope < prev_slope * (1.0 - 1e-9) - 1e-12)
            throw input_error("young: function not convex near t=" + std::to_string(t));
        prev = v;
        prev_slope = slope;
        prev_t = t;
    }
    if (!((*this)(1e9) > 1.0)) throw input_error("young: function does not grow to infinity");
}

YoungFunction YoungFunction::power(double r) {
    if (!(r >= 1.0)) throw input_error("young: power exponent must be >= 1");
    YoungFunction y;
    y.kind_ = Kind::power;
    y.r_ = r;
    y.scale_ = 1.0;  // t^r is already normalized
    return y;
}

YoungFunction YoungFunction::power_log(double r, double delta) {
    if (!(r > 1.0) && !(r == 1.0 && delta >= 0.0))
        throw input_error("young: power_log needs r > 1 (or r = 1 with delta >= 0)");
    YoungFunction y;
    y.kind_ = Kind::power_log;
    y.r_ = r;
    y.delta_ = delta;
    if (delta < 0.0) {
        // Origin-tangency t * raw'(t) = raw(t), i.e.
        // r - 1 + delta * t / ((1+t) log(1+t)) = 0; the bracket term decreases
        // from 1 to 0, so a root exists iff r - 1 + delta < 0.
        if (r - 1.0 + delta < 0.0) {
            auto phi = [&](double t) {
                return r - 1.0 + delta * t / ((1.0 + t) * std::log1p(t));
            };
            y.knee_ = find_root_increasing(phi, 1e-12, 1e12);
        }
    }
    if (y.knee_ > 0.0) {
        const double l = std::log1p(y.knee_);
        y.slope_ = std::exp(r * std::log(y.knee_) + delta * std::log(l)) / y.knee_;
    }
    y.normalize();
    y.validate();
    return y;
}

YoungFunction YoungFunction::custom_table(std::vector<double> t, std::vector<double> psi) {
    if (t.size() != psi.size() || t.size() < 2)
        throw input_error("young: custom table needs >= 2 matching samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(psi[i] > 0.0))
            throw input_error("young: custom table entries must be positive");
        if (i > 0 && (t[i] <= t[i - 1] || psi[i] <= psi[i - 1]))
            throw input_error("young: custom table must be strictly increasing");
    }
    YoungFunction y;
    y.kind_ = Kind::custom;
    y.ts_ = std::move(t);
    y.ps_ = std::move(psi);
    y.normalize();
    y.validate();
    return y;
}

YoungFunction YoungFunction::parse(const std::string& spec) {
    std::istringstream ss(spec);
    std::string head;
    std::getline(ss, head, ':');
    if (head == "power") {
        std::string rs;
        std::getline(ss, rs);
        if (rs.empty()) throw input_error("young: power spec needs an exponent");
        return power(std::stod(rs));
    }
    if (head == "powerlog") {
        std::string rs, ds;
        std::getline(ss, rs, ':');
        std::getline(ss, ds);
        if (rs.empty() || ds.empty()) throw input_error("young: powerlog spec needs r and delta");
        return power_log(std::stod(rs), std::stod(ds));
    }
    throw input_error("young: unknown spec '" + spec + "'");
}

double YoungFunction::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    return raw(scale_ * t);
}

double YoungFunction::inverse(double y) const {
    if (y <= 0.0) return 0.0;
    double hi = 1.0;
    while ((*this)(hi) < y) hi *= 2.0;
    double lo = hi;
    while (lo > 1e-300 && (*this)(lo) > y) lo /= 2.0;
    return find_root_increasing([&](double t) { return (*this)(t) - y; }, lo, hi);
}

YoungFunction YoungFunction::complementary() const {
    if (kind_ == Kind::custom)
        throw input_error("young: custom functions carry no complementary pairing");
    const double rp = r_ / (r_ - 1.0);
    if (kind_ == Kind::power) return power(rp);
    return power_log(rp, -delta_ * (rp - 1.0));
}

std::pair<double, double> YoungFunction::doubling_constants() const {
    double c = 0.0;
    for (double t = 1.0; t < 1e8; t *= 1.7) c = std::max(c, (*this)(2.0 * t) / (*this)(t));
    return {c, 1.0};
}

double orlicz_subset_norm(const DiscreteSpace& space, const std::vector<int>& pts,
                          const std::vector<double>& f, const YoungFunction& psi) {
    if (pts.empty()) throw input_error("orlicz norm: empty point set");
    double mass = 0.0, fmax = 0.0;
    for (int p : pts) {
        mass += space.mu(p);
        fmax = std::max(fmax, std::abs(f[p]));
    }
    if (!(mass > 0.0)) throw input_error("orlicz norm: zero-mass point set");
    if (fmax == 0.0) return 0.0;

    const auto avg = [&](double lambda) {
        double s = 0.0;
        for (int p : pts) s += psi(std::abs(f[p]) / lambda) * space.mu(p);
        return s / mass;
    };

    // avg is decreasing in lambda; avg(fmax) <= psi(1) = 1 brackets above.
    double hi = fmax;
    double lo = fmax;
    while (avg(lo) <= 1.0) {
        hi = lo;
        lo /= 2.0;
        if (lo < fmax * 1e-18) return hi;  // flat: psi vanishes on the data
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (avg(mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

double orlicz_ball_norm(const DiscreteSpace& space, const Ball& ball,
                        const std::vector<double>& f, const YoungFunction& psi) {
    const std::vector<int> pts = space.ball_points(ball);
    if (pts.empty()) throw input_error("orlicz norm: empty ball");
    return orlicz_subset_norm(space, pts, f, psi);
}

namespace {

// Per-center suffix-best of ||f||_{psi, first-t-points} over cuts.
std::vector<double> orlicz_center_suffix(const BallScanner& sc, int center,
                                         const std::vector<double>& f,
                                         const YoungFunction& psi) {
    const DiscreteSpace& space = sc.space();
    const auto& ord = sc.order(center);
    const auto& cuts = sc.cuts(center);
    const std::size_t n = ord.size();
    std::vector<double> best_from(n + 1, -kInf);
    double running = -kInf;
    int ci = static_cast<int>(cuts.size()) - 1;
    for (int r = static_cast<int>(n); r >= 0; --r) {
        while (ci >= 0 && cuts[ci] >= r + 1) {
            const int t = cuts[ci];
            std::vector<int> pts(ord.begin(), ord.begin() + t);
            double mass = 0.0;
            for (int p : pts) mass += space.mu(p);
            if (mass > 0.0)
                running = std::max(running, orlicz_subset_norm(space, pts, f, psi));
            --ci;
        }
        best_from[r] = running;
        if (r == 0) break;
    }
    return best_from;
}

}  // namespace

double orlicz_maximal(const BallScanner& scanner, const std::vector<double>& f,
                      const YoungFunction& psi, int x) {
    double best = -kInf;
    for (std::size_t c = 0; c < scanner.space().size(); ++c) {
        const auto suffix = orlicz_center_suffix(scanner, static_cast<int>(c), f, psi);
        best = std::max(best, suffix[scanner.rank(static_cast<int>(c), x)]);
    }
    return std::isfinite(best) ? best : 0.0;
}

std::vector<double> orlicz_maximal_all(const BallScanner& scanner, const std::vector<double>& f,
                                       const YoungFunction& psi) {
    const std::size_t n = scanner.space().size();
    std::vector<std::vector<double>> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        per_center[c] = orlicz_center_suffix(scanner, static_cast<int>(c), f, psi);
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

std::vector<double> default_tail_cutoffs(double c, int count) {
    std::vector<double> out;
    out.push_back(c);
    for (int j = 1; j < count; ++j) out.push_back(c * std::pow(2.0, std::pow(2.0, j)));
    return out;
}

namespace {

// Composite Simpson in u = log t over [a, b].
double log_simpson(const std::function<double(double)>& f, double a, double b) {
    const double ua = std::log(a), ub = std::log(b);
    int k = std::max(64, static_cast<int>(16.0 * (ub - ua)));
    if (k % 2) ++k;
    const double h = (ub - ua) / k;
    double s = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double t = std::exp(ua + i * h);
        const double w = (i == 0 || i == k) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * f(t);
    }
    return s * h / 3.0;
}

TailReport windowed_tail(const std::function<double(double)>& integrand,
                         std::vector<double> cutoffs) {
    TailReport rep;
    rep.cutoffs = std::move(cutoffs);
    if (rep.cutoffs.size() < 3) throw input_error("tail integral: need >= 3 cutoffs");
    for (std::size_t j = 1; j < rep.cutoffs.size(); ++j) {
        const double inc = log_simpson(integrand, rep.cutoffs[j - 1], rep.cutoffs[j]);
        rep.increments.push_back(inc);
        rep.total += inc;
    }
    const std::size_t m = rep.increments.size();
    const std::size_t look = std::min<std::size_t>(5, m - 1);
    bool all_decay = true, none_decay = true, sane = true;
    for (std::size_t j = m - look; j < m; ++j) {
        const double prev = rep.increments[j - 1];
        const double cur = rep.increments[j];
        if (!std::isfinite(cur) || !std::isfinite(prev)) {
            rep.verdict = TailVerdict::divergent;
            return rep;
        }
        if (prev < 0.0 || cur < 0.0) sane = false;
        const double ratio = (prev == 0.0) ? (cur == 0.0 ? 0.0 : kInf) : cur / prev;
        if (ratio < 0.9)
            none_decay = false;
        else
            all_decay = false;
    }
    if (!sane)
        rep.verdict = TailVerdict::inconclusive;
    else if (all_decay)
        rep.verdict = TailVerdict::finite;
    else if (none_decay)
        rep.verdict = TailVerdict::divergent;
    else
        rep.verdict = TailVerdict::inconclusive;
    return rep;
}

}  // namespace

TailReport bp_condition_check(const YoungFunction& psi, double p, double c,
                              std::vector<double> cutoffs) {
    if (!(p > 1.0)) throw input_error("bp_condition_check: p must exceed 1");
    if (!(c > 0.0)) throw input_error("bp_condition_check: c must be positive");
    if (cutoffs.empty()) cutoffs = default_tail_cutoffs(c);
    return windowed_tail([&](double t) { return psi(t) * std::pow(t, -p); }, std::move(cutoffs));
}

TailReport orlicz_growth_integral(const YoungFunction& G, double a, double b, double c,
                                  std::vector<double> cutoffs) {
    if (!(b > 0.0)) throw input_error("orlicz_growth_integral: exponent must be positive");
    if (!(c > 0.0)) throw input_error("orlicz_growth_integral: c must be positive");
    if (cutoffs.empty()) cutoffs = default_tail_cutoffs(c);
    return windowed_tail(
        [&](double t) {
            const double g = G(t);
            if (!(g > 0.0)) return kInf;
            return std::pow(std::pow(t, a) / g, b);
        },
        std::move(cutoffs));
}

HolderReport generalized_holder_check(const DiscreteSpace& space, const std::vector<int>& pts,
                                      const std::vector<double>& f, const std::vector<double>& g,
                                      const YoungFunction& psi) {
    if (!psi.has_complementary())
        throw input_error("generalized_holder_check: psi has no complementary pairing");
    const YoungFunction bar = psi.complementary();
    HolderReport rep;
    double mass = 0.0;
    for (int p : pts) {
        rep.lhs += std::abs(f[p] * g[p]) * space.mu(p);
        mass += space.mu(p);
    }
    if (!(mass > 0.0)) throw input_error("generalized_holder_check: zero-mass subset");
    rep.lhs /= mass;
    rep.rhs = orlicz_subset_norm(space, pts, f, psi) * orlicz_subset_norm(space, pts, g, bar);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

}  // namespace ccp

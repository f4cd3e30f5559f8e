#include "ccp/weights.hpp"

#include <algorithm>
#include <cmath>

namespace ccp {

void WeightSystem::validate(std::size_t npoints) const {
    const int mm = m();
    if (mm < 1) throw input_error("weights: need at least one v weight");
    if (u.size() != npoints) throw input_error("weights: u size mismatch");
    for (const auto& vi : v)
        if (vi.size() != npoints) throw input_error("weights: v size mismatch");
    if (static_cast<int>(p_i.size()) != mm)
        throw input_error("weights: expected " + std::to_string(mm) + " exponents p_i");
    for (double pi : p_i)
        if (!(pi > 1.0) || !std::isfinite(pi))
            throw input_error("weights: each p_i must lie in (1, inf)");
    double inv_p = 0.0;
    for (double pi : p_i) inv_p += 1.0 / pi;
    if (std::abs(inv_p - 1.0 / p) > 1e-12)
        throw input_error("weights: exponent identity 1/p = sum 1/p_i violated");
    if (!(p > 1.0 / mm)) throw input_error("weights: need p > 1/m");
    if (!(p <= q) || !std::isfinite(q)) throw input_error("weights: need p <= q < inf");
    if (!(t > 1.0)) throw input_error("weights: auxiliary exponent t must exceed 1");
    if (exponent_identity_residual(q, p_i) > 1e-12)
        throw input_error("weights: 1/q + sum 1/p_i' != 1/q + m - 1/p");
    for (double w : u)
        if (w < 0.0 || !std::isfinite(w)) throw input_error("weights: u must be >= 0 and finite");
    for (const auto& vi : v)
        for (double w : vi)
            if (w < 0.0 || !std::isfinite(w))
                throw input_error("weights: v must be >= 0 and finite");
    if (Psi || !Phi.empty()) {
        if (!Psi || static_cast<int>(Phi.size()) != mm)
            throw input_error("weights: Orlicz form needs Psi and exactly m Phi functions");
    }
}

double exponent_identity_residual(double q, const std::vector<double>& p_i) {
    double sum_pprime = 0.0, inv_p = 0.0;
    for (double pi : p_i) {
        sum_pprime += 1.0 - 1.0 / pi;  // 1/p_i' = 1 - 1/p_i
        inv_p += 1.0 / pi;
    }
    const double lhs = 1.0 / q + sum_pprime;
    const double rhs = 1.0 / q + p_i.size() - inv_p;
    return std::abs(lhs - rhs);
}

ConditionVariant parse_variant(const std::string& name) {
    if (name == "general_q>1") return ConditionVariant::general_q_gt1;
    if (name == "general_q<=1" || name == "general_q<1") return ConditionVariant::general_q_le1;
    if (name == "cc_q>1") return ConditionVariant::cc_q_gt1;
    if (name == "cc_q<=1" || name == "cc_q<1") return ConditionVariant::cc_q_le1;
    if (name == "theorem1_q>1") return ConditionVariant::theorem1_q_gt1;
    if (name == "theorem1_q<=1" || name == "theorem1_q<1") return ConditionVariant::theorem1_q_le1;
    throw input_error("weights: unknown condition variant '" + name + "'");
}

std::string variant_name(ConditionVariant v) {
    switch (v) {
        case ConditionVariant::general_q_gt1: return "general_q>1";
        case ConditionVariant::general_q_le1: return "general_q<=1";
        case ConditionVariant::cc_q_gt1: return "cc_q>1";
        case ConditionVariant::cc_q_le1: return "cc_q<=1";
        case ConditionVariant::theorem1_q_gt1: return "theorem1_q>1";
        case ConditionVariant::theorem1_q_le1: return "theorem1_q<=1";
    }
    return "?";
}

namespace {

bool uses_qt_average(ConditionVariant v) {
    return v == ConditionVariant::general_q_gt1 || v == ConditionVariant::cc_q_gt1 ||
           v == ConditionVariant::theorem1_q_gt1;
}

bool is_general(ConditionVariant v) {
    return v == ConditionVariant::general_q_gt1 || v == ConditionVariant::general_q_le1;
}

// Incremental set diameters along one center's distance order:
// diam(t) = diameter of the first t points.
std::vector<double> prefix_diameters(const DiscreteSpace& space, const std::vector<int>& ord) {
    std::vector<double> out(ord.size() + 1, 0.0);
    for (std::size_t t = 1; t < ord.size(); ++t) {
        double far = 0.0;
        for (std::size_t j = 0; j < t; ++j)
            far = std::max(far, space.dist(ord[t], ord[j]));
        out[t + 1] = std::max(out[t], far);
    }
    return out;
}

}  // namespace

ConditionResult check_power_condition(const DiscreteSpace& space, const PhiFunctional* phi,
                                      double alpha, const WeightSystem& ws,
                                      ConditionVariant variant,
                                      const std::vector<int>& centers) {
    ws.validate(space.size());
    const bool qt_form = uses_qt_average(variant);
    if (qt_form && !(ws.q > 1.0))
        throw input_error("weights: variant " + variant_name(variant) + " requires q > 1");
    if (!qt_form && ws.q > 1.0)
        throw input_error("weights: variant " + variant_name(variant) + " requires q <= 1");
    if (is_general(variant) && phi == nullptr)
        throw input_error("weights: general variants need a phi functional");
    if (variant == ConditionVariant::theorem1_q_gt1 || variant == ConditionVariant::theorem1_q_le1)
        alpha = 1.0;
    if (!is_general(variant) && !(alpha > 0.0))
        throw input_error("weights: cc variants need alpha > 0");

    const int m = ws.m();
    const std::size_t n = space.size();

    // Pointwise powers feeding the ball averages.
    const double u_exp = qt_form ? ws.q * ws.t : ws.q;
    std::vector<double> upow(n);
    for (std::size_t i = 0; i < n; ++i) upow[i] = std::pow(ws.u[i], u_exp);
    std::vector<std::vector<double>> vpow(m, std::vector<double>(n));
    std::vector<std::vector<char>> vzero(m, std::vector<char>(n, 0));
    for (int i = 0; i < m; ++i) {
        const double e = ws.t * ws.p_prime(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (ws.v[i][j] == 0.0) {
                vzero[i][j] = 1;
                vpow[i][j] = 0.0;  // handled through the zero mask
            } else {
                vpow[i][j] = std::pow(ws.v[i][j], -e);
            }
        }
    }

    double sum_inv_pprime = 0.0;
    for (int i = 0; i < m; ++i) sum_inv_pprime += 1.0 - 1.0 / ws.p_i[i];
    const double mu_exp = is_general(variant) ? (1.0 / ws.q + sum_inv_pprime)
                                              : (1.0 / ws.q - 1.0 / ws.p);

    BallScanner scanner(space);
    std::vector<int> center_list = centers;
    if (center_list.empty()) {
        center_list.resize(n);
        for (std::size_t i = 0; i < n; ++i) center_list[i] = static_cast<int>(i);
    }

    ConditionResult res;
    for (int c : center_list) {
        const auto& ord = scanner.order(c);
        const auto& pm = scanner.prefix_mu(c);
        const auto diam = prefix_diameters(space, ord);
        // prefix sums of the powered weights and the zero mask, in order
        std::vector<double> pu(n + 1, 0.0);
        std::vector<std::vector<double>> pv(m, std::vector<double>(n + 1, 0.0));
        std::vector<std::vector<int>> pz(m, std::vector<int>(n + 1, 0));
        for (std::size_t tt = 0; tt < n; ++tt) {
            const int y = ord[tt];
            pu[tt + 1] = pu[tt] + upow[y] * space.mu(y);
            for (int i = 0; i < m; ++i) {
                pv[i][tt + 1] = pv[i][tt] + vpow[i][y] * space.mu(y);
                pz[i][tt + 1] = pz[i][tt] + (vzero[i][y] && space.mu(y) > 0.0 ? 1 : 0);
            }
        }
        for (int t : scanner.cuts(c)) {
            const double mass = pm[t];
            if (!(mass > 0.0)) continue;
            bool blew_up = false;
            for (int i = 0; i < m; ++i)
                if (pz[i][t] > 0) blew_up = true;
            const double radius = scanner.radius_for_cut(c, t);
            if (blew_up) {
                if (!res.infinite) {
                    res.infinite = true;
                    res.witness = Ball{c, radius};
                }
                continue;
            }
            double base;
            if (is_general(variant)) {
                // phi depends on the radius: take both representatives of
                // this point set.
                const double d_prev = space.dist(c, ord[t - 1]);
                double best_phi = -kInf;
                for (double rad :
                     {d_prev + space.radius_bump(),
                      t < static_cast<int>(n) ? space.dist(c, ord[t]) : d_prev}) {
                    if (!(rad > 0.0)) continue;
                    const Ball b{c, rad};
                    if (!phi->defined(space, b)) continue;
                    best_phi = std::max(best_phi, (*phi)(space, b));
                }
                if (!std::isfinite(best_phi)) continue;
                base = best_phi * std::pow(mass, mu_exp);
            } else {
                base = std::pow(diam[t], alpha) * std::pow(mass, mu_exp);
            }
            double value = base * std::pow(pu[t] / mass, 1.0 / u_exp);
            for (int i = 0; i < m; ++i)
                value *= std::pow(pv[i][t] / mass, 1.0 / (ws.t * ws.p_prime(i)));
            ++res.balls_checked;
            if (value > res.sup) {
                res.sup = value;
                res.ball = Ball{c, radius};
            }
        }
    }
    if (res.infinite) res.sup = kInf;
    return res;
}

ConditionResult check_orlicz_condition(const DiscreteSpace& space, const PhiFunctional& phi,
                                       const WeightSystem& ws,
                                       const std::vector<int>& centers) {
    ws.validate(space.size());
    if (!ws.Psi && ws.q > 1.0)
        throw input_error("weights: Orlicz condition with q > 1 needs Psi");
    if (static_cast<int>(ws.Phi.size()) != ws.m())
        throw input_error("weights: Orlicz condition needs m Phi functions");

    // Growth prerequisites. q > 1: int (t^q/Psi)^{q'-1} dt/t. Always:
    // int (t^{p_i'}/Phi_i)^{p_i-1} dt/t.
    if (ws.q > 1.0) {
        const double qp = ws.q / (ws.q - 1.0);
        const auto rep = orlicz_growth_integral(*ws.Psi, ws.q, qp - 1.0, 1.0);
        if (rep.verdict != TailVerdict::finite)
            throw input_error("weights: Psi fails the q' growth integral (verdict " +
                              std::string(to_string(rep.verdict)) + ")");
    }
    for (int i = 0; i < ws.m(); ++i) {
        const auto rep = orlicz_growth_integral(ws.Phi[i], ws.p_prime(i), ws.p_i[i] - 1.0, 1.0);
        if (rep.verdict != TailVerdict::finite)
            throw input_error("weights: Phi_" + std::to_string(i + 1) +
                              " fails the p_i growth integral (verdict " +
                              std::string(to_string(rep.verdict)) + ")");
    }

    const int m = ws.m();
    const std::size_t n = space.size();
    double sum_inv_pprime = 0.0;
    for (int i = 0; i < m; ++i) sum_inv_pprime += 1.0 - 1.0 / ws.p_i[i];
    const double mu_exp = 1.0 / ws.q + sum_inv_pprime;

    // v_i^{-1}, with zeros blowing up to +inf (reported with a witness).
    std::vector<std::vector<double>> vinv(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            vinv[i][j] = ws.v[i][j] > 0.0 ? 1.0 / ws.v[i][j] : kInf;
    std::vector<double> uq(n);
    if (!(ws.q > 1.0))
        for (std::size_t j = 0; j < n; ++j) uq[j] = std::pow(ws.u[j], ws.q);

    BallScanner scanner(space);
    std::vector<int> center_list = centers;
    if (center_list.empty()) {
        center_list.resize(n);
        for (std::size_t i = 0; i < n; ++i) center_list[i] = static_cast<int>(i);
    }

    ConditionResult res;
    for (int c : center_list) {
        const auto& ord = scanner.order(c);
        const auto& pm = scanner.prefix_mu(c);
        std::vector<double> puq(n + 1, 0.0);
        if (!(ws.q > 1.0))
            for (std::size_t tt = 0; tt < n; ++tt)
                puq[tt + 1] = puq[tt] + uq[ord[tt]] * space.mu(ord[tt]);
        for (int t : scanner.cuts(c)) {
            if (!(pm[t] > 0.0)) continue;
            std::vector<int> pts(ord.begin(), ord.begin() + t);
            std::sort(pts.begin(), pts.end());
            bool blew_up = false;
            for (int i = 0; i < m && !blew_up; ++i)
                for (int p : pts)
                    if (!std::isfinite(vinv[i][p]) && space.mu(p) > 0.0) {
                        blew_up = true;
                        break;
                    }
            const double d_prev = space.dist(c, ord[t - 1]);
            const double radius = d_prev + space.radius_bump();
            if (blew_up) {
                if (!res.infinite) {
                    res.infinite = true;
                    res.witness = Ball{c, radius};
                }
                continue;
            }
            double best = -kInf;
            for (double rad : {radius, t < static_cast<int>(n) ? space.dist(c, ord[t]) : d_prev}) {
                if (!(rad > 0.0)) continue;
                const Ball b{c, rad};
                if (!phi.defined(space, b)) continue;
                double value = phi(space, b) * std::pow(pm[t], mu_exp);
                value *= (ws.q > 1.0) ? orlicz_subset_norm(space, pts, ws.u, *ws.Psi)
                                      : std::pow(puq[t] / pm[t], 1.0 / ws.q);
                for (int i = 0; i < m; ++i)
                    value *= orlicz_subset_norm(space, pts, vinv[i], ws.Phi[i]);
                best = std::max(best, value);
            }
            if (!std::isfinite(best)) continue;
            ++res.balls_checked;
            if (best > res.sup) {
                res.sup = best;
                res.ball = Ball{c, radius};
            }
        }
    }
    if (res.infinite) res.sup = kInf;
    return res;
}

ApqResult a_pq_constant(const DiscreteSpace& space, const std::vector<double>& w, double p,
                        double q) {
    if (!(p > 1.0) || !(q > 0.0)) throw input_error("a_pq: need p > 1 and q > 0");
    if (w.size() != space.size()) throw input_error("a_pq: weight size mismatch");
    for (double x : w)
        if (!(x > 0.0)) throw input_error("a_pq: weight must be strictly positive");
    const double pp = p / (p - 1.0);
    const std::size_t n = space.size();
    std::vector<double> wq(n), wpp(n);
    for (std::size_t i = 0; i < n; ++i) {
        wq[i] = std::pow(w[i], q);
        wpp[i] = std::pow(w[i], -pp);
    }
    BallScanner scanner(space);
    ApqResult res;
    res.constant = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const auto& ord = scanner.order(static_cast<int>(c));
        const auto& pm = scanner.prefix_mu(static_cast<int>(c));
        std::vector<double> pq(n + 1, 0.0), ppp(n + 1, 0.0);
        for (std::size_t tt = 0; tt < n; ++tt) {
            pq[tt + 1] = pq[tt] + wq[ord[tt]] * space.mu(ord[tt]);
            ppp[tt + 1] = ppp[tt] + wpp[ord[tt]] * space.mu(ord[tt]);
        }
        for (int t : scanner.cuts(static_cast<int>(c))) {
            if (!(pm[t] > 0.0)) continue;
            const double value =
                std::pow(pq[t] / pm[t], 1.0 / q) * std::pow(ppp[t] / pm[t], 1.0 / pp);
            if (value > res.constant) {
                res.constant = value;
                res.ball = Ball{static_cast<int>(c), scanner.radius_for_cut(static_cast<int>(c), t)};
            }
        }
    }
    return res;
}

FracmaxReport fracmax_weight_bound_check(const DiscreteSpace& space, const PhiFunctional& phi,
                                         const std::vector<double>& w,
                                         const std::vector<double>& p_i,
                                         const std::vector<double>& alphas,
                                         const std::vector<std::vector<double>>& fs) {
    const int m = phi.kernel().m();
    if (static_cast<int>(p_i.size()) != m || static_cast<int>(alphas.size()) != m ||
        static_cast<int>(fs.size()) != m)
        throw input_error("fracmax: p_i, alphas, fs must all have length m");
    double asum = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0) || !(a < 1.0))
            throw input_error("fracmax: each alpha_i must lie in (0,1)");
        asum += a;
    }
    if (std::abs(asum - 1.0) > 1e-12) throw input_error("fracmax: alphas must sum to 1");
    double inv_p = 0.0;
    for (double pi : p_i) {
        if (!(pi > 1.0)) throw input_error("fracmax: each p_i must exceed 1");
        inv_p += 1.0 / pi;
    }
    const double p = 1.0 / inv_p;

    FracmaxReport rep;
    rep.p = p;
    BallScanner scanner(space);

    // W = M^{[p]} w for p > 1, plain w otherwise.
    std::vector<double> weff = w;
    if (p > 1.0) {
        rep.hl_iterations = static_cast<int>(std::floor(p));
        for (int it = 0; it < rep.hl_iterations; ++it)
            weff = multilinear_maximal_all(scanner, {weff});
    }

    // lhs
    std::vector<double> tf = (phi.kernel().kind() == Kernel::Kind::cc_alpha)
                                 ? eval_I_alpha_all(space, phi.kernel().alpha(), fs)
                                 : eval_potential_all(space, phi.kernel(), fs);
    double lhs = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x)
        lhs += std::pow(std::abs(tf[x]), p) * w[x] * space.mu(x);
    rep.lhs = std::pow(lhs, 1.0 / p);

    // rhs
    rep.rhs = 1.0;
    for (int i = 0; i < m; ++i) {
        const double pi = p_i[i];
        const double ai = alphas[i];
        auto gamma = [&](const Ball& b) -> double {
            if (space.ball_count(b) <= 1 || !phi.defined(space, b)) return std::nan("");
            const double pb = phi(space, b);
            const double mb = space.ball_measure(b);
            if (!(mb > 0.0)) return std::nan("");
            return std::pow(std::pow(pb, ai) * mb, pi) / mb;
        };
        const auto mg = m_gamma_maximal_all(scanner, weff, gamma);
        double term = 0.0;
        for (std::size_t x = 0; x < space.size(); ++x)
            term += std::pow(std::abs(fs[i][x]), pi) * mg[x] * space.mu(x);
        rep.rhs *= std::pow(term, 1.0 / pi);
    }
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    return rep;
}

}  // namespace ccp

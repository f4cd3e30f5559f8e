#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccp/fields.hpp"
#include "ccp/weights.hpp"

namespace ccp {

/// Exponent bookkeeping: fills the missing members of
/// {p, q, r, s, r~, s~, p_1..p_m} from whichever identities apply
/// (1/p = 1/r + 1/s, 1/p = sum 1/p_i, q = n p/(n-p)) and validates ranges.
struct ExponentSet {
    int n = 0;  // ambient dimension, 0 = unknown (disables the classical q)
    int m = 1;
    std::optional<double> p, q, r, s, r_tilde, s_tilde;
    std::vector<double> p_i;
};

ExponentSet exponent_arithmetic(ExponentSet in);

struct HolderProductReport {
    double lhs = 0.0;   // (int_B |Y(fg)|^p)^{1/p}
    double term1 = 0.0; // ||Yf||_r ||g||_s
    double term2 = 0.0; // ||f||_{r~} ||Yg||_{s~}
    double rhs = 0.0;
    double ratio = 0.0;
};

HolderProductReport holder_product_bound(const GridSpace& gs, const FieldFamily& field,
                                         const Ball& ball, const std::vector<double>& f,
                                         const std::vector<double>& g, double p, double r,
                                         double s, double r_tilde, double s_tilde);

struct RepresentationReport {
    double C = 0.0;           // max over ball points of lhs/rhs
    bool violation = false;   // rhs = 0 < lhs at some point (discretization flag)
    int violation_point = -1;
    std::vector<int> ball_points;
    std::vector<double> lhs, rhs;  // aligned with ball_points
};

/// Pointwise multilinear representation bound on a ball: |prod f_k - prod
/// (f_k)_B| against sum_k I_{B,1}(|f_1|,..,|Yf_k|,..,|f_m|), all restricted
/// to B as its own space of homogeneous type.
RepresentationReport representation_check(const GridSpace& gs, const FieldFamily& field,
                                          const Ball& ball,
                                          const std::vector<std::vector<double>>& fs);

struct JerisonReport {
    double lhs = 0.0;           // int_B~ |f - f_B~|
    double rhs_integral = 0.0;  // int_{2 B~} |Yf|
    double radius = 0.0;
    double constant = 0.0;      // lhs / (r(B~) * rhs_integral)
};

/// The L^1 Poincare hypothesis with the doubled ball on the right.
/// Errors out when the doubled ball touches the grid boundary.
JerisonReport jerison_h1_check(const GridSpace& gs, const FieldFamily& field, const Ball& ball,
                               const std::vector<double>& f);

/// Random test-function families over a grid.
struct TestFunctionFamily {
    enum class Kind { polynomial, bump, ramp };
    Kind kind = Kind::polynomial;
    int degree = 2;
    double coeff_lo = -1.0, coeff_hi = 1.0;
    int bump_count = 3;
    double ramp_eps = 0.125;

    std::vector<double> sample(const RectGrid& grid, Rng& rng) const;
};

struct PoincareTrial {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

struct PoincareReport {
    double max_ratio = 0.0;
    double q50 = 0.0, q90 = 0.0;  // ratio quantiles
    std::vector<PoincareTrial> trials;
    std::uint64_t seed = 0;
    bool condition_checked = false;
    double condition_sup = 0.0;
    std::string warning;  // set when the weight condition was not pre-checked
};

/// Weighted m-linear Poincare harness over one ball: per trial
///   lhs = ( int_B (|prod f_k - prod (f_k)_B| u)^q )^{1/q}
///   rhs = sum_k ( int_B (|Yf_k| v_k)^{p_k} )^{1/p_k}
///                prod_{i != k} ( int_B (|f_i| v_i)^{p_i} )^{1/p_i}
/// pinned, when given, runs as trial 0 before the random draws.
PoincareReport verify_theorem(const GridSpace& gs, const FieldFamily& field,
                              const WeightSystem& ws, const Ball& ball,
                              const TestFunctionFamily& family, int trials, std::uint64_t seed,
                              const std::vector<std::vector<double>>* pinned = nullptr,
                              std::optional<double> precheck_sup = std::nullopt);

struct FailureDemoReport {
    std::vector<double> eps, lhs, rhs, ratio;
    double slope = 0.0;           // fit of log ratio against log eps
    double expected_slope = 0.0;  // -(1-p)/p
};

/// Ramp family u_eps on (-1,1): inf_a || u - a ||_q grows like
/// eps^{-(1-p)/p} against (int |u'|^p)^{1/p}; the classical inequality
/// fails for p < 1 and this measures the blow-up rate. For p = 1 the ratio
/// stays bounded. q defaults to the classical p/(1-p) (n = 1).
FailureDemoReport linear_failure_demo(double p, std::optional<double> q,
                                      const std::vector<double>& eps_schedule,
                                      int grid_points = 4097);

struct BilinearAltReport {
    std::vector<double> eps, lhs, rhs, ratio;
    double max_ratio = 0.0, min_ratio = kInf;
};

/// Bilinear alternative on the same ramp family: lhs centers at f_B g_B and
/// the right side pairs each factor with the other's gradient. Exponents
/// r = s = r~ = s~ and q are supplied; the ratio stays bounded where the
/// linear inequality blew up.
BilinearAltReport bilinear_alternative_check(double q, double r, double s, double r_tilde,
                                             double s_tilde,
                                             const std::vector<double>& eps_schedule,
                                             int grid_points = 4097);

/// Generic bilinear inequality evaluation on a grid ball for arbitrary f, g.
HolderProductReport bilinear_poincare_trial(const GridSpace& gs, const FieldFamily& field,
                                            const Ball& ball, const std::vector<double>& f,
                                            const std::vector<double>& g, double q, double r,
                                            double s, double r_tilde, double s_tilde);

}  // namespace ccp

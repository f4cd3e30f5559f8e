#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccp/operators.hpp"
#include "ccp/orlicz.hpp"
#include "ccp/space.hpp"

namespace ccp {

/// Weights (u, v_1..v_m) with exponents (p, q, p_1..p_m), the auxiliary power
/// t > 1 for the power-form conditions, or Young functions (Psi, Phi_i) for
/// the Orlicz-form ones.
struct WeightSystem {
    std::vector<double> u;
    std::vector<std::vector<double>> v;
    double p = 0.0;
    double q = 0.0;
    std::vector<double> p_i;
    double t = 2.0;
    std::optional<YoungFunction> Psi;
    std::vector<YoungFunction> Phi;

    int m() const { return static_cast<int>(v.size()); }
    double p_prime(int i) const { return p_i[i] / (p_i[i] - 1.0); }

    /// Exponent identity, ranges, and array sizes. Nonnegative weights are
    /// accepted (zeros surface as infinite condition sups with a witness);
    /// negatives are rejected.
    void validate(std::size_t npoints) const;
};

/// | (1/q + sum 1/p_i') - (1/q + m - 1/p) | with p recomputed from the p_i;
/// identically zero in exact arithmetic, checked to 1e-12 in validate().
double exponent_identity_residual(double q, const std::vector<double>& p_i);

enum class ConditionVariant {
    general_q_gt1,   // phi(B) mu(B)^{1/q + sum 1/p_i'} (u^{qt})-average form
    general_q_le1,   // same with the (u^q)-average
    cc_q_gt1,        // diam(B)^alpha mu(B)^{1/q - 1/p}
    cc_q_le1,
    theorem1_q_gt1,  // diam(B) |B|^{1/q - 1/p}, centers maskable
    theorem1_q_le1,
};

ConditionVariant parse_variant(const std::string& name);
std::string variant_name(ConditionVariant v);

struct ConditionResult {
    double sup = 0.0;
    Ball ball;              // attaining ball (smallest center, then radius)
    bool infinite = false;  // a zero weight made some v-average blow up
    Ball witness;           // ball witnessing the blow-up when infinite
    std::size_t balls_checked = 0;
};

/// Sup over the enumerated ball family of the variant's expression. phi is
/// required for the general variants, alpha for the cc variants (theorem1
/// fixes alpha = 1). centers, when nonempty, restricts ball centers (the
/// Omega_0-bar mask of the Poincare theorem).
ConditionResult check_power_condition(const DiscreteSpace& space, const PhiFunctional* phi,
                                      double alpha, const WeightSystem& ws,
                                      ConditionVariant variant,
                                      const std::vector<int>& centers = {});

/// Orlicz-form condition phi(B) mu(B)^{1/q + sum 1/p_i'} ||u||_{Psi,B}
/// prod ||v_i^{-1}||_{Phi_i,B} (q > 1), or with the (u^q)-average (q <= 1).
/// Growth prerequisites on Psi (q > 1 only) and every Phi_i are enforced
/// first; failure names the offending integral.
ConditionResult check_orlicz_condition(const DiscreteSpace& space, const PhiFunctional& phi,
                                       const WeightSystem& ws,
                                       const std::vector<int>& centers = {});

struct ApqResult {
    double constant = 1.0;
    Ball ball;
};

/// A_{p,q} constant: sup over balls of (avg w^q)^{1/q} (avg w^{-p'})^{1/p'}.
/// Balls stand in for cubes in the abstract space.
ApqResult a_pq_constant(const DiscreteSpace& space, const std::vector<double>& w, double p,
                        double q);

struct FracmaxReport {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
    double p = 0.0;
    int hl_iterations = 0;  // [p] for p > 1, else 0
};

/// Corollary-style fractional-maximal weight bound:
///   (int |T f|^p w)^{1/p} <= C prod_i (int |f_i|^{p_i} M_{phi~_i}(W))^{1/p_i}
/// where phi~_i(B) = (phi(B)^{alpha_i} mu(B))^{p_i} / mu(B) and W = M^{[p]} w
/// for p > 1, W = w otherwise.
FracmaxReport fracmax_weight_bound_check(const DiscreteSpace& space, const PhiFunctional& phi,
                                         const std::vector<double>& w,
                                         const std::vector<double>& p_i,
                                         const std::vector<double>& alphas,
                                         const std::vector<std::vector<double>>& fs);

}  // namespace ccp

#pragma once

#include <string>
#include <vector>

#include "ccp/space.hpp"

namespace ccp {

/// Young function: continuous, convex, increasing, psi(0)=0, psi(t)->inf,
/// normalized by argument rescale so psi(1)=1.
///
/// power(r):           t^r, r >= 1
/// power_log(r,delta): t^r log(1+t)^delta; for delta < 0 the function is
///                     replaced below its origin-tangent point by the tangent
///                     line (the standard equivalent Young function; the raw
///                     formula is not convex near 0 there)
/// custom:             tabulated, linear interpolation, power-law tails
class YoungFunction {
public:
    enum class Kind { power, power_log, custom };

    static YoungFunction power(double r);
    static YoungFunction power_log(double r, double delta);
    static YoungFunction custom_table(std::vector<double> t, std::vector<double> psi);
    /// "power:r" | "powerlog:r:delta"
    static YoungFunction parse(const std::string& spec);

    Kind kind() const { return kind_; }
    double r() const { return r_; }
    double delta() const { return delta_; }

    double operator()(double t) const;
    /// Monotone inverse by bisection, relative tolerance 1e-10.
    double inverse(double y) const;

    bool has_complementary() const { return kind_ != Kind::custom; }
    /// The analytic pairing: power r <-> power r'; power_log(r, delta) <->
    /// power_log(r', -delta (r'-1)). Exact complementarity only holds for the
    /// power pair; the log pair is complementary up to equivalence constants.
    YoungFunction complementary() const;

    /// Measured (C, N) with psi(2t) <= C psi(t) for t >= N, sampled on a log
    /// grid; N is reported as 1 whenever that works.
    std::pair<double, double> doubling_constants() const;

private:
    Kind kind_ = Kind::power;
    double r_ = 1.0, delta_ = 0.0;
    double knee_ = 0.0;   // linearization point of the raw function
    double slope_ = 0.0;  // tangent slope below the knee
    double scale_ = 1.0;  // psi(t) = raw(scale * t)
    std::vector<double> ts_, ps_;  // custom table

    double raw(double t) const;
    void normalize();
    void validate() const;
};

/// Luxemburg gauge over an explicit point set with mu-averaged integrals:
/// inf { lambda > 0 : avg_E psi(|f|/lambda) <= 1 }. 0 when f == 0 on E.
double orlicz_subset_norm(const DiscreteSpace& space, const std::vector<int>& pts,
                          const std::vector<double>& f, const YoungFunction& psi);

/// ||f||_{psi,B}; throws on an empty ball.
double orlicz_ball_norm(const DiscreteSpace& space, const Ball& ball,
                        const std::vector<double>& f, const YoungFunction& psi);

/// M_psi f(x) = sup over balls containing x of ||f||_{psi,B}.
double orlicz_maximal(const BallScanner& scanner, const std::vector<double>& f,
                      const YoungFunction& psi, int x);
std::vector<double> orlicz_maximal_all(const BallScanner& scanner, const std::vector<double>& f,
                                       const YoungFunction& psi);

enum class TailVerdict { finite, divergent, inconclusive };

struct TailReport {
    TailVerdict verdict = TailVerdict::inconclusive;
    std::vector<double> cutoffs;
    std::vector<double> increments;  // integral over each consecutive window
    double total = 0.0;
};

inline const char* to_string(TailVerdict v) {
    switch (v) {
        case TailVerdict::finite: return "finite";
        case TailVerdict::divergent: return "divergent";
        default: return "inconclusive";
    }
}

/// Default cutoff schedule c * 2^(2^j): geometric in log t, so integrands
/// with log-power tails still show geometric increment decay when convergent.
std::vector<double> default_tail_cutoffs(double c, int count = 7);

/// integral_c^inf psi(t) t^{-p} dt/t, windowed over the cutoff schedule.
/// finite   <- the last five increment ratios all stay below 0.9
/// divergent<- they all stay at or above 0.9 (or an increment overflows)
/// inconclusive otherwise.
TailReport bp_condition_check(const YoungFunction& psi, double p, double c,
                              std::vector<double> cutoffs = {});

/// integral_c^inf (t^a / G(t))^b dt/t with the same verdict rule; covers the
/// growth prerequisites of the Orlicz weight conditions.
TailReport orlicz_growth_integral(const YoungFunction& G, double a, double b, double c,
                                  std::vector<double> cutoffs = {});

struct HolderReport {
    double lhs = 0.0;    // avg_E |f g|
    double rhs = 0.0;    // ||f||_{psi,E} ||g||_{bar psi,E}
    double ratio = 0.0;  // lhs / rhs (0 when rhs == 0)
};

/// Generalized Holder on a subset E against the complementary pair of psi.
HolderReport generalized_holder_check(const DiscreteSpace& space, const std::vector<int>& pts,
                                      const std::vector<double>& f, const std::vector<double>& g,
                                      const YoungFunction& psi);

}  // namespace ccp

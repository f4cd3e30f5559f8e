#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccp/dyadic.hpp"
#include "ccp/space.hpp"

namespace ccp {

/// Nonnegative multilinear kernel K(x, y_vec) on point indices.
///
/// cc_alpha:        rho(x,y_vec)^alpha / mu(B(x, rho(x,y_vec)))^m
/// euclidean_alpha: (|x-y_1| + ... + |x-y_m|)^(alpha - n m), Euclidean norms
/// custom:          caller-supplied callback (optionally with a diagonal
///                  extension K~ for the growth scan)
///
/// rho(x,y_vec) = sum_i rho(x,y_i). Tuples where the kernel value is not
/// finite (the 0/0 diagonal of cc_alpha, negative powers of 0) are omitted
/// from every sum; that is the discrete stand-in for a mu^m-null set.
class Kernel {
public:
    enum class Kind { cc_alpha, euclidean_alpha, custom };

    using PointFn = std::function<double(const DiscreteSpace&, int, const std::vector<int>&)>;
    using TildeFn = std::function<double(const DiscreteSpace&, const std::vector<int>&,
                                         const std::vector<int>&)>;

    static Kernel cc_alpha(double alpha, int m);
    static Kernel euclidean_alpha(double alpha, int n, int m);
    static Kernel custom(int m, PointFn fn, TildeFn tilde = nullptr);

    Kind kind() const { return kind_; }
    int m() const { return m_; }
    double alpha() const { return alpha_; }
    int euclidean_n() const { return n_; }

    /// K(x, y_vec); may return inf/NaN where undefined (callers omit those).
    double value(const DiscreteSpace& space, int x, const std::vector<int>& ys) const;

    bool has_tilde() const;
    /// Diagonal extension K~(x_vec, y_vec) used by the growth conditions.
    double tilde(const DiscreteSpace& space, const std::vector<int>& xs,
                 const std::vector<int>& ys) const;

private:
    Kind kind_ = Kind::cc_alpha;
    int m_ = 1;
    double alpha_ = 1.0;
    int n_ = 1;
    PointFn fn_;
    TildeFn tilde_;
};

/// Hard cap on m * N^m for sums over X^m; the operation refuses rather than
/// silently subsampling.
constexpr double kPotentialTermCap = 1e8;

/// Multilinear fractional integral I_{X,alpha}(f_vec)(x): direct evaluation
/// of the discrete sum, aggregated over distinct distances per slot.
double eval_I_alpha(const DiscreteSpace& space, double alpha,
                    const std::vector<std::vector<double>>& fs, int x);
std::vector<double> eval_I_alpha_all(const DiscreteSpace& space, double alpha,
                                     const std::vector<std::vector<double>>& fs);

/// General potential T(f_vec)(x) = sum over X^m of f_vec(y_vec) K(x,y_vec) mu(y_vec):
/// plain tuple enumeration against Kernel::value. Deliberately independent of
/// eval_I_alpha so the two act as cross-checking routes for cc_alpha.
double eval_potential(const DiscreteSpace& space, const Kernel& kernel,
                      const std::vector<std::vector<double>>& fs, int x);
std::vector<double> eval_potential_all(const DiscreteSpace& space, const Kernel& kernel,
                                       const std::vector<std::vector<double>>& fs);

/// Ball functional phi(B) = sup { K(x,y_vec) : (x,y_vec) in B^{m+1},
/// rho(x,y_vec) >= c r(B) }, cached per (center, radius).
class PhiFunctional {
public:
    PhiFunctional(Kernel kernel, double c, double eta);

    /// Largest c in {2^-j} whose constraint set is nonempty for every ball of
    /// the family (singletons are skipped: no positive c ever works there).
    static PhiFunctional with_auto_c(Kernel kernel, const DiscreteSpace& space,
                                     const std::vector<Ball>& family, double eta = 2.0);
    /// Constants matched to a dyadic tree so that the discretization argument
    /// goes through: c = 1/(2 kappa a1 A), eta >= r(B(X))/diam.
    static PhiFunctional for_tree(Kernel kernel, const DiscreteSpace& space,
                                  const DyadicTree& tree);

    double c() const { return c_; }
    double eta() const { return eta_; }
    const Kernel& kernel() const { return kernel_; }

    /// True when the admissible tuple set of B is nonempty.
    bool defined(const DiscreteSpace& space, const Ball& b) const;
    /// phi(B); throws input_error (suggesting a smaller c) when undefined.
    double operator()(const DiscreteSpace& space, const Ball& b) const;

private:
    struct Cache {
        std::mutex mu;
        std::map<std::pair<int, double>, double> values;
    };

    Kernel kernel_;
    double c_;
    double eta_;
    std::shared_ptr<Cache> cache_;  // shared across copies; same (c, eta) key space

    double compute(const DiscreteSpace& space, const Ball& b) const;
};

struct GrowthReport {
    double C = 0.0;             // smallest constant covering all sampled implications
    std::vector<int> witness_x, witness_y, witness_z;
    int witness_case = 0;       // 1 or 2: which implication attained C
    std::size_t samples = 0;
};

/// Sampled scan of the two growth implications for K~ at a given c > 1.
GrowthReport growth_check(const Kernel& kernel, const DiscreteSpace& space, double c,
                          std::size_t sample_size = 20000, std::uint64_t seed = 101);

struct MainAssumpReport {
    double C2 = 0.0;           // smallest feasible constant over the sample
    Ball outer, inner;         // attaining pair
    double ratio_at_witness = 1.0;  // r(B')/r(B) there
    std::size_t pairs = 0;
};

/// Measures C2 in phi(B') mu(B')^m <= C2 (r(B')/r(B))^eps phi(B) mu(B)^m over
/// sampled nested pairs with radii < C1 * diam.
MainAssumpReport mainassump_check(const PhiFunctional& phi, const DiscreteSpace& space,
                                  double eps, double C1, std::size_t max_pairs = 4000,
                                  std::uint64_t seed = 33);

/// M_mu(f_vec)(x) = sup over balls containing x of prod_i avg_B |f_i|.
double multilinear_maximal(const BallScanner& scanner,
                           const std::vector<std::vector<double>>& fs, int x);
std::vector<double> multilinear_maximal_all(const BallScanner& scanner,
                                            const std::vector<std::vector<double>>& fs);

/// M_s(g) = M_mu(|g|^s)^{1/s}, s >= 1.
double m_s_maximal(const BallScanner& scanner, const std::vector<double>& g, double s, int x);
std::vector<double> m_s_maximal_all(const BallScanner& scanner, const std::vector<double>& g,
                                    double s);

/// M_gamma f(x) = sup_{B containing x} gamma(B) * integral_B |f| dmu, for an
/// arbitrary ball functional gamma.
std::vector<double> m_gamma_maximal_all(const BallScanner& scanner, const std::vector<double>& f,
                                        const std::function<double(const Ball&)>& gamma);

/// Dyadic maximal M_{B(D)}(f_vec)(x) = sup over cubes containing x of
/// prod_i avg_{B(Q)} |f_i|.
struct DyadicMaximal {
    DyadicMaximal(const DyadicTree& tree, const DiscreteSpace& space,
                  const std::vector<std::vector<double>>& fs);
    double at(int x) const;
    std::vector<double> all() const;
    /// prod_i avg_{B(Q)} |f_i| for the cube at (depth, idx).
    double cube_average(std::size_t depth, std::size_t idx) const;

private:
    const DyadicTree* tree_;
    std::vector<std::vector<double>> avg_;  // [depth][cube]
    std::size_t npoints_;
};

struct DiscretizeReport {
    std::vector<double> lhs, rhs, margin;  // per point; margin = rhs - lhs
    double min_margin = kInf;
    int argmin = -1;
    double max_ratio = 0.0;  // max over points of lhs/rhs (rhs > 0)
};

/// Pointwise comparison of T(f_vec) with its dyadic majorant
/// sum_Q phi(B(Q)) * prod_i int_{B(Q)} f_i * chi_Q. Requires f_vec >= 0.
DiscretizeReport discretize_bound_check(const DiscreteSpace& space, const DyadicTree& tree,
                                        const PhiFunctional& phi,
                                        const std::vector<std::vector<double>>& fs);

struct StoppingCube {
    std::size_t depth = 0, idx = 0;
    double average = 0.0;       // prod_i avg_{B(Q)} f_i
    double e_mass = 0.0;        // mu(E_{k,j}) = mu(Q \ S^{k+1})
    double q_mass = 0.0;        // mu(Q_{k,j})
};

struct StoppingLevel {
    int k = 0;
    std::vector<StoppingCube> cubes;   // maximal cubes, disjoint
    std::vector<char> in_sk;           // point mask of S^k
};

struct StoppingDecomposition {
    double a = 0.0;
    int k1 = 0;                  // a^{k1} < avg(X) <= a^{k1+1}; INT_MIN when empty
    bool empty = false;          // f_vec identically zero
    std::vector<StoppingLevel> levels;  // k = k1+1 .. k_top, possibly none
    double gamma = 1.0;          // min mu(E)/mu(Q) over non-X stopping cubes
    double parent_step_constant = 0.0;  // max avg(Q_{k,j}) / a^k over non-X cubes
    bool two_sided_ok = true;    // avg(Q_{k,j}) <= a^{k+1} everywhere it applies
    double ck1_term = 0.0;       // bottom term phi(B(X)) mu(B(X))^m prod avg_i mu(X), gu == 1
};

/// Base suggested by the parent-comparison step: 2 * max(2, measured c).
double suggest_stopping_base(const DyadicTree& tree, const DiscreteSpace& space,
                             const std::vector<std::vector<double>>& fs);

StoppingDecomposition stopping_decomposition(const DyadicTree& tree, const DiscreteSpace& space,
                                             const std::vector<std::vector<double>>& fs, double a,
                                             const PhiFunctional* phi_for_ck1 = nullptr);

struct PackingReport {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
    double C = 0.0;  // assembled constant C2 * sum_l A^{-l eps}
    std::size_t terms = 0;
};

/// Lemma: sum over dyadic Q inside Q0 of phi(B(Q)) mu(B(Q))^m int_Q g u
/// against C * (the Q0 term). C1 gates the admissible radius of B(Q0).
PackingReport packing_sum_check(const DyadicTree& tree, const DiscreteSpace& space,
                                const PhiFunctional& phi, const std::vector<double>& g,
                                const std::vector<double>& u, std::size_t q0_depth,
                                std::size_t q0_idx, double C2, double eps, double C1 = 0.0);

}  // namespace ccp

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ccp {

/// Raised on malformed user input (bad file, bad flag value, bad parameter).
/// The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an operation is asked to do more work than the configured cap
/// (term counts, node counts). Deliberate refusal, not a numeric failure.
class cap_error : public std::runtime_error {
public:
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Global worker cap for parallel_for. 0 = hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Index-parallel loop with deterministic work assignment. Results must be
/// written by index; no ordering between bodies is guaranteed.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// FNV-1a 64-bit digest, used for input fingerprints in reports and cache keys.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);
std::string hex_digest(std::uint64_t h);

/// Deterministic RNG wrapper. All randomized samplers take one of these so
/// seeds recorded in reports reproduce runs exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(eng_);
    }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
    }
    std::uint64_t raw() { return eng_(); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline double sqr(double x) { return x * x; }

}  // namespace ccp

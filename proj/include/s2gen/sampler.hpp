#ifndef S2GEN_SAMPLER_HPP
#define S2GEN_SAMPLER_HPP

#include <variant>
#include <vector>

#include "s2gen/common.hpp"
#include "s2gen/rng.hpp"

namespace s2gen {

struct MixtureComponent {
    enum class Kind { Gaussian, Uniform } kind;
    double mu = 0.0;
    double sigma = 1.0;  // Gaussian only
    double lo = 0.0;     // Uniform: [min(0, mu), max(0, mu)]
    double hi = 0.0;
};

struct MixtureSpec {
    std::vector<double> weights;  // sum to 1
    std::vector<MixtureComponent> components;

    std::size_t k() const { return components.size(); }
};

struct ArmaSpec {
    std::vector<double> phi;    // AR coefficients, phi.size() == p
    std::vector<double> theta;  // MA coefficients, theta.size() == q

    int p() const { return static_cast<int>(phi.size()); }
    int q() const { return static_cast<int>(theta.size()); }

    /// sum(phi) < 1 and |phi_p| < 1.
    bool satisfies_stationarity_constraints() const;
};

struct InputSpec {
    std::variant<MixtureSpec, ArmaSpec> source;
    double threshold_p = 0.5;  // source-selection threshold used at draw time

    bool is_mixture() const { return source.index() == 0; }
};

struct SamplerParams {
    int k_max = 5;
    int p_max = 4;
    int q_max = 4;
    int max_retries = 1000;
};

MixtureSpec sample_mixture_spec(int k_max, Rng& rng);

/// Rejection-samples AR coefficients until the stationarity constraints hold
/// and a 4096-step probe simulation stays below 1e8 in magnitude.
ArmaSpec sample_arma_spec(int p_max, int q_max, Rng& rng, int max_retries = 1000);

/// channels x length matrix drawn from the spec. Mixture points are i.i.d.;
/// ARMA channels are independent recursions with zero-initialized history and
/// a discarded burn-in of 10*(p+q)+50 steps.
Matrix generate_series(const InputSpec& spec, int channels, int length, Rng& rng);

struct StandardizeResult {
    Matrix x;
    std::vector<bool> degenerate;  // per channel: std < 1e-12, returned as zeros
};

/// Per-channel (x - mean) / population_std.
StandardizeResult standardize(const Matrix& x);

}  // namespace s2gen

#endif

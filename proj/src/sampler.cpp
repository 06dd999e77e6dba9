#include "s2gen/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace s2gen {

bool ArmaSpec::satisfies_stationarity_constraints() const {
    double sum = 0.0;
    for (double c : phi) sum += c;
    return sum < 1.0 && std::fabs(phi.back()) < 1.0;
}

MixtureSpec sample_mixture_spec(int k_max, Rng& rng) {
    if (k_max < 1) throw std::invalid_argument("sample_mixture_spec: k_max must be >= 1");
    MixtureSpec spec;
    const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k_max)));
    spec.weights.resize(k);
    double sum = 0.0;
    for (double& w : spec.weights) {
        w = rng.uniform();
        sum += w;
    }
    if (sum <= 0.0) {
        std::fill(spec.weights.begin(), spec.weights.end(), 1.0 / k);
    } else {
        for (double& w : spec.weights) w /= sum;
    }
    spec.components.resize(k);
    for (MixtureComponent& c : spec.components) {
        c.mu = rng.normal();
        c.sigma = 1.0 - rng.uniform();  // (0, 1]
        c.kind = rng.uniform_int(2) == 0 ? MixtureComponent::Kind::Gaussian
                                         : MixtureComponent::Kind::Uniform;
        c.lo = std::min(0.0, c.mu);
        c.hi = std::max(0.0, c.mu);
    }
    return spec;
}

namespace {

// One ARMA step given the ring-buffered history.
double arma_step(const ArmaSpec& s, const std::vector<double>& y_hist,
                 const std::vector<double>& e_hist, double e_t) {
    double y = e_t;
    for (int i = 0; i < s.p(); ++i) y += s.phi[i] * y_hist[i];
    for (int j = 0; j < s.q(); ++j) y -= s.theta[j] * e_hist[j];
    return y;
}

void push_front(std::vector<double>& hist, double v) {
    if (hist.empty()) return;
    for (std::size_t i = hist.size() - 1; i > 0; --i) hist[i] = hist[i - 1];
    hist[0] = v;
}

// Zero-history simulation used both for the spec probe and for generation.
// Returns false if any value exceeds `cap` in magnitude or is non-finite.
bool simulate_arma(const ArmaSpec& s, int steps, int discard, double cap, Rng& rng,
                   double* out) {
    std::vector<double> y_hist(s.p(), 0.0);
    std::vector<double> e_hist(s.q(), 0.0);
    for (int t = 0; t < discard + steps; ++t) {
        const double e_t = rng.normal();
        const double y = arma_step(s, y_hist, e_hist, e_t);
        if (!std::isfinite(y) || std::fabs(y) > cap) return false;
        push_front(y_hist, y);
        push_front(e_hist, e_t);
        if (t >= discard && out) out[t - discard] = y;
    }
    return true;
}

}  // namespace

ArmaSpec sample_arma_spec(int p_max, int q_max, Rng& rng, int max_retries) {
    if (p_max < 1 || q_max < 1)
        throw std::invalid_argument("sample_arma_spec: p_max and q_max must be >= 1");
    ArmaSpec spec;
    const int p = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p_max)));
    const int q = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(q_max)));
    spec.theta.resize(q);
    for (double& th : spec.theta) th = rng.uniform(-1.0, 1.0);
    spec.phi.resize(p);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        for (double& ph : spec.phi) ph = rng.uniform(-1.0, 1.0);
        if (!spec.satisfies_stationarity_constraints()) continue;
        // The sum constraint does not exclude every explosive coefficient set
        // at p >= 3, so probe-simulate before accepting.
        if (!simulate_arma(spec, 4096, 0, 1e8, rng, nullptr)) continue;
        return spec;
    }
    throw SamplingExhaustedError(
        "sample_arma_spec: no stationary coefficients within max_retries");
}

Matrix generate_series(const InputSpec& spec, int channels, int length, Rng& rng) {
    if (channels < 1 || length < 1)
        throw std::invalid_argument("generate_series: channels and length must be >= 1");
    Matrix x(static_cast<std::size_t>(channels), static_cast<std::size_t>(length));
    if (const auto* mix = std::get_if<MixtureSpec>(&spec.source)) {
        const std::size_t k = mix->k();
        for (int m = 0; m < channels; ++m) {
            double* row = x.row(static_cast<std::size_t>(m));
            for (int t = 0; t < length; ++t) {
                const double u = rng.uniform();
                std::size_t j = 0;
                double acc = 0.0;
                for (; j + 1 < k; ++j) {
                    acc += mix->weights[j];
                    if (u < acc) break;
                }
                const MixtureComponent& c = mix->components[j];
                row[t] = c.kind == MixtureComponent::Kind::Gaussian
                             ? c.mu + c.sigma * rng.normal()
                             : c.lo + (c.hi - c.lo) * rng.uniform();
            }
        }
        return x;
    }
    const auto& arma = std::get<ArmaSpec>(spec.source);
    const int burn_in = 10 * (arma.p() + arma.q()) + 50;
    for (int m = 0; m < channels; ++m) {
        if (!simulate_arma(arma, length, burn_in, 1e30, rng,
                           x.row(static_cast<std::size_t>(m))))
            throw std::runtime_error("generate_series: ARMA simulation diverged");
    }
    return x;
}

StandardizeResult standardize(const Matrix& x) {
    StandardizeResult res;
    res.x = Matrix(x.rows, x.cols);
    res.degenerate.assign(x.rows, false);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* in = x.row(r);
        double* out = res.x.row(r);
        double mean = 0.0;
        for (std::size_t t = 0; t < x.cols; ++t) mean += in[t];
        mean /= static_cast<double>(x.cols);
        double var = 0.0;
        for (std::size_t t = 0; t < x.cols; ++t) {
            const double d = in[t] - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(x.cols));
        if (sd < 1e-12) {
            res.degenerate[r] = true;
            for (std::size_t t = 0; t < x.cols; ++t) out[t] = 0.0;
        } else {
            for (std::size_t t = 0; t < x.cols; ++t) out[t] = (in[t] - mean) / sd;
        }
    }
    return res;
}

}  // namespace s2gen

#include "bslms/mg_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bslms/errors.hpp"
#include "bslms/rng.hpp"

namespace bslms::mg {

void MGParams::validate() const {
    if (length == 0) throw DomainError("mg: L must be positive");
    if (!(p1 > 0.0 && p1 < 1.0)) throw DomainError("mg: p1 must lie in (0, 1), got " + std::to_string(p1));
    if (!(p2 > 0.0 && p2 < 1.0)) throw DomainError("mg: p2 must lie in (0, 1), got " + std::to_string(p2));
    if (!(sigma_s2 > 0.0) || !std::isfinite(sigma_s2)) throw DomainError("mg: sigma_s2 must be positive");
}

std::vector<double> generate_system(const MGParams& params, std::uint64_t seed) {
    params.validate();
    Engine engine(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    // Support first, then amplitudes in tap order.
    std::vector<bool> nonzero(params.length);
    bool state = false;  // s_0 = 0
    for (std::size_t k = 0; k < params.length; ++k) {
        const double u = uniform(engine);
        state = state ? (u < params.p2) : !(u < params.p1);
        nonzero[k] = state;
    }
    std::normal_distribution<double> amplitude(0.0, std::sqrt(params.sigma_s2));
    std::vector<double> s(params.length, 0.0);
    for (std::size_t k = 0; k < params.length; ++k) {
        if (nonzero[k]) s[k] = amplitude(engine);
    }
    return s;
}

std::vector<double> generate_system(const MGParams& params, std::uint64_t master_seed, std::size_t index) {
    return generate_system(params, derive_seed(master_seed, Stream::System, {index}));
}

EnsembleStats ensemble_stats(const MGParams& params) {
    params.validate();
    const double p1 = params.p1;
    const double p2 = params.p2;
    return {(1.0 - p1) / (2.0 - p1 - p2), 1.0 / (1.0 - p2), 1.0 / (1.0 - p1)};
}

double border_effect_q(const MGParams& params, std::size_t group_size) {
    if (group_size == 0) throw DomainError("border_effect_q: P must be >= 1");
    const auto stats = ensemble_stats(params);
    const double L = static_cast<double>(params.length);
    return L * (1.0 - (1.0 - stats.s_bar) * std::pow(params.p1, static_cast<double>(group_size - 1)));
}

std::vector<double> group_occupancy_pmf(const MGParams& params, std::size_t group_size) {
    params.validate();
    if (group_size == 0) throw DomainError("group_occupancy_pmf: P must be >= 1");
    const double p1 = params.p1;
    const double p2 = params.p2;
    const double norm = 2.0 - p1 - p2;
    const std::size_t P = group_size;
    const double Pm1 = static_cast<double>(P - 1);

    std::vector<double> pmf(P + 1, 0.0);
    const double all_zero = (1.0 - p2) / norm * std::pow(p1, Pm1);
    const double all_nonzero = (1.0 - p1) / norm * std::pow(p2, Pm1);
    pmf[0] = all_zero;
    pmf[P] += all_nonzero;  // P == 1 lands here too
    if (P < 2) return pmf;

    const double interior = 1.0 - ((1.0 - p2) * std::pow(p1, Pm1) + (1.0 - p1) * std::pow(p2, Pm1)) / norm;
    const double log_ratio = std::log(p2 / p1);
    for (std::size_t m = 1; m < P; ++m) {
        double weight;
        if (std::abs(log_ratio) < 1e-14) {
            weight = 1.0 / Pm1;  // p1 == p2: continuous limit of the geometric weights
        } else {
            // (1 - r) / (1 - r^(P-1)) * r^(m-1) with r = p2/p1, via expm1 for r near 1
            weight = std::expm1(log_ratio) / std::expm1(Pm1 * log_ratio) *
                     std::exp(static_cast<double>(m - 1) * log_ratio);
        }
        pmf[m] = interior * weight;
    }
    return pmf;
}

IsingParameters ising_parameters(const MGParams& params) {
    params.validate();
    const double p1 = params.p1;
    const double p2 = params.p2;
    const std::size_t L = params.length;
    const double boundary = 0.25 * std::log(p2 * (1.0 - p1) / (p1 * (1.0 - p2)));
    const double inner = 0.5 * std::log(p2 / p1);
    const double coupling = 0.25 * std::log(p1 * p2 / ((1.0 - p1) * (1.0 - p2)));

    IsingParameters out;
    out.zeta.assign(L, inner);
    out.zeta.front() = boundary;
    out.zeta.back() = boundary;
    out.zeta_prime.assign(L - 1, coupling);
    return out;
}

}  // namespace bslms::mg

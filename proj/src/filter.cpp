#include "bslms/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bslms/errors.hpp"

namespace bslms {

namespace {

std::vector<double> padded_copy(std::span<const double> u, std::size_t padded) {
    std::vector<double> out(padded, 0.0);
    std::copy(u.begin(), u.end(), out.begin());
    return out;
}

void require_length(std::span<const double> u, std::size_t expected, const char* what) {
    if (u.size() != expected) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                             ", got " + std::to_string(u.size()));
    }
}

double group_norm(const double* first, std::size_t size) {
    double acc = 0.0;
    for (std::size_t j = 0; j < size; ++j) acc += first[j] * first[j];
    return std::sqrt(acc);
}

// Multiplier c such that g_k = c * w_k for every tap in a group of norm E.
// Written as 2a(a - max(1/(E+delta), a)) so that it is exactly zero for
// groups outside the attraction range.
inline double attraction_factor(double norm, double alpha, double delta) {
    const double denom = norm + delta;
    if (!(denom > 0.0)) return 0.0;  // all-zero group, g vanishes identically
    const double inv = 1.0 / denom;
    return 2.0 * alpha * (alpha - std::max(inv, alpha));
}

}  // namespace

std::size_t FilterConfig::padded_taps() const noexcept {
    if (group_size == 0) return taps;
    return (taps + group_size - 1) / group_size * group_size;
}

void FilterConfig::validate() const {
    if (taps == 0) throw DomainError("filter: L must be positive");
    if (group_size == 0 || group_size > taps) {
        throw DomainError("filter: P must satisfy 1 <= P <= L (P=" + std::to_string(group_size) +
                          ", L=" + std::to_string(taps) + ")");
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("filter: mu must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("filter: alpha must be positive");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("filter: kappa must be non-negative");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("filter: delta must be non-negative");
}

double FilterConfig::max_step_size(double sigma_x2) const {
    return 2.0 / ((static_cast<double>(taps) + 2.0) * sigma_x2);
}

void FilterConfig::check_step_size(double sigma_x2) const {
    const double mu_max = max_step_size(sigma_x2);
    if (!(mu > 0.0 && mu < mu_max)) {
        throw DomainError("step-size mu=" + std::to_string(mu) + " violates 0 < mu < mu_max=" +
                          std::to_string(mu_max) + " (2/((L+2) sigma_x^2))");
    }
}

FilterState::FilterState(const FilterConfig& cfg)
    : taps_(cfg.taps),
      weights_(cfg.padded_taps(), 0.0),
      factors_(cfg.groups(), 0.0),
      history_(2 * cfg.taps, 0.0) {}

void FilterState::set_weights(std::span<const double> w) {
    require_length(w, taps_, "set_weights");
    std::copy(w.begin(), w.end(), weights_.begin());
}

void FilterState::push(double x) noexcept {
    head_ = head_ == 0 ? taps_ - 1 : head_ - 1;
    history_[head_] = x;
    history_[head_ + taps_] = x;
}

std::size_t mixed_l20_norm(std::span<const double> u, std::size_t group_size) {
    if (group_size == 0 || u.size() % group_size != 0) {
        throw DimensionError("mixed_l20_norm: length " + std::to_string(u.size()) +
                             " is not divisible by P=" + std::to_string(group_size));
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.size(); i += group_size) {
        const bool nonzero = std::any_of(u.begin() + i, u.begin() + i + group_size,
                                         [](double v) { return v != 0.0; });
        count += nonzero ? 1 : 0;
    }
    return count;
}

std::vector<double> group_zero_attraction(std::span<const double> u, const FilterConfig& cfg) {
    require_length(u, cfg.taps, "group_zero_attraction");
    const std::size_t P = cfg.group_size;
    if (P == 0) throw DimensionError("group_zero_attraction: P must be positive");
    auto w = padded_copy(u, cfg.padded_taps());
    std::vector<double> g(cfg.taps, 0.0);
    for (std::size_t i = 0; i < w.size(); i += P) {
        const double norm = group_norm(&w[i], P);
        if (norm == 0.0) continue;
        const double factor = attraction_factor(norm, cfg.alpha, cfg.delta);
        for (std::size_t k = i; k < std::min(i + P, cfg.taps); ++k) g[k] = factor * w[k];
    }
    return g;
}

std::vector<double> group_zero_attraction_exact(std::span<const double> u, std::size_t group_size,
                                                double alpha) {
    if (group_size == 0) throw DimensionError("group_zero_attraction_exact: P must be positive");
    const std::size_t padded = (u.size() + group_size - 1) / group_size * group_size;
    auto w = padded_copy(u, padded);
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t i = 0; i < padded; i += group_size) {
        const double norm = group_norm(&w[i], group_size);
        if (!(norm > 0.0 && norm <= 1.0 / alpha)) continue;
        for (std::size_t k = i; k < std::min(i + group_size, u.size()); ++k) {
            g[k] = 2.0 * alpha * alpha * w[k] - 2.0 * alpha * w[k] / norm;
        }
    }
    return g;
}

double bs_lms_step(FilterState& state, double x_new, double d, const FilterConfig& cfg) {
    if (!std::isfinite(x_new) || !std::isfinite(d)) {
        throw NumericError("bs_lms_step: non-finite input at iteration " +
                           std::to_string(state.n_));
    }
    const std::size_t L = state.taps_;
    const std::size_t P = cfg.group_size;
    if (L != cfg.taps || state.weights_.size() != cfg.padded_taps()) {
        throw DimensionError("bs_lms_step: state does not match configuration");
    }

    state.push(x_new);
    double* w = state.weights_.data();
    const double* x = state.history_.data() + state.head_;

    double y = 0.0;
    for (std::size_t k = 0; k < L; ++k) y += x[k] * w[k];
    const double e = d - y;
    const double mu_e = cfg.mu * e;

    double energy = 0.0;
    if (cfg.kappa == 0.0) {
        for (std::size_t k = 0; k < L; ++k) {
            w[k] = w[k] + mu_e * x[k];
            energy += w[k] * w[k];
        }
    } else {
        // Norms come from the pre-update weights; each tap then only reads
        // its own old value, so the update below is synchronous.
        const std::size_t groups = state.factors_.size();
        for (std::size_t i = 0; i < groups; ++i) {
            state.factors_[i] = attraction_factor(group_norm(w + i * P, P), cfg.alpha, cfg.delta);
        }
        for (std::size_t i = 0; i < groups; ++i) {
            const double c = cfg.kappa * state.factors_[i];
            const std::size_t end = std::min((i + 1) * P, L);
            for (std::size_t k = i * P; k < end; ++k) {
                w[k] = (w[k] + mu_e * x[k]) + c * w[k];
                energy += w[k] * w[k];
            }
        }
    }
    if (!std::isfinite(energy)) {
        throw DivergenceError(state.n_, "bs_lms_step: weights diverged at iteration " +
                                            std::to_string(state.n_));
    }
    ++state.n_;
    return e;
}

CoefficientClasses classify_coefficients(std::span<const double> s, const FilterConfig& cfg) {
    require_length(s, cfg.taps, "classify_coefficients");
    const std::size_t P = cfg.group_size;
    if (P == 0) throw DimensionError("classify_coefficients: P must be positive");
    const auto w = padded_copy(s, cfg.padded_taps());
    CoefficientClasses out;
    for (std::size_t i = 0; i < w.size(); i += P) {
        const double norm = group_norm(&w[i], P);
        auto& bucket = norm == 0.0 ? out.zero : (norm >= 1.0 / cfg.alpha ? out.large : out.small);
        for (std::size_t k = i; k < std::min(i + P, cfg.taps); ++k) bucket.push_back(k);
    }
    out.q = out.large.size() + out.small.size();
    return out;
}

}  // namespace bslms

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bslms {

/// Hyperparameters of the block-sparse LMS filter.
///
/// `taps` is the system length L as requested by the caller. When L is not a
/// multiple of `group_size`, the filter internally appends zero taps so that
/// every group is complete; those taps never adapt and are never reported.
struct FilterConfig {
    std::size_t taps = 0;        ///< L
    std::size_t group_size = 1;  ///< P, 1 <= P <= L
    double mu = 0.0;             ///< step-size
    double alpha = 1.0;          ///< attraction range; groups with norm >= 1/alpha are left alone
    double kappa = 0.0;          ///< penalty intensity
    double delta = 1e-8;         ///< denominator regularizer of the attraction term

    std::size_t padded_taps() const noexcept;
    std::size_t groups() const noexcept { return group_size == 0 ? 0 : padded_taps() / group_size; }

    /// Throws DomainError for P outside [1, L] or a non-positive mu/alpha,
    /// a negative kappa or delta.
    void validate() const;

    /// 2 / ((L + 2) sigma_x^2), the largest step-size for which the
    /// mean-square recursion converges.
    double max_step_size(double sigma_x2) const;

    /// Throws DomainError naming mu_max when mu is outside (0, mu_max).
    void check_step_size(double sigma_x2) const;
};

/// Tap weights and input history of one filter instance.
class FilterState {
public:
    explicit FilterState(const FilterConfig& cfg);

    /// w_n, length L (padding excluded).
    std::span<const double> weights() const noexcept { return {weights_.data(), taps_}; }
    /// [x_n, x_{n-1}, ..., x_{n-L+1}], zero-filled before the first L samples.
    std::span<const double> delay_line() const noexcept { return {history_.data() + head_, taps_}; }
    std::uint64_t iteration() const noexcept { return n_; }

    /// Overwrite the first L weights (e.g. to start from a non-zero point).
    void set_weights(std::span<const double> w);

private:
    friend double bs_lms_step(FilterState&, double, double, const FilterConfig&);

    void push(double x) noexcept;

    std::size_t taps_;
    std::vector<double> weights_;  // padded_taps() entries, tail stays zero
    std::vector<double> factors_;  // per-group attraction multipliers (scratch)
    std::vector<double> history_;  // 2L mirror buffer, window starts at head_
    std::size_t head_ = 0;
    std::uint64_t n_ = 0;
};

/// Index sets (0-based) of taps grouped by the norm of their group in s.
struct CoefficientClasses {
    std::vector<std::size_t> large;  ///< group norm >= 1/alpha
    std::vector<std::size_t> small;  ///< 0 < group norm < 1/alpha
    std::vector<std::size_t> zero;   ///< group norm == 0
    std::size_t q = 0;               ///< |large| + |small|
};

/// Number of groups of size P with non-zero Euclidean norm.
std::size_t mixed_l20_norm(std::span<const double> u, std::size_t group_size);

/// Group zero-point attraction as implemented (regularized by delta and
/// clamped by max(., alpha)). `u` has length cfg.taps.
std::vector<double> group_zero_attraction(std::span<const double> u, const FilterConfig& cfg);

/// Unregularized piecewise attraction:
///   g_k = 2 alpha^2 u_k - 2 alpha u_k / ||u_group||  if 0 < ||u_group|| <= 1/alpha, else 0.
/// The delta -> 0 limit of group_zero_attraction; the theory is written in terms of it.
std::vector<double> group_zero_attraction_exact(std::span<const double> u, std::size_t group_size,
                                                double alpha);

/// One synchronous update w <- w + mu e x + kappa g(w). Returns the a priori
/// error e = d - x^T w. Throws NumericError on non-finite input and
/// DivergenceError when a weight becomes non-finite.
double bs_lms_step(FilterState& state, double x_new, double d, const FilterConfig& cfg);

CoefficientClasses classify_coefficients(std::span<const double> s, const FilterConfig& cfg);

/// Convenience owner of a configuration and its state.
class BsLmsFilter {
public:
    explicit BsLmsFilter(FilterConfig cfg) : cfg_((cfg.validate(), cfg)), state_(cfg_) {}

    double step(double x_new, double d) { return bs_lms_step(state_, x_new, d, cfg_); }

    const FilterConfig& config() const noexcept { return cfg_; }
    const FilterState& state() const noexcept { return state_; }
    std::span<const double> weights() const noexcept { return state_.weights(); }

private:
    FilterConfig cfg_;
    FilterState state_;
};

}  // namespace bslms

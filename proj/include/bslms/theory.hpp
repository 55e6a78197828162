#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bslms/filter.hpp"
#include "bslms/mg_model.hpp"

// Closed-form mean-square analysis of BS-LMS for white Gaussian input.
//
// Two branches live here. The per-system branch takes a known response s and
// predicts the steady-state MSD as a function of kappa, its minimizer, and the
// three-mode learning curve. The averaged branch replaces the per-system
// quantities (Q, G(s), G'(s), ||s||^2) by their expectations under the
// Markov-Gaussian model, which gives the average minimum steady-state MSD, the
// best group size and the averaged learning curve.
//
// Results that leave the regime where the approximations hold carry
// Diagnostic entries; nothing is clamped silently.

namespace bslms::theory {

struct Diagnostic {
    std::string code;     ///< stable identifier, e.g. "beta_order", "lambda_range"
    std::string message;  ///< human-readable detail
};

/// theta(P): P = 1 -> 1, P = 2 -> pi/4, P = 3 -> 2/3, ... (log-gamma based).
double theta(std::size_t group_size);

struct PenaltyMoments {
    double g = 0.0;        ///< G(s)  = sum over small-group taps of g_k(s)^2
    double g_prime = 0.0;  ///< G'(s) = sum over small-group taps of s_k g_k(s)
};

/// Uses the unregularized attraction (delta = 0).
PenaltyMoments penalty_moments(std::span<const double> s, const FilterConfig& cfg);

/// Per-system constants. `omega` is evaluated at `kappa`.
struct TheoryConstants {
    std::size_t taps = 0;
    std::size_t group_size = 1;
    double mu = 0.0;
    double alpha = 1.0;
    double kappa = 0.0;
    double sigma_x2 = 1.0;
    double sigma_v2 = 0.0;

    double q = 0.0;  ///< taps in nonzero groups (real-valued so that Q-bar fits too)
    double norm2 = 0.0;
    double g_s = 0.0;
    double g_prime_s = 0.0;

    double delta_L = 0.0;
    double delta_Q = 0.0;
    double delta_0 = 0.0;
    double delta_0_prime = 0.0;
    double theta_p = 1.0;
    std::array<double, 4> beta{};  ///< beta_0 .. beta_3
    double omega = 0.0;

    std::vector<Diagnostic> diagnostics;
};

/// Throws DomainError when mu violates 0 < mu < 2/((L+2) sigma_x^2).
TheoryConstants constants_from_moments(std::size_t taps, std::size_t group_size, double mu, double alpha,
                                       double kappa, double sigma_x2, double sigma_v2, double q,
                                       double g_s, double g_prime_s, double norm2);

TheoryConstants compute_constants(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                                  double sigma_v2);

/// mu sigma_v^2 L / Delta_L + beta1 kappa^2 - beta2 kappa sqrt(kappa^2 + beta3).
double steady_state_msd(double kappa, const TheoryConstants& c);

struct KappaOptimum {
    double kappa = 0.0;
    double d_min = 0.0;
};

/// Minimizer of steady_state_msd over kappa and the minimum value.
/// Throws DegenerateTheoryError unless beta1 > beta2 >= 0 and beta3 > 0.
KappaOptimum kappa_opt(const TheoryConstants& c);

/// Expected steady-state misalignment per tap, kappa / (mu sigma_x^2) g_k(s).
std::vector<double> steady_state_bias(std::span<const double> s, const FilterConfig& cfg, double sigma_x2);

/// a w^2 + b w + c = 0 from which omega is taken.
struct OmegaQuadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double residual(double omega) const { return (a * omega + b) * omega + c; }
    /// Largest magnitude among the evaluated terms, for relative residual checks.
    double scale(double omega) const;
};

OmegaQuadratic omega_quadratic(const TheoryConstants& c, double kappa);

/// Positive root of omega_quadratic. Throws DegenerateTheoryError when the
/// constant term is not negative (no unique positive root).
double omega_solve(const TheoryConstants& c, double kappa);

/// D_n = c1 l1^n + c2 l2^n + c3 l3^n + D_inf.
struct TransientModel {
    std::array<double, 3> lambdas{};
    std::array<double, 3> coeffs{};
    double d_inf = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    std::vector<Diagnostic> diagnostics;

    double msd(std::size_t n) const;
    std::vector<double> curve(std::size_t iterations) const;
};

/// Three-mode per-system learning curve for a zero-initialized filter.
/// lambda1 >= lambda2 are the eigenvalues of the 2x2 coupling matrix. Throws
/// DegenerateTheoryError when those eigenvalues are complex.
TransientModel transient_model(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                               double sigma_v2, double kappa);

TransientModel transient_from_constants(const TheoryConstants& c, double kappa);

/// F_alpha(m) and F'_alpha(m): expectations of sum g_k^2 and sum s_k g_k over
/// one group holding m i.i.d. N(0, sigma_s^2) taps (zero unless the group is
/// inside the attraction range).
struct FAlphaMoments {
    double f = 0.0;
    double f_prime = 0.0;
};

FAlphaMoments f_alpha_moments(std::size_t m, double alpha, double sigma_s);

/// Expected per-system quantities and the averaged learning curve.
struct AveragedTheory {
    std::size_t group_size = 1;
    double mu = 0.0;
    double q_bar = 0.0;
    double delta_q_bar = 0.0;
    double g_bar = 0.0;
    double g_prime_bar = 0.0;
    double norm2_bar = 0.0;
    double theta_p = 1.0;
    double ams_msd = 0.0;  ///< average minimum steady-state MSD
    std::array<double, 3> lambdas_prime{};
    std::array<double, 3> coeffs_prime{};
    double kappa = 0.0;  ///< optimal kappa computed from the expected quantities
    double omega = 0.0;
    bool has_transient = false;
    std::vector<Diagnostic> diagnostics;

    double msd(std::size_t n) const;
    std::vector<double> curve(std::size_t iterations) const;
};

AveragedTheory averaged_theory(const mg::MGParams& params, std::size_t group_size, double mu, double alpha,
                               double sigma_x2, double sigma_v2);

/// Only the average minimum steady-state MSD (cheap; no transient part).
double average_min_msd(const mg::MGParams& params, std::size_t group_size, double mu, double alpha,
                       double sigma_x2, double sigma_v2);

/// argmin over P in 1..p_max of average_min_msd; ties go to the smaller P.
std::size_t p_opt(const mg::MGParams& params, double mu, double alpha, double sigma_x2, double sigma_v2,
                  std::size_t p_max);

/// Model condition under which the optimal partition converges faster than
/// P = 1 at equal misadjustment: (1 - p1) / (1 - p2)^2 >= 1 / (3 (1 - e^-1)).
double rate_condition_ratio(const mg::MGParams& params);
double rate_condition_threshold();
bool rate_condition_holds(const mg::MGParams& params);

/// Step-size for group size P at which average_min_msd equals `target`,
/// found by bisection on (0, mu_max). Throws DomainError when the target is
/// not bracketed.
double equalize_step_size(const mg::MGParams& params, std::size_t group_size, double target, double alpha,
                          double sigma_x2, double sigma_v2);

/// Expected ||s||^2 under the model times sigma_x^2 10^(-snr/10).
double noise_variance_for_snr(const mg::MGParams& params, double sigma_x2, double snr_db);

}  // namespace bslms::theory

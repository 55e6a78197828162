#include "bslms/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bslms/errors.hpp"
#include "bslms/special.hpp"

namespace bslms::theory {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt8OverPi = std::sqrt(8.0 / kPi);

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// theta(P) sqrt(8/pi) kappa alpha Delta_0 / omega, the coupling term of A.
double coupling_term(const TheoryConstants& c, double kappa, double omega) {
    if (kappa == 0.0) return 0.0;
    return c.theta_p * kSqrt8OverPi * kappa * c.alpha * c.delta_0 / omega;
}

// Initial increment b_{0,0} of the MSD recursion for a zero-initialized filter.
double initial_drive(const TheoryConstants& c, double kappa, double omega) {
    const double L = static_cast<double>(c.taps);
    const double P = static_cast<double>(c.group_size);
    const double mx = c.mu * c.sigma_x2;
    return L * c.mu * c.mu * c.sigma_x2 * c.sigma_v2 +
           (L - c.q) * (4.0 * c.alpha * c.alpha * kappa * kappa / P -
                        c.theta_p * kSqrt8OverPi * kappa * c.delta_0 * c.alpha * omega) +
           kappa * kappa * (c.delta_0_prime - 2.0 * c.delta_0) / mx * c.g_s -
           2.0 * kappa * c.delta_0 * c.g_prime_s;
}

// Coefficient of the Delta_0^n mode given det(lambda_3 I - A).
double third_mode_coeff(const TheoryConstants& c, double kappa, double coupling, double det) {
    if (kappa == 0.0) return 0.0;
    const double mx = c.mu * c.sigma_x2;
    return -(2.0 * kappa * c.delta_0 / mx) * (mx - 2.0 * mx * mx + coupling) / det *
           (kappa * c.g_s + mx * c.g_prime_s);
}

// Fit c1, c2 to D_0 = ||s||^2 and D_1 = (1 - mu sx2 Delta_L) ||s||^2 + b_00.
std::array<double, 2> fit_leading_modes(const TheoryConstants& c, double l1, double l2, double c3, double l3,
                                        double b00, double d_inf) {
    if (l1 == l2) throw DegenerateTheoryError("transient: repeated eigenvalue, modes not separable");
    const double d0 = c.norm2 - c3 - d_inf;
    const double d1 = (1.0 - c.mu * c.sigma_x2 * c.delta_L) * c.norm2 + b00 - d_inf - c3 * l3;
    return {(d1 - l2 * d0) / (l1 - l2), (d1 - l1 * d0) / (l2 - l1)};
}

double omega_or_lms_root(const TheoryConstants& c, double kappa) {
    if (kappa == 0.0 && c.sigma_v2 == 0.0) return 0.0;
    return omega_solve(c, kappa);
}

void check_lambda(std::vector<Diagnostic>& diags, const char* name, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        diags.push_back({"lambda_range", std::string(name) + " = " + num(lambda) + " lies outside (0, 1)"});
    }
}

}  // namespace

double theta(std::size_t group_size) {
    if (group_size == 0) throw DomainError("theta: P must be >= 1");
    const double P = static_cast<double>(group_size);
    double log_value;
    if (group_size % 2 == 1) {
        log_value = 2.0 * std::lgamma((P - 1.0) / 2.0 + 1.0) + (P - 1.0) * std::numbers::ln2 - std::lgamma(P + 1.0);
    } else {
        log_value = std::lgamma(P) + std::log(kPi) - std::lgamma(P / 2.0 + 1.0) - std::lgamma(P / 2.0) -
                    P * std::numbers::ln2;
    }
    return std::exp(log_value);
}

PenaltyMoments penalty_moments(std::span<const double> s, const FilterConfig& cfg) {
    const auto g = group_zero_attraction_exact(s, cfg.group_size, cfg.alpha);
    const auto classes = classify_coefficients(s, cfg);
    PenaltyMoments out;
    for (auto k : classes.small) {
        out.g += g[k] * g[k];
        out.g_prime += s[k] * g[k];
    }
    return out;
}

TheoryConstants constants_from_moments(std::size_t taps, std::size_t group_size, double mu, double alpha,
                                       double kappa, double sigma_x2, double sigma_v2, double q, double g_s,
                                       double g_prime_s, double norm2) {
    FilterConfig probe{taps, group_size, mu, alpha, kappa, 0.0};
    probe.check_step_size(sigma_x2);

    TheoryConstants c;
    c.taps = taps;
    c.group_size = group_size;
    c.mu = mu;
    c.alpha = alpha;
    c.kappa = kappa;
    c.sigma_x2 = sigma_x2;
    c.sigma_v2 = sigma_v2;
    c.q = q;
    c.g_s = g_s;
    c.g_prime_s = g_prime_s;
    c.norm2 = norm2;

    const double L = static_cast<double>(taps);
    const double P = static_cast<double>(group_size);
    const double mx = mu * sigma_x2;
    c.delta_L = 2.0 - (L + 2.0) * mx;
    c.delta_Q = 2.0 - (q + 2.0) * mx;
    c.delta_0 = 1.0 - mx;
    c.delta_0_prime = 2.0 - mx;
    c.theta_p = theta(group_size);

    const double th2 = c.theta_p * c.theta_p;
    const double a2 = alpha * alpha;
    const double beta0 = mx * c.delta_0_prime * c.delta_L * g_s +
                         4.0 * a2 * c.delta_Q * (mx * c.delta_L / P + c.delta_0 * c.delta_Q * th2 / kPi);
    const double beta1 = (c.delta_0_prime * g_s +
                          4.0 * (L - q) * a2 * (mx / P + 2.0 * c.delta_0 * c.delta_Q * th2 / (kPi * c.delta_L))) /
                         (mx * mx * c.delta_L);
    const double beta2 = 4.0 * alpha * (L - q) * c.theta_p / (mx * mx * c.delta_L * c.delta_L) *
                         std::sqrt(c.delta_0 * beta0 / kPi);
    const double beta3 = 2.0 * mx * mx * mu * sigma_v2 * c.delta_0 * c.delta_L / beta0;
    c.beta = {beta0, beta1, beta2, beta3};

    if (!(beta0 > 0.0)) c.diagnostics.push_back({"beta0_sign", "beta0 = " + num(beta0) + " is not positive"});
    if (!(beta1 > beta2 && beta2 >= 0.0)) {
        c.diagnostics.push_back({"beta_order", "beta1 = " + num(beta1) + ", beta2 = " + num(beta2) +
                                                   " violate beta1 > beta2 >= 0"});
    }
    if (kappa > 0.0 || sigma_v2 > 0.0) {
        try {
            c.omega = omega_solve(c, kappa);
        } catch (const DegenerateTheoryError& e) {
            c.diagnostics.push_back({"omega_root", e.what()});
        }
    }
    return c;
}

TheoryConstants compute_constants(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                                  double sigma_v2) {
    if (s.size() != cfg.taps) {
        throw DimensionError("compute_constants: system length " + std::to_string(s.size()) +
                             " does not match L=" + std::to_string(cfg.taps));
    }
    const auto classes = classify_coefficients(s, cfg);
    const auto moments = penalty_moments(s, cfg);
    double norm2 = 0.0;
    for (double v : s) norm2 += v * v;
    return constants_from_moments(cfg.taps, cfg.group_size, cfg.mu, cfg.alpha, cfg.kappa, sigma_x2, sigma_v2,
                                  static_cast<double>(classes.q), moments.g, moments.g_prime, norm2);
}

double steady_state_msd(double kappa, const TheoryConstants& c) {
    const double L = static_cast<double>(c.taps);
    const auto& b = c.beta;
    return c.mu * c.sigma_v2 * L / c.delta_L + b[1] * kappa * kappa - b[2] * kappa * std::sqrt(kappa * kappa + b[3]);
}

KappaOptimum kappa_opt(const TheoryConstants& c) {
    const auto& b = c.beta;
    const double L = static_cast<double>(c.taps);
    if (b[2] == 0.0 && b[1] >= 0.0) return {0.0, c.mu * c.sigma_v2 * L / c.delta_L};
    if (!(b[1] > b[2] && b[2] >= 0.0)) {
        throw DegenerateTheoryError("kappa_opt: beta1 = " + num(b[1]) + " must exceed beta2 = " + num(b[2]) +
                                    " (approximation regime violated)");
    }
    if (!(b[3] >= 0.0)) throw DegenerateTheoryError("kappa_opt: beta3 = " + num(b[3]) + " is negative");
    const double ratio = (b[1] + b[2]) / (b[1] - b[2]);
    const double root = std::pow(ratio, 0.25);
    KappaOptimum out;
    out.kappa = std::sqrt(b[3]) / 2.0 * (root - 1.0 / root);
    out.d_min = c.mu * c.sigma_v2 * L / c.delta_L + b[3] / 2.0 * (std::sqrt(b[1] * b[1] - b[2] * b[2]) - b[1]);
    return out;
}

std::vector<double> steady_state_bias(std::span<const double> s, const FilterConfig& cfg, double sigma_x2) {
    auto g = group_zero_attraction_exact(s, cfg.group_size, cfg.alpha);
    const double scale = cfg.kappa / (cfg.mu * sigma_x2);
    for (double& v : g) v *= scale;
    return g;
}

double OmegaQuadratic::scale(double omega) const {
    return std::max({std::abs(a * omega * omega), std::abs(b * omega), std::abs(c)});
}

OmegaQuadratic omega_quadratic(const TheoryConstants& c, double kappa) {
    const double mx = c.mu * c.sigma_x2;
    const double P = static_cast<double>(c.group_size);
    OmegaQuadratic q;
    q.a = 2.0 * mx * c.delta_0 * c.delta_L;
    q.b = 8.0 * kappa * c.alpha * c.theta_p * c.delta_0 * c.delta_Q / std::sqrt(2.0 * kPi);
    q.c = -2.0 * c.mu * mx * c.sigma_v2 * c.delta_0 -
          kappa * kappa * (4.0 * c.alpha * c.alpha * c.delta_Q / P + c.g_s * c.delta_0_prime);
    return q;
}

double omega_solve(const TheoryConstants& c, double kappa) {
    const auto q = omega_quadratic(c, kappa);
    if (!(q.a > 0.0) || !(q.c < 0.0) || !std::isfinite(q.b)) {
        throw DegenerateTheoryError("omega_solve: quadratic (" + num(q.a) + ", " + num(q.b) + ", " + num(q.c) +
                                    ") has no unique positive root");
    }
    const double disc = std::sqrt(q.b * q.b - 4.0 * q.a * q.c);
    // Positive root written without cancellation for b >= 0.
    return q.b >= 0.0 ? -2.0 * q.c / (q.b + disc) : (-q.b + disc) / (2.0 * q.a);
}

double TransientModel::msd(std::size_t n) const {
    const double t = static_cast<double>(n);
    double out = d_inf;
    for (int i = 0; i < 3; ++i) out += coeffs[i] * std::pow(lambdas[i], t);
    return out;
}

std::vector<double> TransientModel::curve(std::size_t iterations) const {
    std::vector<double> out(iterations);
    for (std::size_t n = 0; n < iterations; ++n) out[n] = msd(n);
    return out;
}

TransientModel transient_from_constants(const TheoryConstants& c, double kappa) {
    TransientModel m;
    m.kappa = kappa;
    m.diagnostics = c.diagnostics;
    const double mx = c.mu * c.sigma_x2;
    const double L = static_cast<double>(c.taps);

    m.omega = omega_or_lms_root(c, kappa);
    const double coupling = coupling_term(c, kappa, m.omega);
    const double a11 = 1.0 - mx * c.delta_L;
    const double a12 = -coupling;
    const double a21 = (L - c.q) * mx * mx;
    const double a22 = 1.0 - 2.0 * mx * c.delta_0 - coupling;

    const double half_gap = 0.5 * (a11 - a22);
    const double disc = half_gap * half_gap + a12 * a21;
    if (disc < 0.0) {
        throw DegenerateTheoryError("transient: coupling matrix has complex eigenvalues (imaginary part +-" +
                                    num(std::sqrt(-disc)) + ")");
    }
    const double mid = 0.5 * (a11 + a22);
    const double l1 = mid + std::sqrt(disc);
    const double l2 = mid - std::sqrt(disc);
    const double l3 = c.delta_0;
    const double det3 = (l3 - a11) * (l3 - a22) - a12 * a21;

    const double c3 = third_mode_coeff(c, kappa, coupling, det3);
    const double b00 = initial_drive(c, kappa, m.omega);
    m.d_inf = steady_state_msd(kappa, c);
    const auto [c1, c2] = fit_leading_modes(c, l1, l2, c3, l3, b00, m.d_inf);

    m.lambdas = {l1, l2, l3};
    m.coeffs = {c1, c2, c3};
    check_lambda(m.diagnostics, "lambda1", l1);
    check_lambda(m.diagnostics, "lambda2", l2);
    check_lambda(m.diagnostics, "lambda3", l3);
    return m;
}

TransientModel transient_model(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                               double sigma_v2, double kappa) {
    FilterConfig at = cfg;
    at.kappa = kappa;
    return transient_from_constants(compute_constants(s, at, sigma_x2, sigma_v2), kappa);
}

FAlphaMoments f_alpha_moments(std::size_t m, double alpha, double sigma_s) {
    if (m == 0) throw DomainError("f_alpha_moments: m must be >= 1");
    const double half_m = static_cast<double>(m) / 2.0;
    // Groups with ||s||^2 = sigma_s^2 chi^2_m below 1/alpha^2 are attracted.
    const double x = 1.0 / (2.0 * alpha * alpha * sigma_s * sigma_s);
    const double inv_gamma_m = std::exp(-std::lgamma(half_m));
    const double lower_m = incomplete_gamma_lower(half_m, x);
    const double lower_m1 = incomplete_gamma_lower(half_m + 0.5, x);
    const double lower_m2 = incomplete_gamma_lower(half_m + 1.0, x);
    const double a2 = alpha * alpha;
    FAlphaMoments out;
    out.f = 4.0 * a2 * inv_gamma_m *
            (2.0 * a2 * sigma_s * sigma_s * lower_m2 + lower_m - 2.0 * std::numbers::sqrt2 * alpha * sigma_s * lower_m1);
    out.f_prime = (4.0 * a2 * sigma_s * sigma_s * lower_m2 - 2.0 * std::numbers::sqrt2 * alpha * sigma_s * lower_m1) *
                  inv_gamma_m;
    return out;
}

namespace {

struct ExpectedMoments {
    double q_bar;
    double g_bar;
    double g_prime_bar;
    double norm2_bar;
};

ExpectedMoments expected_moments(const mg::MGParams& params, std::size_t group_size, double alpha) {
    const auto stats = mg::ensemble_stats(params);
    const auto pmf = mg::group_occupancy_pmf(params, group_size);
    const double sigma_s = std::sqrt(params.sigma_s2);
    const double groups = static_cast<double>(params.length) / static_cast<double>(group_size);
    ExpectedMoments out{};
    out.q_bar = mg::border_effect_q(params, group_size);
    for (std::size_t m = 1; m <= group_size; ++m) {
        const auto f = f_alpha_moments(m, alpha, sigma_s);
        out.g_bar += pmf[m] * f.f;
        out.g_prime_bar += pmf[m] * f.f_prime;
    }
    out.g_bar *= groups;
    out.g_prime_bar *= groups;
    out.norm2_bar = static_cast<double>(params.length) * stats.s_bar * params.sigma_s2;
    return out;
}

double ams_formula(double L, double q_bar, double g_bar, double theta_p, double mu, double alpha, double sigma_x2,
                   double sigma_v2) {
    const double delta_q = 2.0 - (q_bar + 2.0) * mu * sigma_x2;
    return mu * sigma_v2 / delta_q *
           (q_bar + std::sqrt(2.0 * kPi * (L - q_bar) * g_bar) / (alpha * theta_p * delta_q));
}

}  // namespace

double AveragedTheory::msd(std::size_t n) const {
    const double t = static_cast<double>(n);
    double out = ams_msd;
    for (int i = 0; i < 3; ++i) out += coeffs_prime[i] * std::pow(lambdas_prime[i], t);
    return out;
}

std::vector<double> AveragedTheory::curve(std::size_t iterations) const {
    std::vector<double> out(iterations);
    for (std::size_t n = 0; n < iterations; ++n) out[n] = msd(n);
    return out;
}

double average_min_msd(const mg::MGParams& params, std::size_t group_size, double mu, double alpha,
                       double sigma_x2, double sigma_v2) {
    params.validate();
    if (group_size == 0 || group_size > params.length) throw DomainError("average_min_msd: P must lie in [1, L]");
    FilterConfig probe{params.length, group_size, mu, alpha, 0.0, 0.0};
    probe.check_step_size(sigma_x2);
    const auto e = expected_moments(params, group_size, alpha);
    return ams_formula(static_cast<double>(params.length), e.q_bar, e.g_bar, theta(group_size), mu, alpha,
                       sigma_x2, sigma_v2);
}

AveragedTheory averaged_theory(const mg::MGParams& params, std::size_t group_size, double mu, double alpha,
                               double sigma_x2, double sigma_v2) {
    AveragedTheory t;
    t.group_size = group_size;
    t.mu = mu;
    t.ams_msd = average_min_msd(params, group_size, mu, alpha, sigma_x2, sigma_v2);
    const auto e = expected_moments(params, group_size, alpha);
    const double L = static_cast<double>(params.length);
    const double mx = mu * sigma_x2;
    t.q_bar = e.q_bar;
    t.delta_q_bar = 2.0 - (e.q_bar + 2.0) * mx;
    t.g_bar = e.g_bar;
    t.g_prime_bar = e.g_prime_bar;
    t.norm2_bar = e.norm2_bar;
    t.theta_p = theta(group_size);

    const double l1 = 1.0 - 2.0 * mx;
    const double l2 = 1.0 - 2.0 * mx * alpha * t.theta_p * std::sqrt(2.0 * (L - e.q_bar) / (kPi * e.g_bar));
    const double l3 = 1.0 - mx;
    t.lambdas_prime = {l1, l2, l3};

    if (e.q_bar < 20.0 || e.q_bar > 0.25 * L) {
        t.diagnostics.push_back({"assumption_small_p", "Q-bar = " + num(e.q_bar) +
                                                           " is outside the sparse-group regime [20, L/4]"});
    }
    check_lambda(t.diagnostics, "lambda2'", l2);

    auto c = constants_from_moments(params.length, group_size, mu, alpha, 0.0, sigma_x2, sigma_v2, e.q_bar,
                                    e.g_bar, e.g_prime_bar, e.norm2_bar);
    try {
        t.kappa = kappa_opt(c).kappa;
        t.omega = omega_or_lms_root(c, t.kappa);
        const double coupling = coupling_term(c, t.kappa, t.omega);
        // det(lambda3' I - A) with A's eigenvalues replaced by lambda1', lambda2'
        const double det3 = (l3 - l1) * (l3 - l2);
        const double c3 = third_mode_coeff(c, t.kappa, coupling, det3);
        const double b00 = initial_drive(c, t.kappa, t.omega);
        const auto [c1, c2] = fit_leading_modes(c, l1, l2, c3, l3, b00, t.ams_msd);
        t.coeffs_prime = {c1, c2, c3};
        t.has_transient = std::isfinite(c1) && std::isfinite(c2) && std::isfinite(c3);
    } catch (const DegenerateTheoryError& err) {
        t.diagnostics.push_back({"transient_unavailable", err.what()});
    }
    for (const auto& d : c.diagnostics) t.diagnostics.push_back(d);
    return t;
}

std::size_t p_opt(const mg::MGParams& params, double mu, double alpha, double sigma_x2, double sigma_v2,
                  std::size_t p_max) {
    if (p_max == 0 || p_max > params.length) throw DomainError("p_opt: p_max must lie in [1, L]");
    std::size_t best = 1;
    double best_value = average_min_msd(params, 1, mu, alpha, sigma_x2, sigma_v2);
    for (std::size_t P = 2; P <= p_max; ++P) {
        const double v = average_min_msd(params, P, mu, alpha, sigma_x2, sigma_v2);
        if (v < best_value) {
            best = P;
            best_value = v;
        }
    }
    return best;
}

double rate_condition_ratio(const mg::MGParams& params) {
    return (1.0 - params.p1) / ((1.0 - params.p2) * (1.0 - params.p2));
}

double rate_condition_threshold() { return 1.0 / (3.0 * (1.0 - std::exp(-1.0))); }

bool rate_condition_holds(const mg::MGParams& params) { return rate_condition_ratio(params) >= rate_condition_threshold(); }

double equalize_step_size(const mg::MGParams& params, std::size_t group_size, double target, double alpha,
                          double sigma_x2, double sigma_v2) {
    const double mu_max = 2.0 / ((static_cast<double>(params.length) + 2.0) * sigma_x2);
    auto f = [&](double mu) { return average_min_msd(params, group_size, mu, alpha, sigma_x2, sigma_v2) - target; };
    double lo = mu_max * 1e-12;
    double hi = mu_max * (1.0 - 1e-12);
    if (f(lo) > 0.0 || f(hi) < 0.0) {
        throw DomainError("equalize_step_size: target " + num(target) + " is not reachable for P=" +
                          std::to_string(group_size) + " within (0, mu_max)");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double noise_variance_for_snr(const mg::MGParams& params, double sigma_x2, double snr_db) {
    const auto stats = mg::ensemble_stats(params);
    const double norm2 = static_cast<double>(params.length) * stats.s_bar * params.sigma_s2;
    return sigma_x2 * norm2 * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace bslms::theory

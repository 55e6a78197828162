#pragma once

// Independent reference implementations used only by the tests. They are
// written directly from the defining formulas and share no code with the
// library beyond plain data.

#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Scalar zero-attraction LMS: every tap is its own group.
class ZeroAttractionLms {
public:
    ZeroAttractionLms(std::size_t taps, double mu, double alpha, double kappa, double delta)
        : w_(taps, 0.0), x_(taps, 0.0), mu_(mu), alpha_(alpha), kappa_(kappa), delta_(delta) {}

    double step(double x_new, double d) {
        x_.push_front(x_new);
        x_.pop_back();
        double y = 0.0;
        for (std::size_t k = 0; k < w_.size(); ++k) y += w_[k] * x_[k];
        const double e = d - y;
        std::vector<double> next(w_.size());
        for (std::size_t k = 0; k < w_.size(); ++k) {
            const double a = std::abs(w_[k]);
            double g = 0.0;
            if (a > 0.0 && 1.0 / (a + delta_) > alpha_) g = 2.0 * alpha_ * alpha_ * w_[k] - 2.0 * alpha_ * w_[k] / (a + delta_);
            next[k] = w_[k] + mu_ * e * x_[k] + kappa_ * g;
        }
        w_ = next;
        return e;
    }

    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<double> w_;
    std::deque<double> x_;
    double mu_, alpha_, kappa_, delta_;
};

// Plain LMS with its own delay line.
class Lms {
public:
    Lms(std::size_t taps, double mu) : w_(taps, 0.0), x_(taps, 0.0), mu_(mu) {}
    Lms(std::vector<double> history, double mu)
        : w_(history.size(), 0.0), x_(history.begin(), history.end()), mu_(mu) {}

    double step(double x_new, double d) {
        x_.push_front(x_new);
        x_.pop_back();
        double y = 0.0;
        for (std::size_t k = 0; k < w_.size(); ++k) y += w_[k] * x_[k];
        const double e = d - y;
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] += mu_ * e * x_[k];
        return e;
    }

    const std::vector<double>& weights() const { return w_; }
    const std::deque<double>& history() const { return x_; }

private:
    std::vector<double> w_;
    std::deque<double> x_;
    double mu_;
};

// Piecewise attraction on one group, straight from its definition.
inline std::vector<double> attraction(const std::vector<double>& u, std::size_t P, double alpha) {
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t start = 0; start < u.size(); start += P) {
        double n2 = 0.0;
        for (std::size_t k = start; k < start + P; ++k) n2 += u[k] * u[k];
        const double n = std::sqrt(n2);
        if (n > 0.0 && n <= 1.0 / alpha) {
            for (std::size_t k = start; k < start + P; ++k) g[k] = 2.0 * alpha * alpha * u[k] - 2.0 * alpha * u[k] / n;
        }
    }
    return g;
}

// theta(P) by direct products (small P only).
inline double theta_direct(std::size_t P) {
    auto fact = [](std::size_t n) {
        double f = 1.0;
        for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
        return f;
    };
    if (P % 2 == 1) {
        const double h = fact((P - 1) / 2);
        return h * h * std::pow(2.0, static_cast<double>(P - 1)) / fact(P);
    }
    return fact(P - 1) * std::numbers::pi / (fact(P / 2) * fact(P / 2 - 1) * std::pow(2.0, static_cast<double>(P)));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Monte Carlo estimate of E{sum_k g_k^2} (and E{sum_k s_k g_k}) over one
// group of m i.i.d. N(0, sigma_s^2) taps.
inline void f_alpha_monte_carlo(std::size_t m, double alpha, double sigma_s, std::size_t samples,
                                std::uint64_t seed, MeanSe& f, MeanSe& f_prime) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> n01(0.0, sigma_s);
    double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
    std::vector<double> s(m);
    for (std::size_t i = 0; i < samples; ++i) {
        for (auto& v : s) v = n01(eng);
        const auto g = attraction(s, m, alpha);
        double a = 0, b = 0;
        for (std::size_t k = 0; k < m; ++k) {
            a += g[k] * g[k];
            b += s[k] * g[k];
        }
        s1 += a;
        s2 += a * a;
        t1 += b;
        t2 += b * b;
    }
    const double n = static_cast<double>(samples);
    f.mean = s1 / n;
    f.se = std::sqrt((s2 / n - f.mean * f.mean) / n);
    f_prime.mean = t1 / n;
    f_prime.se = std::sqrt((t2 / n - f_prime.mean * f_prime.mean) / n);
}

inline double db(double v) { return 10.0 * std::log10(v); }

}  // namespace oracle

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "bslms/errors.hpp"
#include "bslms/filter.hpp"
#include "oracles.hpp"

using namespace bslms;

namespace {

FilterConfig make(std::size_t L, std::size_t P, double mu, double alpha = 1.0, double kappa = 0.0,
                  double delta = 1e-8) {
    FilterConfig c;
    c.taps = L;
    c.group_size = P;
    c.mu = mu;
    c.alpha = alpha;
    c.kappa = kappa;
    c.delta = delta;
    return c;
}

std::vector<double> random_vector(std::mt19937_64& eng, std::size_t n, double scale, double zero_prob) {
    std::normal_distribution<double> g(0.0, scale);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(eng) < zero_prob ? 0.0 : g(eng);
    return v;
}

}  // namespace

TEST_CASE("mixed l2,0 norm counts nonzero groups") {
    CHECK(mixed_l20_norm(std::vector<double>{0, 0, 0, 0}, 2) == 0);
    CHECK(mixed_l20_norm(std::vector<double>{1, 0, 0, 2}, 2) == 2);
    CHECK(mixed_l20_norm(std::vector<double>{0, 0, 3, 4}, 2) == 1);
    CHECK_THROWS_AS(mixed_l20_norm(std::vector<double>{1, 2, 3}, 2), DimensionError);
}

TEST_CASE("mixed l2,0 norm brackets the l0 norm") {
    std::mt19937_64 eng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t P = 1 + rep % 6;
        const auto u = random_vector(eng, P * 7, 1.0, 0.7);
        const std::size_t l0 = static_cast<std::size_t>(std::count_if(u.begin(), u.end(), [](double v) { return v != 0.0; }));
        const auto m = mixed_l20_norm(u, P);
        CHECK(m <= l0);
        CHECK(l0 <= P * m);
    }
}

TEST_CASE("config validation and padding") {
    CHECK(make(10, 4, 0.01).padded_taps() == 12);
    CHECK(make(10, 4, 0.01).groups() == 3);
    CHECK(make(12, 4, 0.01).padded_taps() == 12);
    CHECK_THROWS_AS(make(10, 0, 0.01).validate(), DomainError);
    CHECK_THROWS_AS(make(10, 11, 0.01).validate(), DomainError);
    CHECK_THROWS_AS(make(10, 2, 0.0).validate(), DomainError);
    CHECK_THROWS_AS(make(10, 2, 0.01, 0.0).validate(), DomainError);
    CHECK_THROWS_AS(make(10, 2, 0.01, 1.0, -1.0).validate(), DomainError);
    CHECK_NOTHROW(make(10, 2, 0.01).validate());
}

TEST_CASE("step-size bound") {
    const auto c = make(800, 4, 1e-3);
    CHECK(c.max_step_size(1.0) == doctest::Approx(2.4938e-3).epsilon(1e-4));
    CHECK_NOTHROW(c.check_step_size(1.0));
    auto big = make(800, 4, 2.5e-3);
    try {
        big.check_step_size(1.0);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("0.0024") != std::string::npos);
    }
}

TEST_CASE("group zero attraction, Table I form") {
    SUBCASE("zero group gives zero") {
        const auto g = group_zero_attraction(std::vector<double>{0, 0, 0.2, 0.1}, make(4, 2, 0.01));
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 0.0);
    }
    SUBCASE("large group gives zero") {
        const auto g = group_zero_attraction(std::vector<double>{0.6, 0.8, 3, 4}, make(4, 2, 0.01));
        for (double v : g) CHECK(v == 0.0);
    }
    SUBCASE("scalar hand value") {
        const auto g = group_zero_attraction(std::vector<double>{0.5}, make(1, 1, 0.01, 1.0, 0.0, 0.0));
        CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("delta to zero matches the piecewise definition") {
        std::mt19937_64 eng(3);
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t P = 1 + rep % 5;
            const double alpha = 0.5 + (rep % 4);
            const auto u = random_vector(eng, P * 6, 0.3 / alpha, 0.3);
            const auto cfg = make(u.size(), P, 0.01, alpha, 0.0, 0.0);
            const auto g = group_zero_attraction(u, cfg);
            const auto ref = oracle::attraction(u, P, alpha);
            const auto exact = group_zero_attraction_exact(u, P, alpha);
            for (std::size_t k = 0; k < u.size(); ++k) {
                CHECK(g[k] == doctest::Approx(ref[k]).epsilon(1e-12));
                CHECK(exact[k] == doctest::Approx(ref[k]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("attraction points toward zero") {
        std::mt19937_64 eng(5);
        for (int rep = 0; rep < 200; ++rep) {
            const std::size_t P = 1 + rep % 4;
            const auto u = random_vector(eng, P * 5, 0.2, 0.2);
            const auto cfg = make(u.size(), P, 0.01);
            const auto g = group_zero_attraction(u, cfg);
            for (std::size_t start = 0; start < u.size(); start += P) {
                double n2 = 0;
                for (std::size_t k = start; k < start + P; ++k) n2 += u[k] * u[k];
                const double n = std::sqrt(n2);
                if (n > 0.0 && n < 1.0 - 1e-6) {
                    for (std::size_t k = start; k < start + P; ++k) {
                        if (u[k] != 0.0) CHECK(std::signbit(g[k]) != std::signbit(u[k]));
                    }
                }
            }
        }
    }
    SUBCASE("scaling inside the attraction range") {
        const std::vector<double> u{0.1, -0.2, 0.05, 0.0};
        for (double c : {0.5, 1.5, 2.0}) {
            std::vector<double> cu(u);
            for (auto& v : cu) v *= c;
            const auto g = group_zero_attraction_exact(cu, 4, 1.0);
            const double n = std::sqrt(0.01 + 0.04 + 0.0025);
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(g[k] == doctest::Approx(2 * c * u[k] - 2 * c * u[k] / (c * n)).epsilon(1e-13));
            }
        }
    }
    CHECK_THROWS_AS(group_zero_attraction(std::vector<double>{1, 2}, make(3, 1, 0.01)), DimensionError);
}

TEST_CASE("coefficient classes") {
    SUBCASE("zero system") {
        const auto c = classify_coefficients(std::vector<double>(4, 0.0), make(4, 2, 0.01));
        CHECK(c.zero.size() == 4);
        CHECK(c.q == 0);
    }
    SUBCASE("large and zero groups") {
        const auto c = classify_coefficients(std::vector<double>{3, 4, 0, 0}, make(4, 2, 0.01));
        CHECK(c.large == std::vector<std::size_t>{0, 1});
        CHECK(c.zero == std::vector<std::size_t>{2, 3});
        CHECK(c.q == 2);
    }
    SUBCASE("border effect: zero tap in a small group") {
        const auto c = classify_coefficients(std::vector<double>{0.3, 0, 0, 0}, make(4, 2, 0.01));
        CHECK(c.small == std::vector<std::size_t>{0, 1});
        CHECK(c.zero == std::vector<std::size_t>{2, 3});
        CHECK(c.q == 2);
    }
    SUBCASE("partition property") {
        std::mt19937_64 eng(8);
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t P = 1 + rep % 5;
            const auto s = random_vector(eng, P * 9, 0.6, 0.5);
            const auto c = classify_coefficients(s, make(s.size(), P, 0.01));
            std::vector<int> seen(s.size(), 0);
            for (auto k : c.large) ++seen[k];
            for (auto k : c.small) ++seen[k];
            for (auto k : c.zero) ++seen[k];
            for (int v : seen) CHECK(v == 1);
            CHECK(c.q == c.large.size() + c.small.size());
            CHECK(c.q == P * mixed_l20_norm(s, P));
        }
    }
}

TEST_CASE("filter state basics") {
    const auto cfg = make(5, 2, 0.01);
    FilterState st(cfg);
    CHECK(st.weights().size() == 5);
    CHECK(st.delay_line().size() == 5);
    for (double w : st.weights()) CHECK(w == 0.0);
    for (int n = 1; n <= 7; ++n) {
        bs_lms_step(st, static_cast<double>(n), 0.0, cfg);
        const auto dl = st.delay_line();
        CHECK(dl[0] == static_cast<double>(n));
        if (n >= 2) CHECK(dl[1] == static_cast<double>(n - 1));
        if (n < 5) CHECK(dl[4] == 0.0);
    }
    CHECK(st.iteration() == 7);
}

TEST_CASE("step semantics") {
    SUBCASE("zero observation keeps zero weights") {
        const auto cfg = make(6, 3, 0.05, 1.0, 0.0);
        FilterState st(cfg);
        for (int n = 0; n < 20; ++n) CHECK(bs_lms_step(st, std::sin(n + 1.0), 0.0, cfg) == 0.0);
        for (double w : st.weights()) CHECK(w == 0.0);
    }
    SUBCASE("zero input and observation is a fixed point at w = 0") {
        const auto cfg = make(6, 3, 0.05, 1.0, 1e-3);
        FilterState st(cfg);
        for (int n = 0; n < 20; ++n) bs_lms_step(st, 0.0, 0.0, cfg);
        for (double w : st.weights()) CHECK(w == 0.0);
    }
    SUBCASE("kappa = 0 matches reference LMS") {
        std::mt19937_64 eng(21);
        std::normal_distribution<double> g(0, 1);
        const auto cfg = make(7, 3, 0.03);
        BsLmsFilter f(cfg);
        oracle::Lms ref(7, 0.03);
        for (int n = 0; n < 500; ++n) {
            const double x = g(eng), d = g(eng);
            CHECK(f.step(x, d) == doctest::Approx(ref.step(x, d)).epsilon(1e-12));
        }
        for (std::size_t k = 0; k < 7; ++k) CHECK(f.weights()[k] == doctest::Approx(ref.weights()[k]).epsilon(1e-12));
    }
    SUBCASE("P = L equals LMS while ||w|| > 1/alpha") {
        std::mt19937_64 eng(4);
        std::normal_distribution<double> g(0, 1);
        const std::size_t L = 6;
        const auto cfg = make(L, L, 0.05, 1.0, 1e-2);
        FilterState st(cfg);
        std::vector<double> w0{2, -1, 0.5, 0, 1, 1};
        st.set_weights(w0);
        std::vector<double> w = w0;
        std::deque<double> x(L, 0.0);
        for (int n = 0; n < 100; ++n) {
            double norm2 = 0;
            for (double v : st.weights()) norm2 += v * v;
            REQUIRE(norm2 > 1.0);
            const double xn = g(eng);
            x.push_front(xn);
            x.pop_back();
            // identifying w0 itself keeps the group norm near ||w0|| > 1
            double d = 0.01 * g(eng);
            for (std::size_t k = 0; k < L; ++k) d += w0[k] * x[k];
            double y = 0;
            for (std::size_t k = 0; k < L; ++k) y += w[k] * x[k];
            for (std::size_t k = 0; k < L; ++k) w[k] += 0.05 * (d - y) * x[k];
            bs_lms_step(st, xn, d, cfg);
            for (std::size_t k = 0; k < L; ++k) CHECK(st.weights()[k] == doctest::Approx(w[k]).epsilon(1e-13));
        }
    }
    SUBCASE("P = 1 equals scalar zero-attraction LMS") {
        std::mt19937_64 eng(9);
        std::normal_distribution<double> g(0, 1);
        const auto cfg = make(8, 1, 0.02, 2.0, 3e-3, 1e-8);
        BsLmsFilter f(cfg);
        oracle::ZeroAttractionLms ref(8, 0.02, 2.0, 3e-3, 1e-8);
        const std::vector<double> s{0, 0.4, 0, 0, -0.1, 0.02, 0, 0};
        std::deque<double> x(8, 0.0);
        for (int n = 0; n < 400; ++n) {
            const double xn = g(eng);
            x.push_front(xn);
            x.pop_back();
            double d = 0.01 * g(eng);
            for (std::size_t k = 0; k < 8; ++k) d += s[k] * x[k];
            f.step(xn, d);
            ref.step(xn, d);
        }
        for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(f.weights()[k] - ref.weights()[k]) <= 1e-12);
    }
    SUBCASE("padded taps stay zero and are not reported") {
        const auto cfg = make(5, 2, 0.05, 1.0, 1e-3);
        FilterState st(cfg);
        std::mt19937_64 eng(2);
        std::normal_distribution<double> g(0, 1);
        for (int n = 0; n < 50; ++n) bs_lms_step(st, g(eng), g(eng), cfg);
        CHECK(st.weights().size() == 5);
    }
}

TEST_CASE("step errors") {
    const auto cfg = make(4, 2, 0.05);
    FilterState st(cfg);
    CHECK_THROWS_AS(bs_lms_step(st, std::nan(""), 0.0, cfg), NumericError);
    CHECK_THROWS_AS(bs_lms_step(st, 1.0, INFINITY, cfg), NumericError);

    // A huge step-size blows the weights up; the error carries the iteration.
    auto wild = make(4, 2, 50.0);
    FilterState w(wild);
    bool thrown = false;
    try {
        for (int n = 0; n < 10000; ++n) bs_lms_step(w, 1e3 * std::sin(n * 0.7 + 0.1), 1e3, wild);
    } catch (const DivergenceError& e) {
        thrown = true;
        CHECK(e.iteration() > 0);
    }
    CHECK(thrown);
}

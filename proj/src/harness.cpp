#include "bslms/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "bslms/errors.hpp"
#include "bslms/rng.hpp"
#include "bslms/theory.hpp"

namespace bslms::sim {

namespace {

class Fnv1a {
public:
    template <class T>
    void add(const T& value) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (unsigned char b : bytes) {
            h_ ^= b;
            h_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
    std::size_t n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(n, jobs));
}

// Calls body(i) for i in [begin, end) on `threads` workers.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, std::size_t threads, Body body) {
    if (threads <= 1 || end - begin <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < end; i = next++) body(i);
        });
    }
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double squared_norm(std::span<const double> s) {
    double out = 0.0;
    for (double v : s) out += v * v;
    return out;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (trials_per_system == 0) throw DomainError("experiment: trials_per_system must be >= 1");
    if (iterations == 0) throw DomainError("experiment: iterations must be >= 1");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw DomainError("experiment: snr_db must be a number or +inf");
    }
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) throw DomainError("experiment: sigma_x2 must be positive");
    filter.validate();
    filter.check_step_size(sigma_x2);
    if (!systems.empty()) {
        for (std::size_t i = 0; i < systems.size(); ++i) {
            if (systems[i].size() != filter.taps) {
                throw DimensionError("experiment: system " + std::to_string(i) + " has length " +
                                     std::to_string(systems[i].size()) + ", expected L=" +
                                     std::to_string(filter.taps));
            }
        }
    } else if (model) {
        model->validate();
        if (model->length != filter.taps) {
            throw DimensionError("experiment: model length " + std::to_string(model->length) +
                                 " differs from filter L=" + std::to_string(filter.taps));
        }
        if (system_count == 0) throw DomainError("experiment: system_count must be >= 1");
    } else {
        throw DomainError("experiment: neither explicit systems nor a model were given");
    }
}

std::vector<std::vector<double>> ExperimentSpec::resolve_systems() const {
    if (!systems.empty()) return systems;
    if (!model) throw DomainError("experiment: neither explicit systems nor a model were given");
    std::vector<std::vector<double>> out;
    out.reserve(system_count);
    for (std::size_t i = 0; i < system_count; ++i) out.push_back(mg::generate_system(*model, master_seed, i));
    return out;
}

std::uint64_t ExperimentSpec::hash() const {
    Fnv1a h;
    h.add(systems.size());
    for (const auto& s : systems) {
        h.add(s.size());
        for (double v : s) h.add(v);
    }
    h.add(model.has_value());
    if (model) {
        h.add(model->length);
        h.add(model->p1);
        h.add(model->p2);
        h.add(model->sigma_s2);
        h.add(system_count);
    }
    h.add(filter.taps);
    h.add(filter.group_size);
    h.add(filter.mu);
    h.add(filter.alpha);
    h.add(filter.kappa);
    h.add(filter.delta);
    h.add(static_cast<int>(kappa_rule));
    h.add(snr_db);
    h.add(sigma_x2);
    h.add(iterations);
    h.add(trials_per_system);
    h.add(master_seed);
    return h.value();
}

double noise_variance(std::span<const double> s, double sigma_x2, double snr_db) {
    if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
    return sigma_x2 * squared_norm(s) * std::pow(10.0, -snr_db / 10.0);
}

double LearningCurve::steady_state() const {
    if (msd.empty()) return 0.0;
    const std::size_t window = std::max<std::size_t>(1, msd.size() / 10);
    double sum = 0.0;
    for (std::size_t n = msd.size() - window; n < msd.size(); ++n) sum += msd[n];
    return sum / static_cast<double>(window);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t system, std::size_t trial) {
    return derive_seed(master_seed, Stream::Trial, {system, trial});
}

std::vector<double> run_single(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                               double sigma_v2, std::size_t iterations, std::uint64_t seed) {
    const std::size_t L = cfg.taps;
    if (s.size() != L) throw DimensionError("run_single: system length does not match L");
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < L; ++k) {
        if (s[k] != 0.0) support.push_back(k);
    }

    FilterState state(cfg);
    Engine engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sx = std::sqrt(sigma_x2);
    const double sv = std::sqrt(sigma_v2);

    std::vector<double> msd(iterations);
    msd[0] = squared_norm(s);
    for (std::size_t n = 1; n < iterations; ++n) {
        const double x = sx * gauss(engine);
        const double v = sv * gauss(engine);
        // The new sample enters tap 0; older samples shift one place.
        const auto past = state.delay_line();
        double d = v;
        for (std::size_t k : support) d += s[k] * (k == 0 ? x : past[k - 1]);
        bs_lms_step(state, x, d, cfg);

        const auto w = state.weights();
        double dev = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            const double e = w[k] - s[k];
            dev += e * e;
        }
        msd[n] = dev;
    }
    return msd;
}

bool optimal_kappa(std::span<const double> s, const FilterConfig& cfg, double sigma_x2, double sigma_v2,
                   double& kappa) {
    kappa = 0.0;
    try {
        FilterConfig at = cfg;
        at.kappa = 0.0;
        const auto opt = theory::kappa_opt(theory::compute_constants(s, at, sigma_x2, sigma_v2));
        if (!std::isfinite(opt.kappa) || opt.kappa < 0.0) return false;
        kappa = opt.kappa;
        return true;
    } catch (const DegenerateTheoryError&) {
        return false;
    }
}

LearningCurve run_identification(const ExperimentSpec& spec) {
    spec.validate();
    const auto systems = spec.resolve_systems();
    const std::size_t S = systems.size();
    const std::size_t T = spec.trials_per_system;
    const std::size_t N = spec.iterations;

    LearningCurve curve;
    auto& meta = curve.metadata;
    meta.spec_hash = spec.hash();
    meta.master_seed = spec.master_seed;
    meta.systems = S;
    meta.trials_per_system = T;

    std::vector<FilterConfig> configs(S, spec.filter);
    for (std::size_t i = 0; i < S; ++i) {
        const double nv = noise_variance(systems[i], spec.sigma_x2, spec.snr_db);
        meta.noise_vars.push_back(nv);
        if (spec.kappa_rule == KappaRule::PerSystemOptimal) {
            double k = 0.0;
            if (!optimal_kappa(systems[i], spec.filter, spec.sigma_x2, nv, k)) {
                meta.warnings.push_back("system " + std::to_string(i) +
                                        ": optimal kappa outside the closed-form regime, using 0");
            }
            configs[i].kappa = k;
        }
        meta.kappas.push_back(configs[i].kappa);
    }

    const std::size_t jobs = S * T;
    const std::size_t threads = worker_count(spec.threads, jobs);
    const std::size_t batch = std::max<std::size_t>(1, 4 * threads);
    std::vector<double> sum(N, 0.0);
    std::vector<std::vector<double>> results(batch);
    std::vector<std::exception_ptr> errors(batch);

    for (std::size_t first = 0; first < jobs; first += batch) {
        const std::size_t last = std::min(jobs, first + batch);
        parallel_for(first, last, threads, [&](std::size_t job) {
            const std::size_t sys = job / T;
            const std::size_t trial = job % T;
            const std::uint64_t seed = trial_seed(spec.master_seed, sys, trial);
            try {
                results[job - first] =
                    run_single(systems[sys], configs[sys], spec.sigma_x2, meta.noise_vars[sys], N, seed);
            } catch (const DivergenceError& e) {
                errors[job - first] = std::make_exception_ptr(TrialDivergedError(
                    e.iteration(), sys, trial, seed,
                    "trial diverged at iteration " + std::to_string(e.iteration()) + " (system " +
                        std::to_string(sys) + ", trial " + std::to_string(trial) + ", seed " +
                        std::to_string(seed) + ")"));
            } catch (...) {
                errors[job - first] = std::current_exception();
            }
        });
        for (std::size_t j = 0; j < last - first; ++j) {
            if (errors[j]) std::rethrow_exception(errors[j]);
            const auto& r = results[j];
            for (std::size_t n = 0; n < N; ++n) sum[n] += r[n];
        }
    }

    const double scale = 1.0 / static_cast<double>(jobs);
    for (double& v : sum) v *= scale;
    curve.msd = std::move(sum);
    return curve;
}

std::size_t suggest_iterations(double norm2, double d_inf, double slowest_lambda) {
    if (!(slowest_lambda > 0.0 && slowest_lambda < 1.0)) {
        throw DomainError("suggest_iterations: slowest mode must lie in (0, 1)");
    }
    const double tau = -1.0 / std::log(slowest_lambda);
    const double floor_level = std::max(d_inf, norm2 * 1e-12);
    const double settle = tau * std::log(std::max(1.0, 100.0 * norm2 / floor_level)) / 0.9;
    return static_cast<std::size_t>(std::ceil(std::max({5.0 * tau, settle, 10.0})));
}

std::size_t suggest_iterations(const ExperimentSpec& spec) {
    spec.validate();
    const auto& cfg = spec.filter;
    const double mx = cfg.mu * spec.sigma_x2;
    const double delta_L = 2.0 - (static_cast<double>(cfg.taps) + 2.0) * mx;
    std::size_t best = 0;
    for (const auto& s : spec.resolve_systems()) {
        const double nv = noise_variance(s, spec.sigma_x2, spec.snr_db);
        double kappa = cfg.kappa;
        if (spec.kappa_rule == KappaRule::PerSystemOptimal) optimal_kappa(s, cfg, spec.sigma_x2, nv, kappa);
        const double norm2 = squared_norm(s);
        double lambda = 1.0 - mx * delta_L;
        double d_inf = mx * nv / spec.sigma_x2 * static_cast<double>(cfg.taps) / delta_L;
        try {
            const auto tm = theory::transient_model(s, cfg, spec.sigma_x2, nv, kappa);
            const double slow = *std::max_element(tm.lambdas.begin(), tm.lambdas.end());
            if (slow > 0.0 && slow < 1.0) lambda = std::max(lambda, slow);
            if (tm.d_inf > 0.0) d_inf = tm.d_inf;
        } catch (const DegenerateTheoryError&) {
        }
        best = std::max(best, suggest_iterations(norm2, d_inf, lambda));
    }
    return best;
}

KappaSweep sweep_kappa(const ExperimentSpec& spec, const std::vector<double>& kappa_grid,
                       const std::function<void(const KappaRow&)>& on_row) {
    if (kappa_grid.empty()) throw DomainError("sweep_kappa: empty grid");
    for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
        if (!(kappa_grid[i] > 0.0) || (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1]))) {
            throw DomainError("sweep_kappa: grid must be positive and strictly ascending");
        }
    }
    spec.validate();
    const auto systems = spec.resolve_systems();

    KappaSweep out;
    std::vector<theory::TheoryConstants> consts;
    FilterConfig at = spec.filter;
    at.kappa = 0.0;
    double log_sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const double nv = noise_variance(systems[i], spec.sigma_x2, spec.snr_db);
        consts.push_back(theory::compute_constants(systems[i], at, spec.sigma_x2, nv));
        try {
            const auto opt = theory::kappa_opt(consts.back());
            out.kappa_opt.push_back(opt.kappa);
            out.theory_min_msd += opt.d_min;
            if (opt.kappa > 0.0) {
                log_sum += std::log(opt.kappa);
                ++valid;
            }
        } catch (const DegenerateTheoryError&) {
            out.kappa_opt.push_back(std::numeric_limits<double>::quiet_NaN());
            out.metadata.warnings.push_back("system " + std::to_string(i) + ": no closed-form kappa optimum");
        }
    }
    out.theory_min_msd /= static_cast<double>(systems.size());
    out.kappa_opt_geomean = valid ? std::exp(log_sum / static_cast<double>(valid))
                                  : std::numeric_limits<double>::quiet_NaN();

    ExperimentSpec run = spec;
    run.systems = systems;
    run.kappa_rule = KappaRule::Fixed;
    for (double kappa : kappa_grid) {
        run.filter.kappa = kappa;
        const auto curve = run_identification(run);
        KappaRow row;
        row.kappa = kappa;
        row.sim_msd = curve.steady_state();
        for (const auto& c : consts) row.theory_msd += theory::steady_state_msd(kappa, c);
        row.theory_msd /= static_cast<double>(consts.size());
        out.rows.push_back(row);
        auto warnings = std::move(out.metadata.warnings);
        out.metadata = curve.metadata;
        out.metadata.spec_hash = spec.hash();
        out.metadata.warnings = std::move(warnings);
        if (on_row) on_row(row);
    }
    return out;
}

PartitionSweep sweep_partition(const ExperimentSpec& base, const std::vector<std::size_t>& p_grid,
                               const std::function<void(const PartitionRow&)>& on_row) {
    if (!base.model) throw DomainError("sweep_partition: requires a Markov-Gaussian model");
    if (p_grid.empty()) throw DomainError("sweep_partition: empty grid");
    base.validate();
    const auto& model = *base.model;
    for (std::size_t P : p_grid) {
        if (P == 0 || P > model.length) throw DomainError("sweep_partition: P must lie in [1, L]");
    }
    const auto systems = base.resolve_systems();
    const double avg_noise = theory::noise_variance_for_snr(model, base.sigma_x2, base.snr_db);

    PartitionSweep out;
    ExperimentSpec run = base;
    run.systems = systems;
    run.kappa_rule = KappaRule::PerSystemOptimal;
    for (std::size_t P : p_grid) {
        run.filter.group_size = P;
        const auto curve = run_identification(run);
        PartitionRow row;
        row.group_size = P;
        row.mean_kappa = mean(curve.metadata.kappas);
        row.sim_msd = curve.steady_state();
        row.theory_avg_msd = theory::average_min_msd(model, P, base.filter.mu, base.filter.alpha, base.sigma_x2,
                                                     avg_noise);
        FilterConfig at = run.filter;
        at.kappa = 0.0;
        double dmin = 0.0;
        for (std::size_t i = 0; i < systems.size(); ++i) {
            const auto c = theory::compute_constants(systems[i], at, base.sigma_x2, curve.metadata.noise_vars[i]);
            double d = theory::steady_state_msd(0.0, c);
            try {
                d = theory::kappa_opt(c).d_min;
            } catch (const DegenerateTheoryError&) {
            }
            dmin += d;
        }
        row.theory_mean_dmin = dmin / static_cast<double>(systems.size());
        out.rows.push_back(row);
        if (on_row) on_row(row);
    }
    auto argmin = [&](auto key) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < out.rows.size(); ++i) {
            if (key(out.rows[i]) < key(out.rows[best])) best = i;
        }
        return out.rows[best].group_size;
    };
    out.sim_best = argmin([](const PartitionRow& r) { return r.sim_msd; });
    out.theory_best = argmin([](const PartitionRow& r) { return r.theory_avg_msd; });
    return out;
}

std::optional<std::size_t> iterations_to_threshold(const std::vector<double>& curve, double threshold_db) {
    if (curve.empty() || !(curve[0] > 0.0)) return std::nullopt;
    const double level = curve[0] * std::pow(10.0, threshold_db / 10.0);
    for (std::size_t n = 0; n < curve.size(); ++n) {
        if (curve[n] <= level) return n;
    }
    return std::nullopt;
}

TransientComparison compare_transient(const ExperimentSpec& base, double mu_l0, double threshold_db) {
    if (!base.model) throw DomainError("compare_transient: requires a Markov-Gaussian model");
    base.validate();
    const auto& model = *base.model;

    ExperimentSpec bs = base;
    bs.systems = base.resolve_systems();
    bs.kappa_rule = KappaRule::PerSystemOptimal;
    ExperimentSpec l0 = bs;
    l0.filter.group_size = 1;
    l0.filter.mu = mu_l0;
    l0.validate();

    TransientComparison out;
    out.threshold_db = threshold_db;
    out.bs = run_identification(bs);
    out.l0 = run_identification(l0);

    const double avg_noise = theory::noise_variance_for_snr(model, base.sigma_x2, base.snr_db);
    auto theory_curve = [&](const ExperimentSpec& s, std::vector<double>& curve, const char* tag) {
        const auto t = theory::averaged_theory(model, s.filter.group_size, s.filter.mu, s.filter.alpha,
                                               s.sigma_x2, avg_noise);
        for (const auto& d : t.diagnostics) out.warnings.push_back(std::string(tag) + " " + d.code + ": " + d.message);
        if (!t.has_transient) return false;
        curve = t.curve(s.iterations);
        return true;
    };
    out.theory_bs_valid = theory_curve(bs, out.theory_bs, "bs");
    out.theory_l0_valid = theory_curve(l0, out.theory_l0, "l0");
    out.bs_crossing = iterations_to_threshold(out.bs.msd, threshold_db);
    out.l0_crossing = iterations_to_threshold(out.l0.msd, threshold_db);
    return out;
}

}  // namespace bslms::sim

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bslms/filter.hpp"
#include "bslms/mg_model.hpp"

namespace bslms::sim {

/// How kappa is chosen for each unknown system of an experiment.
enum class KappaRule {
    Fixed,             ///< cfg.kappa for every system
    PerSystemOptimal,  ///< closed-form optimum computed from that system
};

/// One Monte Carlo identification experiment.
///
/// Systems come either from `systems` (used verbatim when non-empty) or are
/// drawn from `model` with indices 0..system_count-1 under `master_seed`.
/// The noise variance of system i is sigma_x2 ||s_i||^2 10^(-snr_db/10);
/// snr_db = +inf means noiseless.
struct ExperimentSpec {
    std::vector<std::vector<double>> systems;
    std::optional<mg::MGParams> model;
    std::size_t system_count = 1;

    FilterConfig filter;
    KappaRule kappa_rule = KappaRule::Fixed;
    double snr_db = 40.0;
    double sigma_x2 = 1.0;
    std::size_t iterations = 1000;
    std::size_t trials_per_system = 10;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0;  ///< 0: hardware concurrency

    /// Throws DomainError / DimensionError on inconsistent settings,
    /// including a step-size outside the convergence bound.
    void validate() const;

    std::vector<std::vector<double>> resolve_systems() const;

    /// Stable FNV-1a digest of every field that influences the result
    /// (the thread count excluded).
    std::uint64_t hash() const;
};

double noise_variance(std::span<const double> s, double sigma_x2, double snr_db);

struct CurveMetadata {
    std::uint64_t spec_hash = 0;
    std::uint64_t master_seed = 0;
    std::size_t systems = 0;
    std::size_t trials_per_system = 0;
    std::vector<double> kappas;        ///< kappa used per system
    std::vector<double> noise_vars;    ///< sigma_v^2 per system
    std::vector<std::string> warnings;
};

/// Mean of ||w_n - s||^2 over all (system, trial) runs; entry 0 is the
/// average ||s||^2 because every run starts from w_0 = 0.
struct LearningCurve {
    std::vector<double> msd;
    CurveMetadata metadata;

    /// Mean over the final 10% of iterations (at least one sample).
    double steady_state() const;
};

/// Seed of trial `trial` on system `system`; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t system, std::size_t trial);

/// Runs all (system, trial) pairs in parallel and folds them in index order,
/// so the curve is bit-identical for any thread count.
/// Throws TrialDivergedError for the lowest-indexed diverging run.
LearningCurve run_identification(const ExperimentSpec& spec);

/// Squared-deviation trajectory of one run (exposed for tests).
std::vector<double> run_single(std::span<const double> s, const FilterConfig& cfg, double sigma_x2,
                               double sigma_v2, std::size_t iterations, std::uint64_t seed);

/// Kappa minimizing the steady-state theory for one system; falls back to 0
/// (and returns false) when the closed form is outside its regime.
bool optimal_kappa(std::span<const double> s, const FilterConfig& cfg, double sigma_x2, double sigma_v2,
                   double& kappa);

/// Run length such that the final 10% window sits well inside steady state:
/// the slowest mode has decayed ||s||^2 to 1% of d_inf before 0.9 N and at
/// least 5 time constants have elapsed.
std::size_t suggest_iterations(double norm2, double d_inf, double slowest_lambda);

/// suggest_iterations from the per-system theory of every system in `spec`
/// (honouring its kappa rule), maximized over systems.
std::size_t suggest_iterations(const ExperimentSpec& spec);

struct KappaRow {
    double kappa = 0.0;
    double sim_msd = 0.0;     ///< averaged steady-state estimate
    double theory_msd = 0.0;  ///< system-averaged closed-form value
};

struct KappaSweep {
    std::vector<KappaRow> rows;
    std::vector<double> kappa_opt;  ///< per system
    double kappa_opt_geomean = 0.0;
    double theory_min_msd = 0.0;    ///< mean of the per-system minima
    CurveMetadata metadata;         ///< of the last grid point
};

/// `spec.filter.kappa` is overwritten by each grid value. `on_row` is called
/// after each completed row (e.g. to flush partial output).
KappaSweep sweep_kappa(const ExperimentSpec& spec, const std::vector<double>& kappa_grid,
                       const std::function<void(const KappaRow&)>& on_row = {});

struct PartitionRow {
    std::size_t group_size = 1;
    double mean_kappa = 0.0;      ///< mean per-system optimal kappa used
    double sim_msd = 0.0;
    double theory_avg_msd = 0.0;  ///< average minimum MSD from model expectations
    double theory_mean_dmin = 0.0;  ///< mean of per-system minima
};

struct PartitionSweep {
    std::vector<PartitionRow> rows;
    std::size_t sim_best = 0;
    std::size_t theory_best = 0;
};

/// For each P the filter uses the per-system optimal kappa.
/// `base` supplies the model, mu, alpha, snr, run lengths and seeds.
PartitionSweep sweep_partition(const ExperimentSpec& base, const std::vector<std::size_t>& p_grid,
                               const std::function<void(const PartitionRow&)>& on_row = {});

struct TransientComparison {
    LearningCurve bs;
    LearningCurve l0;
    std::vector<double> theory_bs;
    std::vector<double> theory_l0;
    bool theory_bs_valid = false;
    bool theory_l0_valid = false;
    double threshold_db = -35.0;
    std::optional<std::size_t> bs_crossing;  ///< first n with normalized MSD <= threshold
    std::optional<std::size_t> l0_crossing;
    std::vector<std::string> warnings;
};

/// Same systems and noise for both filters; `base.filter.group_size` and
/// `base.filter.mu` configure BS-LMS, the l0 run uses P = 1 and `mu_l0`.
/// Normalized MSD is MSD_n / MSD_0.
TransientComparison compare_transient(const ExperimentSpec& base, double mu_l0, double threshold_db);

/// First n with 10 log10(curve[n] / curve[0]) <= threshold_db.
std::optional<std::size_t> iterations_to_threshold(const std::vector<double>& curve, double threshold_db);

}  // namespace bslms::sim

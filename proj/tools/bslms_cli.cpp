// bslms: generate block-sparse systems, dump closed-form theory, and run the
// Monte Carlo experiments. Exit codes: 0 ok, 2 config error, 3 divergence,
// 4 theory-validity violation under --strict.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bslms/config.hpp"
#include "bslms/errors.hpp"
#include "bslms/harness.hpp"
#include "bslms/io.hpp"
#include "bslms/mg_model.hpp"
#include "bslms/theory.hpp"

namespace fs = std::filesystem;
using bslms::config::Tree;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitStrict = 4;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string profile = "desk";
    std::optional<std::size_t> threads;
    bool strict = false;
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Tree load_tree(const Options& opt) {
    Tree tree = opt.config.empty() ? Tree::object() : bslms::config::load(opt.config);
    if (opt.seed) bslms::config::set(tree, "run.seed", *opt.seed);
    if (opt.threads) bslms::config::set(tree, "run.threads", *opt.threads);
    return tree;
}

void apply_profile(Tree& tree, const std::string& profile) {
    const bool paper = bslms::config::parse_profile(profile) == bslms::config::Profile::Paper;
    bslms::config::set_default(tree, "experiment.systems", paper ? 100 : 20);
    bslms::config::set_default(tree, "experiment.trials", paper ? 10 : 5);
}

void default_model(Tree& tree, double p1, double p2) {
    bslms::config::set_default(tree, "model.length", 800);
    bslms::config::set_default(tree, "model.p1", p1);
    bslms::config::set_default(tree, "model.p2", p2);
    bslms::config::set_default(tree, "model.sigma_s2", 1.0);
}

void default_filter(Tree& tree, double mu_scale) {
    if (!bslms::config::has(tree, "filter.mu")) bslms::config::set_default(tree, "filter.mu_scale", mu_scale);
    bslms::config::set_default(tree, "filter.alpha", 1.0);
    bslms::config::set_default(tree, "filter.delta", 1e-8);
}

Json snr_json(double snr) { return std::isinf(snr) ? Json("inf") : Json(snr); }

Json diagnostics_json(const std::vector<bslms::theory::Diagnostic>& diags) {
    Json out = Json::array();
    for (const auto& d : diags) out.push_back({{"code", d.code}, {"message", d.message}});
    return out;
}

Json strings_json(const std::vector<std::string>& items) {
    Json out = Json::array();
    for (const auto& s : items) out.push_back(s);
    return out;
}

std::string version() {
#ifdef BSLMS_VERSION
    return BSLMS_VERSION;
#else
    return "unknown";
#endif
}

void write_gnuplot(const fs::path& csv, const std::vector<std::string>& header, bool log_x, bool db_y) {
    bslms::io::write_atomic(fs::path(csv.string() + ".gp"),
                            bslms::io::gnuplot_script(csv.filename().string(), header, log_x, db_y));
}

// ---------------------------------------------------------------- generate

int cmd_generate(const Options& opt) {
    Clock clock;
    Tree tree = load_tree(opt);
    bslms::config::set_default(tree, "model.sigma_s2", 1.0);
    bslms::config::set_default(tree, "model.count", 1);
    bslms::config::set_default(tree, "run.seed", 1);
    const auto params = bslms::config::model(tree);
    const auto count = bslms::config::get_size(tree, "model.count");
    if (count == 0) throw bslms::ConfigError("model.count", "must be >= 1");
    const auto seed = bslms::config::get_u64(tree, "run.seed");
    if (opt.out.empty()) throw bslms::ConfigError("out", "--out is required for generate");

    std::vector<std::vector<double>> columns;
    std::vector<std::string> header;
    for (std::size_t i = 0; i < count; ++i) {
        columns.push_back(bslms::mg::generate_system(params, seed, i));
        header.push_back("s" + std::to_string(i));
    }
    const fs::path out(opt.out);
    bslms::io::write_columns(out, header, columns);

    const auto stats = bslms::mg::ensemble_stats(params);
    bslms::io::RunManifest m;
    m.command = "generate";
    m.config = tree;
    m.master_seed = seed;
    m.artifacts = {out.string()};
    m.version = version();
    m.extra = {{"s_bar", stats.s_bar}, {"b_nz_bar", stats.b_nz_bar}, {"b_z_bar", stats.b_z_bar}};
    m.duration_seconds = clock.seconds();
    bslms::io::write_manifest(fs::path(out.string() + ".manifest.json"), m);
    return kExitOk;
}

// ------------------------------------------------------------------ theory

Json per_system_theory(const std::vector<double>& s, const bslms::FilterConfig& cfg, double sigma_x2,
                       double sigma_v2, bool& any_diag) {
    namespace th = bslms::theory;
    const auto c = th::compute_constants(s, cfg, sigma_x2, sigma_v2);
    Json j;
    j["q"] = c.q;
    j["norm2"] = c.norm2;
    j["g"] = c.g_s;
    j["g_prime"] = c.g_prime_s;
    j["sigma_v2"] = sigma_v2;
    j["delta_L"] = c.delta_L;
    j["delta_Q"] = c.delta_Q;
    j["delta_0"] = c.delta_0;
    j["delta_0_prime"] = c.delta_0_prime;
    j["theta"] = c.theta_p;
    j["beta"] = c.beta;
    j["kappa"] = cfg.kappa;
    j["d_inf"] = th::steady_state_msd(cfg.kappa, c);
    j["d_inf_lms"] = th::steady_state_msd(0.0, c);
    auto diags = c.diagnostics;
    try {
        const auto opt = th::kappa_opt(c);
        j["kappa_opt"] = opt.kappa;
        j["d_min"] = opt.d_min;
    } catch (const bslms::DegenerateTheoryError& e) {
        diags.push_back({"kappa_opt_unavailable", e.what()});
    }
    try {
        const auto tm = th::transient_from_constants(c, cfg.kappa);
        j["omega"] = tm.omega;
        j["lambdas"] = tm.lambdas;
        j["coeffs"] = tm.coeffs;
        for (const auto& d : tm.diagnostics) {
            if (d.code == "lambda_range") diags.push_back(d);
        }
    } catch (const bslms::DegenerateTheoryError& e) {
        diags.push_back({"transient_unavailable", e.what()});
    }
    j["diagnostics"] = diagnostics_json(diags);
    any_diag = any_diag || !diags.empty();
    return j;
}

int cmd_theory(const Options& opt) {
    namespace th = bslms::theory;
    Clock clock;
    Tree tree = load_tree(opt);
    bslms::config::set_default(tree, "experiment.sigma_x2", 1.0);
    bslms::config::set_default(tree, "experiment.snr_db", 40.0);
    if (!bslms::config::has(tree, "filter.mu")) bslms::config::set_default(tree, "filter.mu_scale", 0.4);
    const double sigma_x2 = bslms::config::get_double(tree, "experiment.sigma_x2");
    const double snr_db = bslms::config::get_double(tree, "experiment.snr_db");
    const bool has_noise = bslms::config::has(tree, "theory.sigma_v2");

    Json result;
    bool any_diag = false;
    if (bslms::config::has(tree, "theory.system_file")) {
        const auto file = bslms::config::get_string(tree, "theory.system_file");
        std::vector<std::vector<double>> systems;
        try {
            systems = bslms::io::read_columns(file);
        } catch (const std::exception& e) {
            throw bslms::ConfigError("theory.system_file", e.what());
        }
        if (systems.empty()) throw bslms::ConfigError("theory.system_file", "no systems in '" + file + "'");
        const auto cfg = bslms::config::filter(tree, systems.front().size());
        Json list = Json::array();
        for (const auto& s : systems) {
            if (s.size() != cfg.taps) throw bslms::ConfigError("theory.system_file", "columns differ in length");
            const double nv = has_noise ? bslms::config::get_double(tree, "theory.sigma_v2")
                                        : bslms::sim::noise_variance(s, sigma_x2, snr_db);
            list.push_back(per_system_theory(s, cfg, sigma_x2, nv, any_diag));
        }
        result["mode"] = "per_system";
        result["systems"] = list;
    } else {
        const auto params = bslms::config::model(tree);
        const auto cfg = bslms::config::filter(tree, params.length);
        const double nv = has_noise ? bslms::config::get_double(tree, "theory.sigma_v2")
                                    : th::noise_variance_for_snr(params, sigma_x2, snr_db);
        const auto stats = bslms::mg::ensemble_stats(params);
        const auto avg = th::averaged_theory(params, cfg.group_size, cfg.mu, cfg.alpha, sigma_x2, nv);
        result["mode"] = "averaged";
        result["sigma_v2"] = nv;
        result["s_bar"] = stats.s_bar;
        result["b_nz_bar"] = stats.b_nz_bar;
        result["b_z_bar"] = stats.b_z_bar;
        result["group_size"] = cfg.group_size;
        result["mu"] = cfg.mu;
        result["theta"] = avg.theta_p;
        result["q_bar"] = avg.q_bar;
        result["g_bar"] = avg.g_bar;
        result["g_prime_bar"] = avg.g_prime_bar;
        result["norm2_bar"] = avg.norm2_bar;
        result["ams_msd"] = avg.ams_msd;
        result["kappa_opt_bar"] = avg.kappa;
        result["omega_bar"] = avg.omega;
        result["lambdas_prime"] = avg.lambdas_prime;
        if (avg.has_transient) result["coeffs_prime"] = avg.coeffs_prime;
        result["rate_condition"] = {{"ratio", th::rate_condition_ratio(params)},
                                {"threshold", th::rate_condition_threshold()},
                                {"holds", th::rate_condition_holds(params)}};
        auto diags = avg.diagnostics;
        if (bslms::config::get_bool(tree, "theory.p_opt", false)) {
            const auto p_max = bslms::config::get_size(tree, "theory.p_max", std::min<std::size_t>(50, params.length));
            if (p_max == 0 || p_max > params.length) throw bslms::ConfigError("theory.p_max", "must lie in [1, L]");
            Json table = Json::array();
            for (std::size_t P = 1; P <= p_max; ++P) {
                table.push_back({{"P", P}, {"ams_msd", th::average_min_msd(params, P, cfg.mu, cfg.alpha, sigma_x2, nv)}});
            }
            result["p_opt"] = th::p_opt(params, cfg.mu, cfg.alpha, sigma_x2, nv, p_max);
            result["ams_by_p"] = table;
        }
        result["diagnostics"] = diagnostics_json(diags);
        any_diag = !diags.empty();
    }

    const std::string text = result.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        const fs::path out(opt.out);
        bslms::io::write_atomic(out, text);
        bslms::io::RunManifest m;
        m.command = "theory";
        m.config = tree;
        m.artifacts = {out.string()};
        m.version = version();
        m.duration_seconds = clock.seconds();
        bslms::io::write_manifest(fs::path(out.string() + ".manifest.json"), m);
    }
    if (any_diag && opt.strict) {
        std::cerr << "bslms: theory-validity diagnostics present (strict mode)\n";
        return kExitStrict;
    }
    return kExitOk;
}

// -------------------------------------------------------------- experiments

std::vector<double> kappa_grid(const Tree& tree) {
    if (bslms::config::has(tree, "experiment.kappa_grid")) return bslms::config::get_double_list(tree, "experiment.kappa_grid");
    const double lo = bslms::config::get_double(tree, "experiment.kappa_min");
    const double hi = bslms::config::get_double(tree, "experiment.kappa_max");
    const auto n = bslms::config::get_size(tree, "experiment.kappa_points");
    if (!(lo > 0.0) || !(hi > lo)) throw bslms::ConfigError("experiment.kappa_min", "need 0 < kappa_min < kappa_max");
    if (n < 2) throw bslms::ConfigError("experiment.kappa_points", "must be >= 2");
    std::vector<double> grid(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return grid;
}

struct ExperimentContext {
    Options opt;
    Tree tree;
    fs::path dir;
    Clock clock;
    std::vector<std::string> artifacts;
    Json results = Json::object();
    std::vector<std::string> warnings;

    void finish(const std::string& name, std::uint64_t seed, const std::string& status) {
        bslms::io::RunManifest m;
        m.command = "experiment " + name;
        m.config = tree;
        m.master_seed = seed;
        m.artifacts = artifacts;
        m.version = version();
        results["status"] = status;
        results["warnings"] = strings_json(warnings);
        m.extra = results;
        m.duration_seconds = clock.seconds();
        bslms::io::write_manifest(dir / "manifest.json", m);
    }
};

void resolve_iterations(Tree& tree, bslms::sim::ExperimentSpec& spec) {
    bslms::config::set(tree, "experiment.iterations", spec.iterations);
}

void run_sweep_kappa(ExperimentContext& ctx) {
    Tree& tree = ctx.tree;
    default_model(tree, 0.99, 0.91);
    default_filter(tree, 0.8);
    bslms::config::set_default(tree, "experiment.p_list", "1,5,10,20");
    if (!bslms::config::has(tree, "experiment.kappa_grid")) {
        bslms::config::set_default(tree, "experiment.kappa_min", 1e-9);
        bslms::config::set_default(tree, "experiment.kappa_max", 1e-5);
        bslms::config::set_default(tree, "experiment.kappa_points", 9);
    }
    auto spec = bslms::config::experiment(tree);
    resolve_iterations(tree, spec);
    const auto grid = kappa_grid(tree);
    const auto p_list = bslms::config::get_size_list(tree, "experiment.p_list");

    Json per_p = Json::array();
    for (std::size_t P : p_list) {
        if (P == 0 || P > spec.filter.taps) throw bslms::ConfigError("experiment.p_list", "P must lie in [1, L]");
        spec.filter.group_size = P;
        const std::vector<std::string> header{"kappa", "sim_msd", "theory_msd"};
        const fs::path csv = ctx.dir / ("sweep_kappa_P" + std::to_string(P) + ".csv");
        bslms::io::CsvWriter writer(csv, header);
        const auto sweep = bslms::sim::sweep_kappa(spec, grid, [&](const bslms::sim::KappaRow& r) {
            writer.row({r.kappa, r.sim_msd, r.theory_msd});
        });
        ctx.artifacts.push_back(writer.commit().string());
        write_gnuplot(csv, header, true, true);
        std::size_t best = 0;
        for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
            if (sweep.rows[i].sim_msd < sweep.rows[best].sim_msd) best = i;
        }
        per_p.push_back({{"P", P},
                         {"kappa_opt_geomean", sweep.kappa_opt_geomean},
                         {"theory_min_msd", sweep.theory_min_msd},
                         {"sim_best_kappa", sweep.rows[best].kappa}});
        for (const auto& w : sweep.metadata.warnings) ctx.warnings.push_back("P=" + std::to_string(P) + " " + w);
    }
    ctx.results["sweep_kappa"] = per_p;
}

void run_sweep_p(ExperimentContext& ctx) {
    Tree& tree = ctx.tree;
    const bool paper = bslms::config::parse_profile(ctx.opt.profile) == bslms::config::Profile::Paper;
    default_model(tree, 0.99, 0.91);
    default_filter(tree, 0.4);
    bslms::config::set_default(tree, "experiment.p_grid", paper ? "1..50" : "1..8");
    auto spec = bslms::config::experiment(tree);
    resolve_iterations(tree, spec);
    const auto grid = bslms::config::get_size_list(tree, "experiment.p_grid");
    for (std::size_t P : grid) {
        if (P == 0 || P > spec.filter.taps) throw bslms::ConfigError("experiment.p_grid", "P must lie in [1, L]");
    }

    const std::vector<std::string> header{"P", "mean_kappa", "sim_msd", "theory_avg_msd", "theory_mean_dmin"};
    const fs::path csv = ctx.dir / "sweep_p.csv";
    bslms::io::CsvWriter writer(csv, header);
    const auto sweep = bslms::sim::sweep_partition(spec, grid, [&](const bslms::sim::PartitionRow& r) {
        writer.row({static_cast<double>(r.group_size), r.mean_kappa, r.sim_msd, r.theory_avg_msd, r.theory_mean_dmin});
    });
    ctx.artifacts.push_back(writer.commit().string());
    write_gnuplot(csv, {"P", "sim_msd", "theory_avg_msd"}, false, true);
    ctx.results["sim_best_p"] = sweep.sim_best;
    ctx.results["theory_best_p"] = sweep.theory_best;
}

void run_transient(ExperimentContext& ctx) {
    namespace th = bslms::theory;
    Tree& tree = ctx.tree;
    default_model(tree, 0.99, 0.91);
    default_filter(tree, 0.637);
    bslms::config::set_default(tree, "experiment.mu_l0_scale", 0.4);
    bslms::config::set_default(tree, "experiment.threshold_db", -35.0);
    bslms::config::set_default(tree, "experiment.equalize", false);

    const auto params = bslms::config::model(tree);
    const double L = static_cast<double>(params.length);
    const double sigma_x2 = bslms::config::get_double(tree, "experiment.sigma_x2", 1.0);
    const double snr_db = bslms::config::get_double(tree, "experiment.snr_db", 40.0);
    const double mu_l0 = bslms::config::has(tree, "experiment.mu_l0")
                             ? bslms::config::get_double(tree, "experiment.mu_l0")
                             : bslms::config::get_double(tree, "experiment.mu_l0_scale") / L;
    const double alpha = bslms::config::get_double(tree, "filter.alpha");
    const double avg_noise = th::noise_variance_for_snr(params, sigma_x2, snr_db);
    if (!(mu_l0 > 0.0 && mu_l0 < 2.0 / ((L + 2.0) * sigma_x2))) {
        throw bslms::ConfigError("experiment.mu_l0", "outside the convergence bound");
    }
    if (!bslms::config::has(tree, "filter.group_size")) {
        const auto P = th::p_opt(params, mu_l0, alpha, sigma_x2, avg_noise, std::min<std::size_t>(50, params.length));
        bslms::config::set(tree, "filter.group_size", P);
    }
    if (bslms::config::get_bool(tree, "experiment.equalize")) {
        const auto P = bslms::config::get_size(tree, "filter.group_size");
        const double target = th::average_min_msd(params, 1, mu_l0, alpha, sigma_x2, avg_noise);
        const double mu = th::equalize_step_size(params, P, target, alpha, sigma_x2, avg_noise);
        bslms::config::set(tree, "filter.mu", mu);
        if (tree["filter"].contains("mu_scale")) tree["filter"].erase("mu_scale");
        bslms::config::set(tree, "experiment.equalize", false);
    }
    bslms::config::set_default(tree, "experiment.kappa_rule", "optimal");

    auto spec = bslms::config::experiment(tree);
    if (!bslms::config::has(tree, "experiment.iterations") || bslms::config::get_size(tree, "experiment.iterations") == 0) {
        auto l0 = spec;
        l0.filter.group_size = 1;
        l0.filter.mu = mu_l0;
        spec.iterations = std::max(spec.iterations, bslms::sim::suggest_iterations(l0));
    }
    resolve_iterations(tree, spec);
    const double threshold = bslms::config::get_double(tree, "experiment.threshold_db");

    const auto cmp = bslms::sim::compare_transient(spec, mu_l0, threshold);
    const std::vector<std::string> header{"n", "sim_bs", "sim_l0", "theory_bs", "theory_l0"};
    const fs::path csv = ctx.dir / "transient.csv";
    bslms::io::CsvWriter writer(csv, header);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 0; n < spec.iterations; ++n) {
        writer.row({static_cast<double>(n), cmp.bs.msd[n], cmp.l0.msd[n],
                    cmp.theory_bs_valid ? cmp.theory_bs[n] : nan, cmp.theory_l0_valid ? cmp.theory_l0[n] : nan});
    }
    ctx.artifacts.push_back(writer.commit().string());
    write_gnuplot(csv, header, false, true);

    auto crossing = [](const std::optional<std::size_t>& c) { return c ? Json(*c) : Json(nullptr); };
    ctx.results["group_size"] = spec.filter.group_size;
    ctx.results["mu_bs"] = spec.filter.mu;
    ctx.results["mu_l0"] = mu_l0;
    ctx.results["threshold_db"] = threshold;
    ctx.results["bs_crossing"] = crossing(cmp.bs_crossing);
    ctx.results["l0_crossing"] = crossing(cmp.l0_crossing);
    ctx.results["bs_steady"] = cmp.bs.steady_state();
    ctx.results["l0_steady"] = cmp.l0.steady_state();
    for (const auto& w : cmp.warnings) ctx.warnings.push_back(w);
    for (const auto& w : cmp.bs.metadata.warnings) ctx.warnings.push_back("bs " + w);
    for (const auto& w : cmp.l0.metadata.warnings) ctx.warnings.push_back("l0 " + w);
}

int cmd_experiment(const Options& opt, const std::string& name) {
    ExperimentContext ctx;
    ctx.opt = opt;
    ctx.tree = load_tree(opt);
    apply_profile(ctx.tree, opt.profile);
    bslms::config::set_default(ctx.tree, "run.seed", 1);
    if (opt.out.empty()) throw bslms::ConfigError("out", "--out is required for experiments");
    ctx.dir = opt.out;
    fs::create_directories(ctx.dir);
    const auto seed = bslms::config::get_u64(ctx.tree, "run.seed");
    if (bslms::config::has(ctx.tree, "experiment.snr_db")) {
        bslms::config::set(ctx.tree, "experiment.snr_db", snr_json(bslms::config::get_double(ctx.tree, "experiment.snr_db")));
    }

    try {
        if (name == "sweep-kappa") {
            run_sweep_kappa(ctx);
        } else if (name == "sweep-p") {
            run_sweep_p(ctx);
        } else {
            run_transient(ctx);
        }
    } catch (const bslms::TrialDivergedError& e) {
        ctx.results["diverged"] = {{"system", e.system()},
                                   {"trial", e.trial()},
                                   {"trial_seed", e.trial_seed()},
                                   {"iteration", e.iteration()}};
        ctx.finish(name, seed, "diverged");
        throw;
    }
    ctx.finish(name, seed, "ok");
    if (opt.strict && !ctx.warnings.empty()) {
        std::cerr << "bslms: theory-validity warnings present (strict mode)\n";
        for (const auto& w : ctx.warnings) std::cerr << "  " << w << "\n";
        return kExitStrict;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-sparse LMS: system generation, theory and Monte Carlo experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "INI or JSON configuration (a run manifest also works)");
        sub->add_option("--out", opt.out, "output file (generate, theory) or directory (experiment)");
        sub->add_option("--seed", opt.seed, "master seed, overrides run.seed");
        sub->add_option("--profile", opt.profile, "default ensemble size: paper or desk")
            ->check(CLI::IsMember({"paper", "desk"}));
        sub->add_option("--threads", opt.threads, "worker threads (0: all cores)");
        sub->add_flag("--strict", opt.strict, "exit 4 when theory-validity diagnostics are present");
    };

    auto* gen = app.add_subcommand("generate", "draw Markov-Gaussian systems into a CSV (one column each)");
    auto* theory = app.add_subcommand("theory", "dump closed-form constants as JSON");
    auto* exp = app.add_subcommand("experiment", "run sweep-kappa, sweep-p or transient");
    std::string exp_name;
    exp->add_option("name", exp_name, "experiment name")
        ->required()
        ->check(CLI::IsMember({"sweep-kappa", "sweep-p", "transient"}));
    for (auto* sub : {gen, theory, exp}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(opt);
        if (theory->parsed()) return cmd_theory(opt);
        return cmd_experiment(opt, exp_name);
    } catch (const bslms::ConfigError& e) {
        std::cerr << "bslms: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bslms::TrialDivergedError& e) {
        std::cerr << "bslms: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const bslms::DivergenceError& e) {
        std::cerr << "bslms: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const bslms::DomainError& e) {
        std::cerr << "bslms: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bslms::DimensionError& e) {
        std::cerr << "bslms: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "bslms: " << e.what() << "\n";
        return 1;
    }
}

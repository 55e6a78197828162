#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bslms/filter.hpp"
#include "bslms/harness.hpp"
#include "bslms/mg_model.hpp"

namespace bslms::config {

/// Sectioned configuration, e.g. {"model": {"p1": 0.99}, "filter": {...}}.
/// INI files load with string leaves; typed getters accept both.
using Tree = nlohmann::ordered_json;

/// JSON when the text starts with '{' (after whitespace), INI otherwise.
/// A run manifest is unwrapped to its "config" member, so manifests can be
/// passed back in for replay. Errors: ConfigError (with line/column for JSON).
Tree load(const std::filesystem::path& path);
Tree parse_json(const std::string& text);
Tree parse_ini(const std::string& text);
Tree parse(const std::string& text);

bool has(const Tree& tree, const std::string& path);
double get_double(const Tree& tree, const std::string& path, std::optional<double> fallback = std::nullopt);
std::size_t get_size(const Tree& tree, const std::string& path, std::optional<std::size_t> fallback = std::nullopt);
std::uint64_t get_u64(const Tree& tree, const std::string& path,
                      std::optional<std::uint64_t> fallback = std::nullopt);
bool get_bool(const Tree& tree, const std::string& path, std::optional<bool> fallback = std::nullopt);
std::string get_string(const Tree& tree, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt);
/// Comma- or space-separated text, or a JSON array.
std::vector<double> get_double_list(const Tree& tree, const std::string& path);
/// Like get_double_list; also accepts "a..b" ranges.
std::vector<std::size_t> get_size_list(const Tree& tree, const std::string& path);

/// Sets `path` only when it is absent.
void set_default(Tree& tree, const std::string& path, const Tree& value);
void set(Tree& tree, const std::string& path, const Tree& value);

enum class Profile { Paper, Desk };
Profile parse_profile(const std::string& name);

/// [model] length, p1, p2, sigma_s2. Out-of-range values raise ConfigError
/// naming the field ("model.p1").
mg::MGParams model(const Tree& tree);

/// [filter] group_size, mu | mu_scale (mu = mu_scale / L), alpha, kappa, delta.
FilterConfig filter(const Tree& tree, std::size_t taps);

/// Assembles an experiment from [model], [filter], [experiment] and [run].
/// iterations = 0 (or absent) selects sim::suggest_iterations.
sim::ExperimentSpec experiment(const Tree& tree);

}  // namespace bslms::config

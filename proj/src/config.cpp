#include "bslms/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bslms/errors.hpp"
#include "bslms/io.hpp"

namespace bslms::config {

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path) {
        if (ch == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

const Tree* find(const Tree& tree, const std::string& path) {
    const Tree* node = &tree;
    for (const auto& key : split_path(path)) {
        if (!node->is_object()) return nullptr;
        auto it = node->find(key);
        if (it == node->end()) return nullptr;
        node = &*it;
    }
    return node;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& path, const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) throw ConfigError(path, "expected a number, got an empty value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || std::isnan(v)) {
        throw ConfigError(path, "expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& path, const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw ConfigError(path, "expected a non-negative integer, got '" + text + "'");
    }
    errno = 0;
    const auto v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ConfigError(path, "integer out of range: '" + text + "'");
    return v;
}

std::uint64_t as_unsigned(const std::string& path, const Tree& node) {
    if (node.is_number_unsigned()) return node.get<std::uint64_t>();
    if (node.is_number_integer()) {
        const auto v = node.get<std::int64_t>();
        if (v < 0) throw ConfigError(path, "must be non-negative, got " + std::to_string(v));
        return static_cast<std::uint64_t>(v);
    }
    if (node.is_number_float()) {
        const double v = node.get<double>();
        if (v < 0 || v != std::floor(v) || v > 1.8e19) throw ConfigError(path, "expected a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }
    if (node.is_string()) return parse_unsigned(path, node.get<std::string>());
    throw ConfigError(path, "expected a non-negative integer");
}

double as_double(const std::string& path, const Tree& node) {
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) return parse_number(path, node.get<std::string>());
    throw ConfigError(path, "expected a number");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

[[noreturn]] void missing(const std::string& path) { throw ConfigError(path, "required value is missing"); }

}  // namespace

Tree parse_json(const std::string& text) {
    try {
        return Tree::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string detail = e.what();
        if (const auto pos = detail.rfind(": "); pos != std::string::npos) detail = detail.substr(pos + 2);
        throw ConfigError("", "JSON parse error at line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + detail);
    }
}

Tree parse_ini(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", "INI parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }
    Tree out = Tree::object();
    for (const auto& [key, node] : pt) {
        if (node.empty()) {
            out[key] = node.data();
            continue;
        }
        Tree section = Tree::object();
        for (const auto& [k, v] : node) section[k] = v.data();
        out[key] = std::move(section);
    }
    return out;
}

Tree parse(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{' ? parse_json(text) : parse_ini(text);
    }
    return Tree::object();
}

Tree load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    Tree tree = parse(buf.str());
    if (tree.is_object() && tree.contains("manifest_version") && tree.contains("config")) return tree["config"];
    if (!tree.is_object()) throw ConfigError("", "top level of the config must be an object");
    return tree;
}

bool has(const Tree& tree, const std::string& path) { return find(tree, path) != nullptr; }

double get_double(const Tree& tree, const std::string& path, std::optional<double> fallback) {
    const Tree* node = find(tree, path);
    if (!node) {
        if (fallback) return *fallback;
        missing(path);
    }
    return as_double(path, *node);
}

std::uint64_t get_u64(const Tree& tree, const std::string& path, std::optional<std::uint64_t> fallback) {
    const Tree* node = find(tree, path);
    if (!node) {
        if (fallback) return *fallback;
        missing(path);
    }
    return as_unsigned(path, *node);
}

std::size_t get_size(const Tree& tree, const std::string& path, std::optional<std::size_t> fallback) {
    return static_cast<std::size_t>(get_u64(tree, path, fallback));
}

bool get_bool(const Tree& tree, const std::string& path, std::optional<bool> fallback) {
    const Tree* node = find(tree, path);
    if (!node) {
        if (fallback) return *fallback;
        missing(path);
    }
    if (node->is_boolean()) return node->get<bool>();
    if (node->is_string()) {
        const auto v = trim(node->get<std::string>());
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    }
    throw ConfigError(path, "expected true or false");
}

std::string get_string(const Tree& tree, const std::string& path, std::optional<std::string> fallback) {
    const Tree* node = find(tree, path);
    if (!node) {
        if (fallback) return *fallback;
        missing(path);
    }
    if (node->is_string()) return trim(node->get<std::string>());
    if (node->is_number()) return node->dump();
    throw ConfigError(path, "expected a string");
}

std::vector<double> get_double_list(const Tree& tree, const std::string& path) {
    const Tree* node = find(tree, path);
    if (!node) missing(path);
    std::vector<double> out;
    if (node->is_array()) {
        for (std::size_t i = 0; i < node->size(); ++i) out.push_back(as_double(path + "[" + std::to_string(i) + "]", (*node)[i]));
    } else if (node->is_string()) {
        for (const auto& item : split_list(node->get<std::string>())) out.push_back(parse_number(path, item));
    } else {
        out.push_back(as_double(path, *node));
    }
    return out;
}

std::vector<std::size_t> get_size_list(const Tree& tree, const std::string& path) {
    const Tree* node = find(tree, path);
    if (!node) missing(path);
    std::vector<std::size_t> out;
    if (node->is_array()) {
        for (std::size_t i = 0; i < node->size(); ++i) {
            out.push_back(as_unsigned(path + "[" + std::to_string(i) + "]", (*node)[i]));
        }
        return out;
    }
    if (!node->is_string()) {
        out.push_back(as_unsigned(path, *node));
        return out;
    }
    for (const auto& item : split_list(node->get<std::string>())) {
        if (const auto dots = item.find(".."); dots != std::string::npos) {
            const auto lo = parse_unsigned(path, item.substr(0, dots));
            const auto hi = parse_unsigned(path, item.substr(dots + 2));
            if (hi < lo) throw ConfigError(path, "empty range '" + item + "'");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(parse_unsigned(path, item));
        }
    }
    return out;
}

void set(Tree& tree, const std::string& path, const Tree& value) {
    Tree* node = &tree;
    const auto parts = split_path(path);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        Tree& child = (*node)[parts[i]];
        if (!child.is_object()) child = Tree::object();
        node = &child;
    }
    (*node)[parts.back()] = value;
}

void set_default(Tree& tree, const std::string& path, const Tree& value) {
    if (!has(tree, path)) set(tree, path, value);
}

Profile parse_profile(const std::string& name) {
    if (name == "paper") return Profile::Paper;
    if (name == "desk") return Profile::Desk;
    throw ConfigError("profile", "expected 'paper' or 'desk', got '" + name + "'");
}

mg::MGParams model(const Tree& tree) {
    mg::MGParams p;
    p.length = get_size(tree, "model.length");
    p.p1 = get_double(tree, "model.p1");
    p.p2 = get_double(tree, "model.p2");
    p.sigma_s2 = get_double(tree, "model.sigma_s2", 1.0);
    if (p.length == 0) throw ConfigError("model.length", "must be positive");
    auto prob = [](const char* field, double v) {
        if (!(v > 0.0 && v < 1.0)) {
            std::ostringstream msg;
            msg << "must lie in the open interval (0, 1), got " << v;
            throw ConfigError(field, msg.str());
        }
    };
    prob("model.p1", p.p1);
    prob("model.p2", p.p2);
    if (!(p.sigma_s2 > 0.0) || !std::isfinite(p.sigma_s2)) throw ConfigError("model.sigma_s2", "must be positive");
    return p;
}

FilterConfig filter(const Tree& tree, std::size_t taps) {
    FilterConfig cfg;
    cfg.taps = taps;
    cfg.group_size = get_size(tree, "filter.group_size", 1);
    if (has(tree, "filter.mu")) {
        cfg.mu = get_double(tree, "filter.mu");
    } else if (has(tree, "filter.mu_scale")) {
        cfg.mu = get_double(tree, "filter.mu_scale") / static_cast<double>(taps);
    } else {
        missing("filter.mu");
    }
    cfg.alpha = get_double(tree, "filter.alpha", 1.0);
    cfg.kappa = get_double(tree, "filter.kappa", 0.0);
    cfg.delta = get_double(tree, "filter.delta", 1e-8);

    if (cfg.group_size == 0 || cfg.group_size > taps) {
        throw ConfigError("filter.group_size", "must lie in [1, " + std::to_string(taps) + "]");
    }
    if (!(cfg.alpha > 0.0)) throw ConfigError("filter.alpha", "must be positive");
    if (!(cfg.kappa >= 0.0)) throw ConfigError("filter.kappa", "must be non-negative");
    if (!(cfg.delta >= 0.0)) throw ConfigError("filter.delta", "must be non-negative");
    try {
        cfg.check_step_size(get_double(tree, "experiment.sigma_x2", 1.0));
    } catch (const DomainError& e) {
        throw ConfigError("filter.mu", e.what());
    }
    return cfg;
}

sim::ExperimentSpec experiment(const Tree& tree) {
    sim::ExperimentSpec spec;
    spec.sigma_x2 = get_double(tree, "experiment.sigma_x2", 1.0);
    if (!(spec.sigma_x2 > 0.0)) throw ConfigError("experiment.sigma_x2", "must be positive");
    spec.snr_db = get_double(tree, "experiment.snr_db", 40.0);
    if (spec.snr_db == -INFINITY) throw ConfigError("experiment.snr_db", "must be finite or +inf");
    spec.trials_per_system = get_size(tree, "experiment.trials", 10);
    if (spec.trials_per_system == 0) throw ConfigError("experiment.trials", "must be >= 1");
    spec.master_seed = get_u64(tree, "run.seed", 1);
    spec.threads = get_size(tree, "run.threads", 0);

    std::size_t taps = 0;
    if (has(tree, "experiment.system_file")) {
        const auto file = get_string(tree, "experiment.system_file");
        try {
            spec.systems = io::read_columns(file);
        } catch (const std::exception& e) {
            throw ConfigError("experiment.system_file", e.what());
        }
        if (spec.systems.empty()) throw ConfigError("experiment.system_file", "no systems in '" + file + "'");
        taps = spec.systems.front().size();
        spec.system_count = spec.systems.size();
    } else {
        spec.model = model(tree);
        taps = spec.model->length;
        spec.system_count = get_size(tree, "experiment.systems", 100);
        if (spec.system_count == 0) throw ConfigError("experiment.systems", "must be >= 1");
    }
    spec.filter = filter(tree, taps);

    const auto rule = get_string(tree, "experiment.kappa_rule", "fixed");
    if (rule == "fixed") {
        spec.kappa_rule = sim::KappaRule::Fixed;
    } else if (rule == "optimal") {
        spec.kappa_rule = sim::KappaRule::PerSystemOptimal;
    } else {
        throw ConfigError("experiment.kappa_rule", "expected 'fixed' or 'optimal', got '" + rule + "'");
    }

    spec.iterations = get_size(tree, "experiment.iterations", 0);
    if (spec.iterations == 0) {
        spec.iterations = 1;
        spec.iterations = sim::suggest_iterations(spec);
    }
    return spec;
}

}  // namespace bslms::config

#include "seer/cli/config.hpp"

#include "seer/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace seer::cli {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::pls1: return "pls1";
    case Algorithm::ln_pls2: return "ln_pls2";
    case Algorithm::seer_a3: return "seer_a3";
    case Algorithm::seer_b2: return "seer_b2";
    case Algorithm::select: return "select";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    for (auto a : {Algorithm::pls1, Algorithm::ln_pls2, Algorithm::seer_a3, Algorithm::seer_b2, Algorithm::select})
        if (s == to_string(a)) return a;
    throw ConfigError("unknown algorithm '" + s + "' (pls1, ln_pls2, seer_a3, seer_b2, select)");
}

std::string RunConfig::resolved_dataset() const {
    const fs::path p(dataset_path);
    return p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

/// Drops an inline comment: ';' or '#' preceded by a blank.
std::string strip_comment(const std::string& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if ((s[i] == ';' || s[i] == '#') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class Section {
public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

    void allow(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : tree_) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
                throw ConfigError("[" + name_ + "]: unknown key '" + k + "'");
        }
    }

    std::optional<std::string> str(const char* key) const {
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) return trim(strip_comment(*v));
        return std::nullopt;
    }

    template <class T>
    std::optional<T> num(const char* key) const {
        auto s = str(key);
        if (!s) return std::nullopt;
        std::istringstream in(*s);
        T v{};
        if (!(in >> v) || !(in >> std::ws).eof())
            throw ConfigError("[" + name_ + "] " + key + ": not a valid number '" + *s + "'");
        return v;
    }

    std::optional<bool> flag(const char* key) const {
        auto s = str(key);
        if (!s) return std::nullopt;
        if (*s == "true" || *s == "1" || *s == "yes") return true;
        if (*s == "false" || *s == "0" || *s == "no") return false;
        throw ConfigError("[" + name_ + "] " + key + ": expected true or false");
    }

private:
    std::string name_;
    const pt::ptree& tree_;
};

Index count_value(const Section& s, const char* key, Index fallback, const std::string& where) {
    auto v = s.num<long long>(key);
    if (!v) return fallback;
    if (*v < 0) throw ConfigError(where + " " + key + ": must be non-negative");
    return static_cast<Index>(*v);
}

GroupSpec parse_group(const std::string& name, const Section& s) {
    s.allow({"variables", "metric", "blocks", "components", "min_components"});
    const std::string where = "[group " + name + "]";
    GroupSpec g;
    g.name = name;
    g.variables = split(s.str("variables").value_or(""), ',');
    if (g.variables.empty()) throw ConfigError(where + ": no variables");
    if (auto m = s.str("metric")) {
        try {
            g.metric = metric_kind_from_string(*m);
        } catch (const std::exception&) {
            throw ConfigError(where + " metric: unknown value '" + *m + "' (identity, inverse_gram, block_inverse)");
        }
        if (g.metric == MetricKind::custom)
            throw ConfigError(where + " metric: custom metrics are not available from a configuration file");
    }
    if (auto b = s.str("blocks")) {
        for (const auto& part : split(*b, '|')) g.blocks.push_back(split(part, ','));
    }
    if (g.metric == MetricKind::block_inverse && g.blocks.empty())
        throw ConfigError(where + ": block_inverse metric needs 'blocks = a,b | c'");
    if (!g.blocks.empty() && g.metric != MetricKind::block_inverse)
        throw ConfigError(where + ": 'blocks' only applies to the block_inverse metric");
    g.components = count_value(s, "components", 1, where);
    g.min_components = count_value(s, "min_components", 0, where);
    if (g.min_components > g.components)
        throw ConfigError(where + ": min_components exceeds components");
    return g;
}

} // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig cfg;
    cfg.base_dir = base_dir;
    std::vector<GroupSpec> groups;
    std::optional<std::string> dependent;
    bool saw_dataset = false;

    for (const auto& [key, sub] : tree) {
        if (sub.empty() && !sub.data().empty())
            throw ConfigError(source + ": key '" + key + "' outside any section");
        const Section s(key, sub);
        if (key == "dataset") {
            saw_dataset = true;
            s.allow({"path", "weights", "id_column"});
            cfg.dataset_path = s.str("path").value_or("");
            cfg.weights_column = s.str("weights").value_or("");
            cfg.id_column = s.str("id_column").value_or("");
        } else if (key == "model") {
            s.allow({"dependent", "algorithm", "dependent_components", "omega", "seed", "output",
                     "pls2_nesting", "score_threshold"});
            dependent = s.str("dependent");
            if (auto a = s.str("algorithm")) cfg.algorithm = algorithm_from_string(*a);
            cfg.dependent_components = count_value(s, "dependent_components", 0, "[model]");
            if (auto o = s.str("omega")) {
                try {
                    cfg.omega = omega_kind_from_string(*o);
                } catch (const std::exception&) {
                    throw ConfigError("[model] omega: unknown value '" + *o + "' (inv_inertia, inv_lambda1)");
                }
            }
            cfg.seed = s.num<std::uint64_t>("seed");
            cfg.output = s.str("output").value_or("");
            if (auto n = s.str("pls2_nesting")) {
                try {
                    cfg.nesting = pls2_nesting_from_string(*n);
                } catch (const std::exception&) {
                    throw ConfigError("[model] pls2_nesting: unknown value '" + *n + "' (conditioned, deflated)");
                }
            }
            cfg.score_threshold = s.num<double>("score_threshold");
        } else if (key == "options") {
            s.allow({"component_tol", "inner_tol", "max_outer", "max_inner", "init", "init_column", "safeguard"});
            auto& o = cfg.options;
            o.component_tol = s.num<double>("component_tol").value_or(o.component_tol);
            o.inner_tol = s.num<double>("inner_tol").value_or(o.inner_tol);
            o.max_outer = s.num<int>("max_outer").value_or(o.max_outer);
            o.max_inner = s.num<int>("max_inner").value_or(o.max_inner);
            if (auto i = s.str("init")) {
                if (*i == "first_pc") o.init = InitKind::first_pc;
                else if (*i == "column") o.init = InitKind::column;
                else throw ConfigError("[options] init: unknown value '" + *i + "' (first_pc, column)");
            }
            o.init_column = count_value(s, "init_column", o.init_column, "[options]");
            o.safeguard = s.flag("safeguard").value_or(o.safeguard);
            try {
                o.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("[options]: ") + e.what());
            }
        } else if (key.rfind("group ", 0) == 0) {
            const std::string name = trim(key.substr(6));
            if (name.empty()) throw ConfigError(source + ": group section without a name");
            groups.push_back(parse_group(name, s));
        } else {
            throw ConfigError(source + ": unknown section [" + key + "]");
        }
    }

    if (!saw_dataset || cfg.dataset_path.empty()) throw ConfigError(source + ": [dataset] path is required");
    if (!dependent || dependent->empty()) throw ConfigError(source + ": [model] dependent is required");

    bool found = false;
    for (auto& g : groups) {
        if (g.name == *dependent) {
            cfg.dependent = std::move(g);
            found = true;
        } else {
            cfg.predictors.push_back(std::move(g));
        }
    }
    if (!found) throw ConfigError(source + ": dependent group '" + *dependent + "' has no [group] section");
    if (cfg.predictors.empty()) throw ConfigError(source + ": no predictor group");

    std::set<std::string> seen;
    auto claim = [&](const GroupSpec& g) {
        for (const auto& v : g.variables)
            if (!seen.insert(v).second)
                throw ConfigError("variable '" + v + "' is listed twice (group " + g.name + ")");
        for (const auto& b : g.blocks)
            for (const auto& v : b)
                if (std::find(g.variables.begin(), g.variables.end(), v) == g.variables.end())
                    throw ConfigError("[group " + g.name + "] blocks: '" + v + "' is not a variable of the group");
    };
    claim(cfg.dependent);
    for (const auto& g : cfg.predictors) claim(g);

    if (cfg.algorithm == Algorithm::pls1 && cfg.dependent.variables.size() != 1)
        throw ConfigError("pls1 needs a dependent group with exactly one variable");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration '" + path + "'");
    const fs::path dir = fs::path(path).parent_path();
    return parse_config(in, dir.empty() ? "." : dir.string(), path);
}

} // namespace seer::cli

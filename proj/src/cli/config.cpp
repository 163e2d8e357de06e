#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace spdelab::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::string>& defaults()
{
    static const std::map<std::string, std::string> table{
        {"seed", "1"},
        {"grid.n_points", "127"},
        {"grid.n_modes", "64"},
        {"noise.lambda_decay", "inv"},
        {"noise.n_modes", "64"},
        {"noise.theta", "2"},
        {"reaction.name", "cubic"},
        {"reaction.k", "catalog"},
        {"reaction.param", "-1"},
        {"reaction.probe_range", "5"},
        {"sigma.kind", "feedback"},
        {"sigma.s0", "1"},
        {"sigma.s1", "0.5"},
        {"sigma.s2", "0.5"},
        {"observable.g1", "identity"},
        {"observable.g2", "mean"},
        {"observable.clip", "1"},
        {"feedback.depth", "0"},
        {"feedback.k_inner", "64"},
        {"init.profile", "sine"},
        {"init.amplitude", "1"},
        {"time.t", "1"},
        {"time.steps", "64"},
        {"run.eps", "0.001"},
        {"run.paths", "4"},
        {"run.picard_tol", "1e-4"},
        {"run.picard_max", "20"},
        {"salins.pairs", "20"},
        {"salins.scale", "0.1"},
        {"salins.window", "1"},
        {"salins.scheme", "splitting"},
        {"salins.yosida_n", "10000"},
        {"ldp.n_ctrl", "8"},
        {"ldp.tol_target", "1e-3"},
        {"ldp.mode", "1"},
        {"ldp.level", "0.5"},
        {"ldp.eps_grid", "0.04,0.02,0.01"},
        {"ldp.paths", "10000"},
        {"ldp.importance", "true"},
        {"c1.eps_grid", "0.01,0.005,0.0025,0.00125"},
        {"c1.paths", "32"},
        {"c1.mode", "1"},
        {"c1.value", "1"},
        {"probe.eps_grid", "0.001,0.004,0.016,0.064"},
        {"probe.n_noise", "4"},
    };
    return table;
}

double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError(key + ": '" + text + "' is not a finite number");
    return v;
}

}  // namespace

Config::Config() : values_(defaults())
{
    if (const char* env = std::getenv("SPDE_SEED")) set("seed", trim(env));
}

void Config::load(std::istream& in, const std::string& origin)
{
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        try {
            set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void Config::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    load(in, path);
}

void Config::set(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value)
{
    if (!defaults().contains(key)) throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError(key + ": empty value");
    values_[key] = value;
}

const std::string& Config::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Config::number(const std::string& key) const
{
    return parse_double(key, get(key));
}

int Config::integer(const std::string& key) const
{
    const std::string& text = get(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

std::uint64_t Config::unsigned_integer(const std::string& key) const
{
    const std::string& text = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
    return v;
}

bool Config::flag(const std::string& key) const
{
    const std::string& text = get(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

std::vector<double> Config::numbers(const std::string& key) const
{
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string Config::resolved() const
{
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t Config::hash() const
{
    return fnv1a64(resolved());
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    const auto [ptr, ec] = std::to_chars(buf, buf + 16, value, 16);
    std::string s(buf, ptr);
    return std::string(16 - s.size(), '0') + s;
}

Setup build_setup(const Config& config)
{
    SpatialGrid grid(config.integer("grid.n_points"), config.integer("grid.n_modes"));
    NoiseSpec noise =
        NoiseSpec::with_decay(parse_decay(config.get("noise.lambda_decay")), config.integer("noise.n_modes"));
    noise.theta = config.number("noise.theta");
    if (noise.n_modes() > grid.n_modes()) throw ConfigError("noise.n_modes exceeds grid.n_modes");

    ModelSpec model;
    const std::string& k = config.get("reaction.k");
    model.reaction = ReactionSpec::from_catalog(config.get("reaction.name"),
                                                k == "catalog" ? std::numeric_limits<double>::quiet_NaN()
                                                               : config.number("reaction.k"),
                                                config.number("reaction.param"));

    model.sigma.kind = parse_sigma_kind(config.get("sigma.kind"));
    model.sigma.s0 = config.number("sigma.s0");
    model.sigma.s1 = config.number("sigma.s1");
    model.sigma.s2 = config.number("sigma.s2");
    model.observable.g1 = parse_pointwise(config.get("observable.g1"));
    model.observable.g2 = parse_functional(config.get("observable.g2"));
    model.observable.clip_bound = config.number("observable.clip");
    if (!(model.observable.clip_bound > 0)) throw ConfigError("observable.clip must be positive");
    return {HeatSemigroup(grid), noise, model};
}

Field build_initial(const Config& config, const SpatialGrid& grid)
{
    const std::string& profile = config.get("init.profile");
    const double a = config.number("init.amplitude");
    if (profile == "zero") return Field::Zero(grid.n_points());
    if (profile == "sine") return grid.sample([a](double xi) { return a * std::sin(std::numbers::pi * xi); });
    if (profile == "bump")
        return grid.sample([a](double xi) { return a * 4.0 * xi * (1.0 - xi); });
    throw ConfigError("init.profile: unknown profile '" + profile + "' (expected zero, sine or bump)");
}

ValueFunction build_value_function(const Config& config)
{
    const int depth = config.integer("feedback.depth");
    if (depth < 0) throw ConfigError("feedback.depth must be >= 0");
    ValueFunction vf;
    vf.k_inner = config.integer("feedback.k_inner");
    if (depth > 0) {
        vf.kind = ValueFunction::Kind::monte_carlo;
        vf.m_fp = depth - 1;
    }
    vf.validate();
    return vf;
}

}  // namespace spdelab::cli

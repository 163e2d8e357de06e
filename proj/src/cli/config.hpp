#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/model.hpp"
#include "spdelab/value_function.hpp"

namespace spdelab::cli {

/// Malformed or unknown configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Flat `section.key = value` configuration. Every key has a default, so the
/// resolved form lists the full state of a run; unknown keys are rejected.
class Config {
public:
    /// All defaults; `seed` comes from SPDE_SEED when set.
    Config();

    /// Parses `key = value` lines; blank lines and lines starting with '#' are skipped.
    void load(std::istream& in, const std::string& origin = "<config>");
    void load_file(const std::string& path);

    /// Applies one `key=value` override.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.contains(key); }
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;

    /// Sorted `key = value` lines, one per key.
    std::string resolved() const;
    /// FNV-1a 64 of resolved().
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// The grid, noise and model described by the configuration.
Setup build_setup(const Config& config);
/// The initial condition from init.profile and init.amplitude.
Field build_initial(const Config& config, const SpatialGrid& grid);
/// feedback.depth = 0 evaluates the feedback by v_deterministic; depth d >= 1 uses
/// v_monte_carlo with fixed-point depth d - 1 and feedback.k_inner inner paths.
ValueFunction build_value_function(const Config& config);

}  // namespace spdelab::cli

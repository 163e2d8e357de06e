#include "cli/schema.hpp"

#include "cli/config.hpp"

#include <algorithm>
#include <map>

namespace spdelab::cli {

const std::vector<std::string>& schema_columns(const std::string& kind)
{
    static const std::map<std::string, std::vector<std::string>> table{
        {"paths", {"path_id", "time"}},
        {"eps-probe", {"eps", "mean_ratio", "stderr", "n_noise"}},
        {"c1-slope", {"eps", "error", "stderr"}},
        {"ldp-gap", {"eps", "estimate", "stderr", "hits", "eps_log_p", "I_star", "gap"}},
        {"salins-ratios", {"pair_id", "ratio", "bound", "pass"}},
    };
    const auto it = table.find(kind);
    if (it == table.end()) throw ConfigError("unknown CSV kind '" + kind + "'");
    return it->second;
}

std::optional<std::string> missing_column(const std::string& kind, const std::vector<std::string>& header)
{
    auto has = [&](const std::string& c) { return std::find(header.begin(), header.end(), c) != header.end(); };
    for (const std::string& c : schema_columns(kind))
        if (!has(c)) return c;
    if (kind == "paths" && !has("x1") && !has("c1")) return std::string("x1");
    return std::nullopt;
}

}  // namespace spdelab::cli

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spdelab::cli {

/// Column layouts of the CSV files read by the plotting side, keyed by figure kind:
/// paths, eps-probe, c1-slope, ldp-gap, salins-ratios.
const std::vector<std::string>& schema_columns(const std::string& kind);

/// The first required column missing from `header`, if any. For `paths` the node
/// (x1..) or coefficient (c1..) columns are required in addition to the fixed ones.
std::optional<std::string> missing_column(const std::string& kind, const std::vector<std::string>& header);

}  // namespace spdelab::cli

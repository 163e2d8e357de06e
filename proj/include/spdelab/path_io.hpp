#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spdelab/field.hpp"

namespace spdelab {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

/// Quotes a CSV cell when it contains a comma, quote or line break.
std::string csv_cell(const std::string& text);

/// Splits one CSV record, honouring double-quoted cells.
std::vector<std::string> split_csv_record(const std::string& line);

/// Minimal CSV emitter: comment lines first, then one header, then rows.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(const std::string& text);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
    std::size_t n_columns_ = 0;
};

/// Writes a path as
///
///     # grid n_points=<n> n_modes=<m>
///     time,x1,...,xn
///     <t>,<values...>
///
/// With `spectral` the columns hold sine coefficients c1..cm instead of node values.
void write_path(std::ostream& out, const SpatialGrid& grid, const Path& path, bool spectral = false);

struct LoadedPath {
    int n_points = 0;
    int n_modes = 0;
    bool spectral = false;
    Path path;
};

/// Parses the format produced by write_path. Throws DimensionError on malformed input.
LoadedPath read_path(std::istream& in);

}  // namespace spdelab

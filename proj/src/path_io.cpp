#include "spdelab/path_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace spdelab {

std::string format_number(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw DomainError("cannot format number");
    return std::string(buf, end);
}

std::string csv_cell(const std::string& text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

std::vector<std::string> split_csv_record(const std::string& line)
{
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else if (c != '\r') {
            cells.back() += c;
        }
    }
    return cells;
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns)
{
    n_columns_ = columns.size();
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (n_columns_ != 0 && cells.size() != n_columns_)
        throw DimensionError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(n_columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_cell(cells[i]);
    }
    out_ << '\n';
}

void write_path(std::ostream& out, const SpatialGrid& grid, const Path& path, bool spectral)
{
    if (path.n_points() != grid.n_points()) throw DimensionError("path does not match grid");
    CsvWriter csv(out);
    csv.comment("grid n_points=" + std::to_string(grid.n_points()) +
                " n_modes=" + std::to_string(grid.n_modes()));
    const int width = spectral ? grid.n_modes() : grid.n_points();
    std::vector<std::string> cols{"time"};
    for (int j = 1; j <= width; ++j) cols.push_back((spectral ? "c" : "x") + std::to_string(j));
    csv.header(cols);
    for (int m = 0; m <= path.n_steps(); ++m) {
        const Eigen::VectorXd values = spectral ? grid.to_spectral(path.field(m)) : Eigen::VectorXd(path.field(m));
        std::vector<std::string> cells{format_number(path.time(m))};
        for (int j = 0; j < width; ++j) cells.push_back(format_number(values[j]));
        csv.row(cells);
    }
}

LoadedPath read_path(std::istream& in)
{
    LoadedPath loaded;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# grid", 0) != 0)
        throw DimensionError("missing '# grid' header line");
    std::istringstream head(line.substr(6));
    std::string token;
    while (head >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto key = token.substr(0, eq);
        const int value = std::stoi(token.substr(eq + 1));
        if (key == "n_points") loaded.n_points = value;
        if (key == "n_modes") loaded.n_modes = value;
    }
    if (loaded.n_points < 3 || loaded.n_modes < 1) throw DimensionError("invalid grid header: " + line);

    while (std::getline(in, line) && line.rfind('#', 0) == 0) {}
    const auto columns = split_csv_record(line);
    if (columns.empty() || columns[0] != "time") throw DimensionError("expected 'time' as first column");
    loaded.spectral = columns.size() > 1 && columns[1].rfind('c', 0) == 0;
    const int width = static_cast<int>(columns.size()) - 1;
    if (width != (loaded.spectral ? loaded.n_modes : loaded.n_points))
        throw DimensionError("column count does not match the grid header");

    std::vector<double> times;
    std::vector<Eigen::VectorXd> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv_record(line);
        if (static_cast<int>(cells.size()) != width + 1) throw DimensionError("ragged CSV row");
        times.push_back(std::stod(cells[0]));
        Eigen::VectorXd r(width);
        for (int j = 0; j < width; ++j) r[j] = std::stod(cells[j + 1]);
        rows.push_back(std::move(r));
    }
    if (rows.size() < 2) throw DimensionError("a path needs at least two time nodes");

    const SpatialGrid grid(loaded.n_points, loaded.n_modes);
    loaded.path = Path(times.front(), times.back(), loaded.n_points, static_cast<int>(rows.size()) - 1);
    for (std::size_t m = 0; m < rows.size(); ++m)
        loaded.path.field(static_cast<int>(m)) = loaded.spectral ? grid.from_spectral(rows[m]) : rows[m];
    return loaded;
}

}  // namespace spdelab

#include "gmk/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace gmk {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, const std::string& name,
                  std::size_t row, std::size_t col) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    // allow surrounding whitespace only
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
        ++pos;
    if (pos != cell.size() || cell.empty() || !std::isfinite(v))
        throw InvalidInput(name + ": non-numeric cell at row " + std::to_string(row) +
                           ", column " + std::to_string(col + 1));
    return v;
}

} // namespace

SampleSet parse_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line))
        throw InvalidInput(name + ": empty file, expected header `time,x1,...,xm`");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_row(line);
    if (header.size() < 2 || header[0] != "time")
        throw InvalidInput(name + ": missing header `time,x1,...,xm`");
    const std::size_t m = header.size() - 1;

    std::vector<double> times;
    std::vector<double> cells;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_row(line);
        if (fields.size() != m + 1)
            throw InvalidInput(name + ": row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(m + 1));
        const double t = parse_cell(fields[0], name, row, 0);
        if (t <= 0.0)
            throw InvalidInput(name + ": times must be strictly positive (row " +
                               std::to_string(row) + ")");
        if (!times.empty() && t <= times.back())
            throw InvalidInput(name + ": times must be strictly increasing (row " +
                               std::to_string(row) + ")");
        times.push_back(t);
        for (std::size_t c = 0; c < m; ++c)
            cells.push_back(parse_cell(fields[c + 1], name, row, c + 1));
    }
    if (times.empty())
        throw InvalidInput(name + ": no data rows");

    const auto n = static_cast<Eigen::Index>(times.size());
    Matrix values(static_cast<Eigen::Index>(m), n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(m); ++k)
            values(k, i) = cells[static_cast<std::size_t>(i) * m +
                                 static_cast<std::size_t>(k)];
    return SampleSet(TimeGrid(std::move(times)), std::move(values));
}

SampleSet parse_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open input file: " + path);
    return parse_csv(in, path);
}

std::string render_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_forecast_csv(std::ostream& out, const Forecast& forecast, int dim) {
    const int m = dim;
    out << "time";
    for (int k = 1; k <= m; ++k) out << ",mean_" << k;
    for (int k = 1; k <= m; ++k) out << ",sd_" << k;
    for (int k = 1; k <= m; ++k) out << ",lo_" << k;
    for (int k = 1; k <= m; ++k) out << ",hi_" << k;
    out << "\n";
    for (std::size_t i = 0; i < forecast.query_times.size(); ++i) {
        out << render_double(forecast.query_times[i]);
        const Vector sd = forecast.sd(i), lo = forecast.lower(i), hi = forecast.upper(i);
        for (int k = 0; k < m; ++k) out << ',' << render_double(forecast.means[i][k]);
        for (int k = 0; k < m; ++k) out << ',' << render_double(sd[k]);
        for (int k = 0; k < m; ++k) out << ',' << render_double(lo[k]);
        for (int k = 0; k < m; ++k) out << ',' << render_double(hi[k]);
        out << "\n";
    }
}

void write_batch_csv(std::ostream& out, const PathBatch& batch) {
    out << "path_id,time";
    for (int k = 1; k <= batch.dim; ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t p = 0; p < batch.n_paths(); ++p) {
        for (std::size_t i = 0; i < batch.grid.size(); ++i) {
            out << p << ',' << render_double(batch.grid[i]);
            for (int k = 0; k < batch.dim; ++k)
                out << ',' << render_double(batch.paths[p](k, static_cast<Eigen::Index>(i)));
            out << "\n";
        }
    }
}

} // namespace gmk

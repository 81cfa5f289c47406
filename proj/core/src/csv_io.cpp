#include "flatshell/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace flatshell {

namespace {

void write_metadata(std::ostream& out, const std::string& metadata) {
  if (metadata.empty()) return;
  if (metadata.front() != '#') out << "# ";
  out << metadata << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(fmt::format("csv line {}: cannot parse '{}' as a number", line, s));
  }
  return v;
}

/// Reads a table with the given header; calls row(i, j, values) for every data row.
template <typename RowFn>
void read_table(std::istream& in, const std::string& header, const Grid& grid, std::size_t value_columns,
                RowFn&& row) {
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<char> seen(grid.size(), 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != header) throw std::runtime_error(fmt::format("csv line {}: expected header '{}'", line_no, header));
      saw_header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 4 + value_columns) {
      throw std::runtime_error(fmt::format("csv line {}: expected {} columns", line_no, 4 + value_columns));
    }
    const auto i = static_cast<int>(parse_double(cells[0], line_no));
    const auto j = static_cast<int>(parse_double(cells[1], line_no));
    if (i < 0 || j < 0 || i >= grid.n1() || j >= grid.n2()) {
      throw std::runtime_error(fmt::format("csv line {}: node ({}, {}) outside the grid", line_no, i, j));
    }
    std::vector<double> values;
    for (std::size_t c = 0; c < value_columns; ++c) values.push_back(parse_double(cells[4 + c], line_no));
    seen[grid.index(i, j)] = 1;
    row(i, j, values);
  }
  if (!saw_header) throw std::runtime_error("csv: missing header");
  for (char s : seen) {
    if (!s) throw std::runtime_error("csv: table does not cover every grid node");
  }
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

void write_field_csv(std::ostream& out, const DiscreteField& f, const std::string& metadata) {
  const Grid& g = f.grid();
  write_metadata(out, metadata);
  out << "i,j,y1,y2,value\n";
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i)
      out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", i, j, g.y1(i), g.y2(j), f(i, j));
}

DiscreteField read_field_csv(std::istream& in, const Grid& grid, BoundaryKind kind) {
  DiscreteField f(grid, kind);
  read_table(in, "i,j,y1,y2,value", grid, 1, [&](int i, int j, const std::vector<double>& v) { f(i, j) = v[0]; });
  return f;
}

DiscreteField read_field_csv(const std::filesystem::path& path, const Grid& grid, BoundaryKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_field_csv(in, grid, kind);
}

void write_displacement_csv(std::ostream& out, const DiscreteDisplacement& u, const std::string& metadata) {
  const Grid& g = u.grid();
  write_metadata(out, metadata);
  out << "i,j,y1,y2,u1,u2,u3\n";
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const auto k = static_cast<Eigen::Index>(g.index(i, j));
      out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, j, g.y1(i), g.y2(j),
                         u.component(0)[k], u.component(1)[k], u.component(2)[k]);
    }
  }
}

void export_solution(const DiscreteDisplacement& u, const std::filesystem::path& path, const std::string& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_displacement_csv(out, u, metadata);
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

DiscreteDisplacement read_displacement_csv(std::istream& in, const Grid& grid) {
  DiscreteDisplacement u(grid);
  read_table(in, "i,j,y1,y2,u1,u2,u3", grid, 3, [&](int i, int j, const std::vector<double>& v) {
    const auto k = static_cast<Eigen::Index>(grid.index(i, j));
    for (int c = 0; c < 3; ++c) u.component(c)[k] = v[static_cast<std::size_t>(c)];
  });
  return u;
}

DiscreteDisplacement import_solution(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_displacement_csv(in, grid);
}

void write_geometry_csv(std::ostream& out, const SurfaceGeometryField& field, const std::string& metadata) {
  const Grid& g = field.grid();
  write_metadata(out, metadata);
  out << "i,j,y1,y2,a11,a12,a22,b11,b12,b22,sqrt_a,K\n";
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const SurfacePoint& p = field.at(i, j);
      out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i,
                         j, g.y1(i), g.y2(j), p.metric(0, 0), p.metric(0, 1), p.metric(1, 1), p.curvature(0, 0),
                         p.curvature(0, 1), p.curvature(1, 1), p.sqrt_a, p.K);
    }
  }
}

}  // namespace flatshell

#include "ssf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ssf/geometry.hpp"

namespace ssf::io {

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::string& path, int columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (static_cast<int>(row.size()) != columns)
      throw std::runtime_error("io: bad column count in " + path);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_line(std::ofstream& out, std::initializer_list<double> vals) {
  char buf[64];
  bool first = true;
  for (double v : vals) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) out << ',';
    out << buf;
    first = false;
  }
  out << '\n';
}

}  // namespace

void write_curve_csv(const std::string& path, const Curve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "param,x1,x2\n";
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    write_line(out, {curve.param(i), curve.points(i, 0), curve.points(i, 1)});
}

Curve read_curve_csv(const std::string& path) {
  const auto rows = read_csv_rows(path, 3);
  Curve c;
  c.points.resize(rows.size(), 2);
  c.param.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    c.param(i) = rows[i][0];
    c.points(i, 0) = rows[i][1];
    c.points(i, 1) = rows[i][2];
  }
  geometry::validate(c);
  return c;
}

void write_grid_csv(const std::string& path, const GridField& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "s,value\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) write_line(out, {grid.coord(i), grid.values(i)});
}

GridField read_grid_csv(const std::string& path) {
  const auto rows = read_csv_rows(path, 2);
  if (rows.size() < 5) throw std::runtime_error("io: grid csv too short");
  GridField g;
  g.values.resize(rows.size());
  g.origin = rows.front()[0];
  g.spacing = (rows.back()[0] - rows.front()[0]) / double(rows.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i][0] - (g.origin + g.spacing * double(i))) > 1e-9 * (1 + std::abs(rows[i][0])))
      throw std::runtime_error("io: grid csv is not uniformly spaced");
    g.values(i) = rows[i][1];
  }
  ssf::validate(g);
  return g;
}

void write_trajectory(const std::string& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  char name[64];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::snprintf(name, sizeof name, "curve_%06zu.csv", i);
    write_curve_csv(dir + "/" + name, traj.states[i].curve);
  }
  std::ofstream out(dir + "/diagnostics.csv");
  if (!out) throw std::runtime_error("io: cannot write diagnostics in " + dir);
  out << "t,energy,length,bending,index,sup_kappa,sup_rhs\n";
  for (const auto& row : traj.diagnostics)
    write_line(out, {row.t, row.energy, row.length, row.bending, row.index, row.sup_kappa,
                     row.sup_rhs});
}

void write_checks_csv(const std::string& path, const std::vector<harness::CheckReport>& checks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "name,passed,measured,bound,seed\n";
  char buf[64];
  for (const auto& c : checks) {
    out << c.name << ',' << (c.passed ? 1 : 0) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.measured);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.bound);
    out << buf << ',' << c.seed << '\n';
  }
}

void write_svg(const std::string& path, const std::vector<Curve>& curves,
               const std::vector<std::string>& labels) {
  if (curves.empty()) throw std::invalid_argument("io: no curves for svg");
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves) {
    x0 = std::min(x0, c.points.col(0).minCoeff());
    x1 = std::max(x1, c.points.col(0).maxCoeff());
    y0 = std::min(y0, c.points.col(1).minCoeff());
    y1 = std::max(y1, c.points.col(1).maxCoeff());
  }
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-9;
  x0 -= pad;
  x1 += pad;
  y0 -= pad;
  y1 += pad;
  const double W = 900.0;
  const double H = W * (y1 - y0) / (x1 - x0);
  auto X = [&](double x) { return (x - x0) / (x1 - x0) * W; };
  auto Y = [&](double y) { return H - (y - y0) / (y1 - y0) * H; };  // svg y grows downward

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    out << "  <path fill=\"none\" stroke=\"" << palette[k % 5] << "\" stroke-width=\"1.5\" d=\"";
    for (Eigen::Index i = 0; i < c.size(); ++i)
      out << (i == 0 ? 'M' : 'L') << X(c.points(i, 0)) << ' ' << Y(c.points(i, 1)) << ' ';
    out << "\"/>\n";
    if (k < labels.size())
      out << "  <text x=\"12\" y=\"" << 18 * (k + 1) << "\" fill=\"" << palette[k % 5]
          << "\" font-size=\"13\">" << labels[k] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ssf::io

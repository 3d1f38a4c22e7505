#pragma once

#include <string>
#include <vector>

#include "ssf/harness.hpp"
#include "ssf/trajectory.hpp"
#include "ssf/types.hpp"

namespace ssf::io {

// Curve serialization: CSV `param,x1,x2`, full double precision.
void write_curve_csv(const std::string& path, const Curve& curve);
Curve read_curve_csv(const std::string& path);

// GridField serialization: CSV `s,value`.
void write_grid_csv(const std::string& path, const GridField& grid);
GridField read_grid_csv(const std::string& path);

/// Numbered curve CSVs plus diagnostics.csv with columns
/// t,energy,length,bending,index,sup_kappa,sup_rhs.
void write_trajectory(const std::string& dir, const Trajectory& traj);

/// checks.csv with columns name,passed,measured,bound,seed.
void write_checks_csv(const std::string& path, const std::vector<harness::CheckReport>& checks);

/// Plain-text SVG overlay of labeled curves (path elements only).
void write_svg(const std::string& path, const std::vector<Curve>& curves,
               const std::vector<std::string>& labels);

}  // namespace ssf::io

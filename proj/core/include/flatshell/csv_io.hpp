#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "flatshell/discrete_space.hpp"
#include "flatshell/geometry.hpp"

namespace flatshell {

inline constexpr const char* kToolVersion = "0.3.0";

/// Formats with 17 significant digits, which round-trips every double.
std::string format_real(double x);

/// `i,j,y1,y2,value`
void write_field_csv(std::ostream& out, const DiscreteField& f, const std::string& metadata = {});
/// Reads the field export format; rows may come in any order but must cover the grid.
DiscreteField read_field_csv(std::istream& in, const Grid& grid, BoundaryKind kind = BoundaryKind::free);
DiscreteField read_field_csv(const std::filesystem::path& path, const Grid& grid,
                             BoundaryKind kind = BoundaryKind::free);

/// `i,j,y1,y2,u1,u2,u3`
void write_displacement_csv(std::ostream& out, const DiscreteDisplacement& u, const std::string& metadata = {});
void export_solution(const DiscreteDisplacement& u, const std::filesystem::path& path,
                     const std::string& metadata = {});
DiscreteDisplacement read_displacement_csv(std::istream& in, const Grid& grid);
DiscreteDisplacement import_solution(const std::filesystem::path& path, const Grid& grid);

/// `i,j,y1,y2,a11,a12,a22,b11,b12,b22,sqrt_a,K`
void write_geometry_csv(std::ostream& out, const SurfaceGeometryField& field, const std::string& metadata = {});

}  // namespace flatshell

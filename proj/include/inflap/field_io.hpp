#pragma once

#include "inflap/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace inflap {

/// Contents of an IGLFIELD text file.
struct FieldFile {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 origin = Vec2::Zero();
  std::vector<double> values;  // row-major, row j at y0 + j h
};

/// Writes `IGLFIELD 1`, the header line and ny rows of nx values with 17
/// significant digits (`nan` outside).
void write_field(const std::filesystem::path& path, const ScalarField& field);
std::string format_field(const ScalarField& field);

FieldFile read_field(const std::filesystem::path& path);
FieldFile parse_field(const std::string& text);

/// Attaches file values to a grid; throws ConfigurationError when the lattice
/// does not match.
ScalarField to_scalar_field(const FieldFile& file, GridPtr grid, Extension ext);

}  // namespace inflap

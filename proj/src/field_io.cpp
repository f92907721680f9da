#include "inflap/field_io.hpp"

#include "inflap/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace inflap {

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_field(const ScalarField& field) {
  const Grid& g = *field.grid;
  std::string out = "IGLFIELD 1\n";
  out += std::to_string(g.nx()) + " " + std::to_string(g.ny()) + " " + fmt17(g.h()) + " " +
         fmt17(g.origin().x()) + " " + fmt17(g.origin().y()) + "\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i > 0) out += ' ';
      out += fmt17(field.values[g.index(i, j)]);
    }
    out += '\n';
  }
  return out;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigurationError("cannot write " + path.string());
  os << format_field(field);
}

FieldFile parse_field(const std::string& text) {
  std::istringstream is(text);
  std::string magic, version;
  is >> magic >> version;
  if (magic != "IGLFIELD" || version != "1") throw InvalidInput("not an IGLFIELD 1 file");
  FieldFile f;
  std::string tok;
  auto number = [&]() {
    if (!(is >> tok)) throw InvalidInput("IGLFIELD: truncated file");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw InvalidInput("IGLFIELD: bad number '" + tok + "'");
    return v;
  };
  f.nx = static_cast<int>(number());
  f.ny = static_cast<int>(number());
  if (f.nx <= 0 || f.ny <= 0) throw InvalidInput("IGLFIELD: bad dimensions");
  f.h = number();
  f.origin.x() = number();
  f.origin.y() = number();
  f.values.resize(static_cast<std::size_t>(f.nx) * f.ny);
  for (auto& v : f.values) v = number();
  return f;
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigurationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_field(ss.str());
}

ScalarField to_scalar_field(const FieldFile& file, GridPtr grid, Extension ext) {
  if (file.nx != grid->nx() || file.ny != grid->ny() || file.h != grid->h() || file.origin != grid->origin()) {
    throw ConfigurationError("IGLFIELD lattice does not match the grid");
  }
  ScalarField out(grid, ext);
  out.values = file.values;
  if (!out.mask_consistent()) throw ConfigurationError("IGLFIELD values do not match the inside mask");
  return out;
}

}  // namespace inflap

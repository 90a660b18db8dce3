#include <cmath>
#include <cstdio>
#include <fstream>

#include "music2d/scene.hpp"

namespace music2d {

namespace {

void export_csv(const FieldMap<double>& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "x,y,value\n";
  char buffer[128];
  for (Index iy = 0; iy < map.grid.ny(); ++iy) {
    for (Index ix = 0; ix < map.grid.nx(); ++ix) {
      std::snprintf(buffer, sizeof(buffer), "%.17g,%.17g,%.17g\n", map.grid.x(ix),
                    map.grid.y(iy), map.values(ix, iy));
      out << buffer;
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// binary P5, 16-bit big-endian, min-max scaled; top image row is ymax
void export_pgm(const FieldMap<double>& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "P5\n" << map.grid.nx() << " " << map.grid.ny() << "\n65535\n";
  const double lo = map.values.minCoeff();
  const double hi = map.values.maxCoeff();
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  for (Index iy = map.grid.ny() - 1; iy >= 0; --iy) {
    for (Index ix = 0; ix < map.grid.nx(); ++ix) {
      const auto level =
          static_cast<unsigned>(std::lround((map.values(ix, iy) - lo) * scale));
      const char bytes[2] = {static_cast<char>((level >> 8) & 0xff),
                             static_cast<char>(level & 0xff)};
      out.write(bytes, 2);
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void export_map(const FieldMap<double>& map, const std::filesystem::path& path,
                ExportFormat format) {
  if (!map.values.allFinite())
    throw std::invalid_argument("export_map: map has non-finite values");
  switch (format) {
    case ExportFormat::Csv:
      export_csv(map, path);
      return;
    case ExportFormat::Pgm:
      export_pgm(map, path);
      return;
  }
  throw std::invalid_argument("export_map: unknown format");
}

}  // namespace music2d

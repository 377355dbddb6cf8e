#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "kksketch/matrix.hpp"
#include "kksketch/measures.hpp"
#include "kksketch/sketch.hpp"

namespace kksketch {

/// Sketch CSV layout:
///   # {"n":..,"N":..,"seed":..,"provenance":..,"measure":{..}}
///   a1,a2,...,an
///   one row per a(j), values printed with 17 significant digits
/// so that reading the file back reproduces the coefficients bit-exactly.
void write_sketch_csv(std::ostream& out, const Sketch& sketch);

struct SketchFile {
  Matrix coeffs;
  std::uint64_t seed = 0;
  std::string provenance;
  std::optional<MeasureSpec> measure;
};

/// Parses the format written by write_sketch_csv. Throws std::runtime_error
/// on malformed input.
SketchFile read_sketch_csv(std::istream& in);

}  // namespace kksketch

#include "kksketch/sketch_io.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "kksketch/experiments.hpp"

namespace kksketch {

void write_sketch_csv(std::ostream& out, const Sketch& sketch) {
  nlohmann::json meta = {{"n", sketch.dim()},
                         {"N", sketch.rows()},
                         {"seed", sketch.seed()},
                         {"provenance", sketch.provenance()},
                         {"measure", sketch.measure() ? to_json(*sketch.measure()) : nlohmann::json(nullptr)}};
  out << "# " << meta.dump() << '\n';
  for (std::size_t i = 0; i < sketch.dim(); ++i) out << (i ? "," : "") << 'a' << (i + 1);
  out << '\n';
  out << std::setprecision(17);
  const auto& coeffs = sketch.coeffs();
  for (std::size_t j = 0; j < coeffs.rows(); ++j) {
    const auto row = coeffs.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

SketchFile read_sketch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("sketch csv: missing '# {json}' metadata line");
  }
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("sketch csv: bad metadata: ") + e.what());
  }
  const auto n = meta.at("n").get<std::size_t>();
  const auto rows = meta.at("N").get<std::size_t>();

  SketchFile file;
  file.seed = meta.value("seed", std::uint64_t{0});
  file.provenance = meta.value("provenance", std::string("explicit"));
  if (meta.contains("measure") && !meta.at("measure").is_null()) {
    file.measure = measure_from_json(meta.at("measure"), n);
  }
  if (!std::getline(in, line)) throw std::runtime_error("sketch csv: missing header row");

  file.coeffs = Matrix(rows, n);
  for (std::size_t j = 0; j < rows; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("sketch csv: fewer rows than N");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw std::runtime_error("sketch csv: bad number in row " + std::to_string(j + 1));
      }
      file.coeffs(j, i) = v;
      pos = end + 1;
      if (i + 1 < n && end == line.size()) throw std::runtime_error("sketch csv: short row");
    }
    if (pos < line.size()) throw std::runtime_error("sketch csv: long row");
  }
  return file;
}

}  // namespace kksketch

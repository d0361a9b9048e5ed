#include <string>

#include "cbo/calibration.hpp"
#include "cbo/config_file.hpp"
#include "cbo/error.hpp"

// Calibration model files share the key-value format of profiles:
//
//   method = platt                    method = isotonic
//   classes = N                       breakpoints = x0,x1,...
//   platt.a = a0,a1,...               values = v0,v1,...
//   platt.b = b0,b1,...
//   platt.degenerate = 0,1,...
//   platt.capped = 0,0,...

namespace cbo {

namespace {

std::vector<double> flags_to_doubles(const std::vector<PlattParams>& classes, bool PlattParams::*field) {
  std::vector<double> out;
  for (const auto& c : classes) out.push_back(c.*field ? 1.0 : 0.0);
  return out;
}

}  // namespace

KeyValueFile calibration_to_config(const CalibrationModel& model) {
  KeyValueFile file;
  if (const auto* platt = std::get_if<PlattModel>(&model)) {
    file.set("method", std::string("platt"));
    file.set("classes", std::to_string(platt->class_count()));
    std::vector<double> a, b;
    for (const auto& c : platt->classes()) {
      a.push_back(c.a);
      b.push_back(c.b);
    }
    file.set("platt.a", a);
    file.set("platt.b", b);
    file.set("platt.degenerate", flags_to_doubles(platt->classes(), &PlattParams::degenerate));
    file.set("platt.capped", flags_to_doubles(platt->classes(), &PlattParams::capped));
  } else {
    const auto& iso = std::get<IsotonicModel>(model);
    file.set("method", std::string("isotonic"));
    file.set("breakpoints", iso.breakpoints());
    file.set("values", iso.values());
  }
  return file;
}

CalibrationModel calibration_from_config(const KeyValueFile& file) {
  const auto& method = file.get("method");
  if (method == "isotonic") {
    try {
      return IsotonicModel(file.get_doubles("breakpoints"), file.get_doubles("values"));
    } catch (const InvalidArgument& e) {
      throw ParseError(file.source(), 0, "values", e.what());
    }
  }
  if (method != "platt") throw ParseError(file.source(), 0, "method", "unknown method '" + method + "'");

  const auto a = file.get_doubles("platt.a");
  const auto b = file.get_doubles("platt.b");
  const double classes = file.get_double("classes");
  if (a.size() != b.size() || static_cast<double>(a.size()) != classes) {
    throw ParseError(file.source(), 0, "classes", "parameter count does not match class count");
  }
  std::vector<double> degenerate(a.size(), 0.0);
  std::vector<double> capped(a.size(), 0.0);
  if (file.contains("platt.degenerate")) degenerate = file.get_doubles("platt.degenerate");
  if (file.contains("platt.capped")) capped = file.get_doubles("platt.capped");
  if (degenerate.size() != a.size() || capped.size() != a.size()) {
    throw ParseError(file.source(), 0, "platt.degenerate", "flag count does not match class count");
  }
  std::vector<PlattParams> params;
  for (std::size_t c = 0; c < a.size(); ++c) {
    PlattParams p;
    p.a = a[c];
    p.b = b[c];
    p.degenerate = degenerate[c] != 0.0;
    p.capped = capped[c] != 0.0;
    params.push_back(p);
  }
  return PlattModel(std::move(params));
}

void save_calibration(const CalibrationModel& model, const std::filesystem::path& path) {
  calibration_to_config(model).save(path);
}

CalibrationModel load_calibration(const std::filesystem::path& path) {
  return calibration_from_config(KeyValueFile::load(path));
}

}  // namespace cbo

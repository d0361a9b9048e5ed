#include "cbo/time.hpp"

#include <cmath>

#include "cbo/error.hpp"

namespace cbo {

Millis to_millis(double seconds) { return millis_from_ms(seconds * 1000.0); }

Millis millis_from_ms(double milliseconds) {
  if (!std::isfinite(milliseconds)) {
    throw InvalidArgument("time value is not finite");
  }
  return Millis{std::llround(milliseconds)};
}

double to_seconds(Millis t) { return static_cast<double>(t.count) / 1000.0; }

AccuracyUnits to_units(double accuracy) {
  if (!std::isfinite(accuracy)) {
    throw InvalidArgument("accuracy value is not finite");
  }
  return std::llround(accuracy * kAccuracyScale);
}

double from_units(AccuracyUnits units) { return static_cast<double>(units) / kAccuracyScale; }

ParseError::ParseError(std::string source, std::size_t line, std::string field,
                       const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": field '" + field + "': " + what),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

}  // namespace cbo

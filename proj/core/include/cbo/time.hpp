#ifndef CBO_TIME_HPP_
#define CBO_TIME_HPP_

#include <compare>
#include <cstdint>
#include <limits>

namespace cbo {

// Scheduling time on a 1 ms grid. Every deadline, window and dominance
// comparison in the library is done on this integer grid so that the label
// DPs, the online policy and the simulator agree bit for bit.
struct Millis {
  std::int64_t count{0};

  constexpr auto operator<=>(const Millis&) const = default;

  constexpr Millis& operator+=(Millis other) {
    count += other.count;
    return *this;
  }
  constexpr Millis& operator-=(Millis other) {
    count -= other.count;
    return *this;
  }
  friend constexpr Millis operator+(Millis a, Millis b) { return Millis{a.count + b.count}; }
  friend constexpr Millis operator-(Millis a, Millis b) { return Millis{a.count - b.count}; }
};

inline constexpr Millis kNoTime{std::numeric_limits<std::int64_t>::max() / 4};

// Nearest grid point.
Millis to_millis(double seconds);
Millis millis_from_ms(double milliseconds);
double to_seconds(Millis t);

// Accuracy in fixed point (1e-9 resolution) so that objective sums compare
// exactly regardless of summation order.
using AccuracyUnits = std::int64_t;
inline constexpr double kAccuracyScale = 1e9;

AccuracyUnits to_units(double accuracy);
double from_units(AccuracyUnits units);

}  // namespace cbo

#endif  // CBO_TIME_HPP_

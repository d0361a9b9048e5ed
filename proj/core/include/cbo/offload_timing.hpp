#ifndef CBO_OFFLOAD_TIMING_HPP_
#define CBO_OFFLOAD_TIMING_HPP_

#include <cstdint>
#include <optional>

#include "cbo/time.hpp"
#include "cbo/workload.hpp"

namespace cbo {

// Network and deadline parameters on the millisecond grid, shared by the
// offline solver, the online policies and the simulator.
struct LinkTiming {
  double bandwidth_bps{0.0};
  Millis server{};
  Millis latency{};
  Millis deadline{};
  // Time from arrival until a frame can be put on the uplink (local
  // inference plus calibration for confidence-driven decisions).
  Millis local_delay{};

  static LinkTiming from(const NetworkModel& network, const TimingConfig& timing,
                         double local_delay_s = 0.0);

  // Transmission time rounded up to the grid; nullopt on a dead link.
  std::optional<Millis> transmit_time(std::int64_t bytes) const;
  Millis round_trip_overhead() const { return server + latency; }
};

struct OffloadWindow {
  Millis start;
  Millis tx_done;
  Millis result_back;
};

// Serialized uplink: transmission starts at max(uplink_free, ready) and the
// result must be back by arrival + deadline. nullopt when that fails.
std::optional<OffloadWindow> offload_window(const LinkTiming& link, Millis uplink_free,
                                            Millis ready, Millis arrival, std::int64_t bytes);

// Latest admissible transmission completion for a frame arriving at `arrival`.
inline Millis latest_tx_done(const LinkTiming& link, Millis arrival) {
  return arrival + link.deadline - link.round_trip_overhead();
}

}  // namespace cbo

#endif  // CBO_OFFLOAD_TIMING_HPP_

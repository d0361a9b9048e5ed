#include "cbo/offload_timing.hpp"

#include <cmath>

#include "cbo/error.hpp"

namespace cbo {

LinkTiming LinkTiming::from(const NetworkModel& network, const TimingConfig& timing,
                            double local_delay_s) {
  network.validate();
  if (!(local_delay_s >= 0)) throw InvalidArgument("local delay must be >= 0");
  LinkTiming link;
  link.bandwidth_bps = network.bandwidth_bps;
  link.server = to_millis(network.server_time_s);
  link.latency = to_millis(network.latency_s);
  link.deadline = to_millis(timing.deadline_s());
  link.local_delay = to_millis(local_delay_s);
  return link;
}

std::optional<Millis> LinkTiming::transmit_time(std::int64_t bytes) const {
  if (bandwidth_bps <= 0) return std::nullopt;
  const double ms = static_cast<double>(bytes) * 8.0 * 1000.0 / bandwidth_bps;
  if (!std::isfinite(ms) || ms > static_cast<double>(kNoTime.count)) return std::nullopt;
  return Millis{static_cast<std::int64_t>(std::ceil(ms))};
}

std::optional<OffloadWindow> offload_window(const LinkTiming& link, Millis uplink_free,
                                            Millis ready, Millis arrival, std::int64_t bytes) {
  const auto tx = link.transmit_time(bytes);
  if (!tx) return std::nullopt;
  OffloadWindow w;
  w.start = std::max(uplink_free, ready);
  w.tx_done = w.start + *tx;
  w.result_back = w.tx_done + link.round_trip_overhead();
  if (w.result_back > arrival + link.deadline) return std::nullopt;
  return w;
}

}  // namespace cbo

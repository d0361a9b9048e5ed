#ifndef CBO_TESTS_ORACLES_HPP_
#define CBO_TESTS_ORACLES_HPP_

// Reference implementations used only by tests. They share no code with the
// library beyond the data types.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cbo/calibration.hpp"
#include "cbo/offload_timing.hpp"
#include "cbo/policies.hpp"
#include "cbo/workload.hpp"

namespace cbo::oracle {

// Transmission time in ms, rounded up.
std::optional<std::int64_t> tx_ms(const LinkTiming& link, std::int64_t bytes);

struct OfflineBest {
  AccuracyUnits units{0};
  std::vector<std::optional<std::size_t>> choices;
};

// Best of all (m+1)^n choices with a FIFO uplink in frame order.
OfflineBest best_offline(const FrameTrace& trace, const AccuracyProfile& profile,
                         const LinkTiming& link);

// Total units of `choices`, or nullopt if some offload misses its deadline.
std::optional<AccuracyUnits> offline_value(const FrameTrace& trace, const AccuracyProfile& profile,
                                           const LinkTiming& link,
                                           std::span<const std::optional<std::size_t>> choices);

// Best improvement over all-local of any resolution assignment to the
// buffered frames, transmitted in buffer order starting at uplink_free.
AccuracyUnits best_online(std::span<const BufferedFrame> buffered, const AccuracyProfile& profile,
                          const LinkTiming& link, Millis uplink_free);

// Improvement of one plan (offloads in buffer order), nullopt if infeasible.
std::optional<AccuracyUnits> online_value(std::span<const BufferedFrame> buffered,
                                          const AccuracyProfile& profile, const LinkTiming& link,
                                          Millis uplink_free,
                                          std::span<const PlannedOffload> offloads);

bool subset_sums_to(std::span<const std::int64_t> numbers, std::int64_t target);

// Least-squares isotonic fit by enumerating every split of the sorted,
// tie-pooled points into contiguous blocks. Returns the fitted value of each
// input sample, in input order.
std::vector<double> isotonic_by_partitions(std::span<const IsotonicSample> samples);

}  // namespace cbo::oracle

#endif  // CBO_TESTS_ORACLES_HPP_

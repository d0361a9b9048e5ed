#include <algorithm>

#include "cbo/error.hpp"
#include "cbo/policies.hpp"

namespace cbo {

PolicyDecision cbo_decide(std::span<const BufferedFrame> buffered, const AccuracyProfile& profile,
                          const LinkTiming& link, Millis uplink_free, BacktrackMode mode,
                          CboDebug* debug) {
  const std::size_t m = profile.resolution_count();
  for (std::size_t j = 0; j < buffered.size(); ++j) {
    if (j > 0 && buffered[j].confidence > buffered[j - 1].confidence) {
      throw InvalidArgument("cbo_decide: buffer must be sorted by non-increasing confidence");
    }
    if (buffered[j].size_bytes.size() != m) {
      throw InvalidArgument("cbo_decide: frame sizes do not match the profile resolutions");
    }
  }

  // lists[j] holds the Pareto frontier after deciding the first j frames.
  std::vector<std::vector<ParetoPair>> lists(buffered.size() + 1);
  lists[0].push_back(ParetoPair{uplink_free, 0, -1, -1});

  for (std::size_t j = 1; j <= buffered.size(); ++j) {
    const auto& frame = buffered[j - 1];
    const AccuracyUnits local_units = to_units(npu_accuracy(profile, frame.confidence));
    const auto& prev = lists[j - 1];

    std::vector<ParetoPair> candidates;
    candidates.reserve(prev.size() * (m + 1));
    for (std::size_t idx = 0; idx < prev.size(); ++idx) {
      const auto& pair = prev[idx];
      const auto parent = static_cast<std::int32_t>(idx);
      candidates.push_back(ParetoPair{pair.t, pair.gain, parent, -1});
      for (std::size_t r = 0; r < m; ++r) {
        const auto w = offload_window(link, pair.t, frame.ready, frame.arrival, frame.size_bytes[r]);
        if (!w) continue;
        const AccuracyUnits gain = to_units(profile.server_accuracy[r]) - local_units;
        candidates.push_back(
            ParetoPair{w->tx_done, pair.gain + gain, parent, static_cast<std::int32_t>(r)});
      }
    }

    // Ascending t, then descending gain; exact duplicates keep the smaller
    // resolution ("no offload" counts as smallest).
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
      if (x.t != y.t) return x.t < y.t;
      if (x.gain != y.gain) return x.gain > y.gain;
      return x.resolution < y.resolution;
    });
    auto& frontier = lists[j];
    for (const auto& c : candidates) {
      if (frontier.empty() || c.gain > frontier.back().gain) frontier.push_back(c);
    }
  }

  PolicyDecision decision;
  const auto& last = lists.back();
  const ParetoPair& best = last.back();  // frontier gain is strictly increasing
  if (best.gain > 0) {
    decision.improvement_units = best.gain;
    std::int32_t idx = static_cast<std::int32_t>(last.size()) - 1;
    for (std::size_t j = buffered.size(); j >= 1; --j) {
      const auto& pair = lists[j][static_cast<std::size_t>(idx)];
      if (pair.resolution >= 0) {
        const auto r = static_cast<std::size_t>(pair.resolution);
        decision.offloads.push_back(PlannedOffload{j - 1, buffered[j - 1].frame_index, r});
        // Walking back towards higher confidence: the last match wins.
        decision.threshold = buffered[j - 1].confidence;
        decision.resolution = r;
      }
      idx = pair.parent;
    }
    if (mode == BacktrackMode::ThresholdResolution) {
      decision.offloads.clear();
      for (std::size_t j = 0; j < buffered.size(); ++j) {
        if (buffered[j].confidence <= decision.threshold) {
          decision.offloads.push_back(
              PlannedOffload{j, buffered[j].frame_index, decision.resolution});
        }
      }
    }
    std::sort(decision.offloads.begin(), decision.offloads.end(), [&](const auto& x, const auto& y) {
      const auto& fx = buffered[x.buffer_pos];
      const auto& fy = buffered[y.buffer_pos];
      if (fx.arrival != fy.arrival) return fx.arrival < fy.arrival;
      return fx.frame_index < fy.frame_index;
    });
  }

  if (debug) debug->lists = std::move(lists);
  return decision;
}

}  // namespace cbo

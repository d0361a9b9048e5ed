#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace cbo::oracle {

std::optional<std::int64_t> tx_ms(const LinkTiming& link, std::int64_t bytes) {
  if (link.bandwidth_bps <= 0) return std::nullopt;
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(bytes) * 8000.0 / link.bandwidth_bps));
}

namespace {

std::int64_t ms_of(double seconds) { return std::llround(seconds * 1000.0); }

std::int64_t units_of(double accuracy) { return std::llround(accuracy * 1e9); }

double npu(const AccuracyProfile& profile, double confidence) {
  const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(confidence * 10.0));
  return profile.npu_accuracy_bins[bin];
}

// Shared by both searches: push one frame through the uplink.
bool send(const LinkTiming& link, std::int64_t& free, std::int64_t ready, std::int64_t arrival,
          std::int64_t bytes) {
  const auto tx = tx_ms(link, bytes);
  if (!tx) return false;
  const std::int64_t done = std::max(free, ready) + *tx;
  if (done + link.server.count + link.latency.count > arrival + link.deadline.count) return false;
  free = done;
  return true;
}

}  // namespace

std::optional<AccuracyUnits> offline_value(const FrameTrace& trace, const AccuracyProfile& profile,
                                           const LinkTiming& link,
                                           std::span<const std::optional<std::size_t>> choices) {
  std::int64_t free = std::numeric_limits<std::int64_t>::min() / 4;
  AccuracyUnits total = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& f = trace.frames[i];
    if (!choices[i]) {
      total += units_of(npu(profile, f.calibrated_confidence));
      continue;
    }
    const auto arrival = ms_of(f.arrival_s);
    if (!send(link, free, arrival + link.local_delay.count, arrival, f.size_bytes[*choices[i]])) {
      return std::nullopt;
    }
    total += units_of(profile.server_accuracy[*choices[i]]);
  }
  return total;
}

OfflineBest best_offline(const FrameTrace& trace, const AccuracyProfile& profile,
                         const LinkTiming& link) {
  const std::size_t n = trace.size();
  const std::size_t m = profile.resolutions.size();
  OfflineBest best;
  bool have = false;
  std::vector<std::optional<std::size_t>> choices(n);
  // Odometer over {local, 0..m-1}^n.
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      choices[i] = digit[i] == 0 ? std::nullopt : std::optional<std::size_t>(digit[i] - 1);
    }
    if (const auto v = offline_value(trace, profile, link, choices); v && (!have || *v > best.units)) {
      best.units = *v;
      best.choices = choices;
      have = true;
    }
    std::size_t i = 0;
    while (i < n && ++digit[i] > m) digit[i++] = 0;
    if (i == n) break;
  }
  return best;
}

std::optional<AccuracyUnits> online_value(std::span<const BufferedFrame> buffered,
                                          const AccuracyProfile& profile, const LinkTiming& link,
                                          Millis uplink_free,
                                          std::span<const PlannedOffload> offloads) {
  std::vector<std::optional<std::size_t>> res(buffered.size());
  for (const auto& p : offloads) {
    if (p.buffer_pos >= buffered.size() || res[p.buffer_pos]) return std::nullopt;
    res[p.buffer_pos] = p.resolution;
  }
  std::int64_t free = uplink_free.count;
  AccuracyUnits gain = 0;
  for (std::size_t j = 0; j < buffered.size(); ++j) {
    if (!res[j]) continue;
    const auto& b = buffered[j];
    if (!send(link, free, b.ready.count, b.arrival.count, b.size_bytes[*res[j]])) return std::nullopt;
    gain += units_of(profile.server_accuracy[*res[j]]) -
            units_of(npu(profile, b.confidence));
  }
  return gain;
}

AccuracyUnits best_online(std::span<const BufferedFrame> buffered, const AccuracyProfile& profile,
                          const LinkTiming& link, Millis uplink_free) {
  const std::size_t k = buffered.size();
  const std::size_t m = profile.resolutions.size();
  AccuracyUnits best = 0;
  std::vector<std::size_t> digit(k, 0);
  while (true) {
    std::vector<PlannedOffload> plan;
    for (std::size_t j = 0; j < k; ++j) {
      if (digit[j] > 0) plan.push_back(PlannedOffload{j, buffered[j].frame_index, digit[j] - 1});
    }
    if (const auto v = online_value(buffered, profile, link, uplink_free, plan)) best = std::max(best, *v);
    std::size_t j = 0;
    while (j < k && ++digit[j] > m) digit[j++] = 0;
    if (j == k) break;
  }
  return best;
}

bool subset_sums_to(std::span<const std::int64_t> numbers, std::int64_t target) {
  const std::size_t n = numbers.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) sum += numbers[i];
    }
    if (sum == target) return true;
  }
  return false;
}

std::vector<double> isotonic_by_partitions(std::span<const IsotonicSample> samples) {
  // Pool ties: one weighted point per distinct score.
  std::map<double, std::pair<double, double>> pooled;  // score -> (label sum, count)
  for (const auto& s : samples) {
    auto& p = pooled[s.score];
    p.first += s.label ? 1.0 : 0.0;
    p.second += 1.0;
  }
  std::vector<double> sums, counts, scores;
  for (const auto& [score, p] : pooled) {
    scores.push_back(score);
    sums.push_back(p.first);
    counts.push_back(p.second);
  }
  const std::size_t k = scores.size();

  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> best_fit;
  // Bit i of `cuts` set: a block ends after point i.
  for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (k - 1)); ++cuts) {
    std::vector<double> fit(k);
    double prev_mean = -1.0;
    bool monotone = true;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < k && monotone; ++i) {
      const bool last = i + 1 == k || (cuts >> i & 1);
      if (!last) continue;
      double s = 0, c = 0;
      for (std::size_t t = begin; t <= i; ++t) {
        s += sums[t];
        c += counts[t];
      }
      const double mean = s / c;
      if (mean < prev_mean) monotone = false;
      for (std::size_t t = begin; t <= i; ++t) fit[t] = mean;
      prev_mean = mean;
      begin = i + 1;
    }
    if (!monotone) continue;
    double sse = 0;
    for (const auto& smp : samples) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(scores.begin(), scores.end(), smp.score) - scores.begin());
      const double d = (smp.label ? 1.0 : 0.0) - fit[idx];
      sse += d * d;
    }
    if (sse < best_sse - 1e-12) {
      best_sse = sse;
      best_fit = fit;
    }
  }

  std::vector<double> out;
  for (const auto& smp : samples) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(scores.begin(), scores.end(), smp.score) - scores.begin());
    out.push_back(best_fit[idx]);
  }
  return out;
}

}  // namespace cbo::oracle

#include "cbo/optimal.hpp"

#include <cstdlib>

#include "cbo/error.hpp"

namespace cbo {

namespace {

void check_compatible(const FrameTrace& trace, const AccuracyProfile& profile) {
  profile.validate();
  if (trace.resolutions != profile.resolutions) {
    throw InvalidArgument("trace and profile resolutions differ");
  }
}

// Per-frame quantities shared by the DP graph and the enumeration oracle.
struct FrameTerms {
  Millis arrival;
  Millis ready;
  AccuracyUnits local_units;
};

FrameTerms frame_terms(const Frame& f, const AccuracyProfile& profile, const LinkTiming& link) {
  const Millis arrival = to_millis(f.arrival_s);
  return FrameTerms{arrival, arrival + link.local_delay,
                    to_units(npu_accuracy(profile, f.calibrated_confidence))};
}

constexpr Millis kUnboundedPast{-kNoTime.count};

}  // namespace

std::size_t Schedule::offloaded_count() const {
  std::size_t n = 0;
  for (const auto& d : decisions) n += d.offloaded() ? 1 : 0;
  return n;
}

LayeredGraph build_solution_graph(const FrameTrace& trace, const AccuracyProfile& profile,
                                  const LinkTiming& link) {
  check_compatible(trace, profile);
  const std::size_t m = profile.resolution_count();
  LayeredGraph graph;
  graph.start_time = kUnboundedPast;
  graph.levels.reserve(trace.size());
  for (const auto& f : trace.frames) {
    const auto terms = frame_terms(f, profile, link);
    std::vector<GraphNode> level(m + 1);

    auto& local = level[0];
    local.earliest = terms.arrival;
    local.cost = -terms.local_units;

    for (std::size_t r = 0; r < m; ++r) {
      auto& node = level[r + 1];
      node.earliest = terms.ready;
      node.service = link.transmit_time(f.size_bytes[r]).value_or(kNoTime);
      node.latest = latest_tx_done(link, terms.arrival);
      node.cost = -to_units(profile.server_accuracy[r]);
    }
    graph.levels.push_back(std::move(level));
  }
  return graph;
}

std::optional<Schedule> evaluate_choices(const FrameTrace& trace, const AccuracyProfile& profile,
                                         const LinkTiming& link,
                                         std::span<const std::optional<std::size_t>> choices) {
  check_compatible(trace, profile);
  if (choices.size() != trace.size()) throw InvalidArgument("one choice per frame required");

  Schedule schedule;
  Millis free = kUnboundedPast;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Frame& f = trace.frames[i];
    const auto terms = frame_terms(f, profile, link);
    Decision d;
    d.frame_index = f.index;
    if (const auto r = choices[i]) {
      if (*r >= profile.resolution_count()) throw InvalidArgument("unknown resolution position");
      const auto w = offload_window(link, free, terms.ready, terms.arrival, f.size_bytes[*r]);
      if (!w) return std::nullopt;
      free = w->tx_done;
      d.offload_resolution = *r;
      d.start_s = to_seconds(w->start);
      d.finish_s = to_seconds(w->result_back);
      schedule.uplink.push_back(Transmission{f.index, w->start, w->tx_done});
      schedule.objective_units += to_units(profile.server_accuracy[*r]);
    } else {
      d.start_s = to_seconds(terms.arrival);
      d.finish_s = to_seconds(terms.ready);
      schedule.objective_units += terms.local_units;
    }
    schedule.decisions.push_back(d);
  }
  // From the integer objective, so tied schedules report identical accuracy.
  schedule.expected_accuracy =
      trace.empty() ? 0.0 : from_units(schedule.objective_units) / static_cast<double>(trace.size());
  return schedule;
}

Schedule solve_optimal(const FrameTrace& trace, const AccuracyProfile& profile,
                       const LinkTiming& link, const LabelOptions& options, LabelStats* stats) {
  const auto graph = build_solution_graph(trace, profile, link);
  auto solution = solve_layered(graph, options);
  // The all-local path is always admissible.
  if (!solution.feasible) throw Error("solve_optimal: no feasible path (internal error)");

  std::vector<std::optional<std::size_t>> choices(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (solution.path[i] > 0) choices[i] = solution.path[i] - 1;
  }
  auto schedule = evaluate_choices(trace, profile, link, choices);
  if (!schedule || schedule->objective_units != -solution.cost) {
    throw Error("solve_optimal: DP path disagrees with the timeline check (internal error)");
  }
  if (stats) *stats = std::move(solution.stats);
  return std::move(*schedule);
}

Schedule solve_optimal(const FrameTrace& trace, const AccuracyProfile& profile,
                       const NetworkModel& network, const TimingConfig& timing,
                       double local_delay_s) {
  return solve_optimal(trace, profile, LinkTiming::from(network, timing, local_delay_s));
}

Schedule enumerate_bruteforce(const FrameTrace& trace, const AccuracyProfile& profile,
                              const LinkTiming& link) {
  check_compatible(trace, profile);
  const std::size_t n = trace.size();
  const std::uint64_t options = profile.resolution_count() + 1;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= options;
    if (total > kBruteForceLimit) {
      throw InvalidArgument("enumerate_bruteforce: instance too large for exhaustive search");
    }
  }

  std::vector<FrameTerms> terms;
  for (const auto& f : trace.frames) terms.push_back(frame_terms(f, profile, link));

  // digits[0] is most significant, so enumeration order is lexicographic
  // with "local" (digit 0) first.
  std::vector<std::uint64_t> digits(n, 0);
  std::vector<std::uint64_t> best_digits;
  AccuracyUnits best_units = 0;
  bool have_best = false;

  for (std::uint64_t code = 0; code < total; ++code) {
    Millis free = kUnboundedPast;
    AccuracyUnits units = 0;
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      if (digits[i] == 0) {
        units += terms[i].local_units;
        continue;
      }
      const std::size_t r = digits[i] - 1;
      const auto w = offload_window(link, free, terms[i].ready, terms[i].arrival,
                                    trace.frames[i].size_bytes[r]);
      if (!w) {
        feasible = false;
        break;
      }
      free = w->tx_done;
      units += to_units(profile.server_accuracy[r]);
    }
    if (feasible && (!have_best || units > best_units)) {
      best_units = units;
      best_digits = digits;
      have_best = true;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < options) break;
      digits[i] = 0;
    }
  }

  std::vector<std::optional<std::size_t>> choices(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (best_digits[i] > 0) choices[i] = best_digits[i] - 1;
  }
  auto schedule = evaluate_choices(trace, profile, link, choices);
  return std::move(*schedule);
}

LayeredGraph subset_sum_gadget(std::span<const std::int64_t> numbers, std::int64_t target) {
  if (numbers.size() > 20) throw InvalidArgument("subset_sum_gadget: at most 20 numbers");
  std::int64_t span = 0;
  for (auto a : numbers) span += std::llabs(a);

  LayeredGraph graph;
  graph.start_time = Millis{0};
  for (auto a : numbers) {
    GraphNode skip;
    skip.earliest = Millis{-span};
    skip.latest = Millis{span};
    skip.can_wait = false;
    GraphNode take = skip;
    take.exit_duration = Millis{a};
    graph.levels.push_back({skip, take});
  }
  graph.end.earliest = Millis{target};
  graph.end.latest = Millis{target};
  graph.end.can_wait = false;
  return graph;
}

}  // namespace cbo

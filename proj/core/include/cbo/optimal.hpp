#ifndef CBO_OPTIMAL_HPP_
#define CBO_OPTIMAL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbo/label_dp.hpp"
#include "cbo/offload_timing.hpp"
#include "cbo/workload.hpp"

namespace cbo {

struct Decision {
  int frame_index{0};
  // Resolution position when offloaded, nullopt for local.
  std::optional<std::size_t> offload_resolution;
  double start_s{0.0};
  double finish_s{0.0};

  bool offloaded() const { return offload_resolution.has_value(); }
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct Transmission {
  int frame_index{0};
  Millis start;
  Millis end;
  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct Schedule {
  std::vector<Decision> decisions;
  std::vector<Transmission> uplink;
  // (1/n) * sum of per-frame profile accuracies, summed in frame order.
  double expected_accuracy{0.0};
  AccuracyUnits objective_units{0};

  std::size_t offloaded_count() const;
};

// Exact offline optimum of the time-windowed label DP. Frame i may start
// transmitting at arrival + link.local_delay; the uplink is FIFO in frame
// order. Confidence must already be calibrated.
Schedule solve_optimal(const FrameTrace& trace, const AccuracyProfile& profile,
                       const LinkTiming& link, const LabelOptions& options = {},
                       LabelStats* stats = nullptr);
Schedule solve_optimal(const FrameTrace& trace, const AccuracyProfile& profile,
                       const NetworkModel& network, const TimingConfig& timing,
                       double local_delay_s = 0.0);

// The solution graph of a trace (one local node plus one node per
// resolution at every level).
LayeredGraph build_solution_graph(const FrameTrace& trace, const AccuracyProfile& profile,
                                  const LinkTiming& link);

inline constexpr std::uint64_t kBruteForceLimit = std::uint64_t{1} << 20;  // 4^10

// Exhaustive (m+1)^n enumeration; throws InvalidArgument above kBruteForceLimit.
Schedule enumerate_bruteforce(const FrameTrace& trace, const AccuracyProfile& profile,
                              const LinkTiming& link);

// Expands per-frame choices into a timed schedule. nullopt if any offload
// misses its deadline.
std::optional<Schedule> evaluate_choices(const FrameTrace& trace, const AccuracyProfile& profile,
                                         const LinkTiming& link,
                                         std::span<const std::optional<std::size_t>> choices);

// Subset-sum reduction gadget: two nodes per number with zero cost, the
// "take" node leaving after a_i, per-node windows [-sum|a|, sum|a|], and an
// end window of exactly [K, K].
LayeredGraph subset_sum_gadget(std::span<const std::int64_t> numbers, std::int64_t target);

void save_schedule(const Schedule& schedule, const FrameTrace& trace,
                   const std::filesystem::path& path);
std::string write_schedule(const Schedule& schedule, const FrameTrace& trace);
Schedule load_schedule(const std::filesystem::path& path, const FrameTrace& trace);
Schedule parse_schedule(std::string_view text, const FrameTrace& trace,
                        const std::string& source = "<memory>");

}  // namespace cbo

#endif  // CBO_OPTIMAL_HPP_

#ifndef CBO_SIMULATOR_HPP_
#define CBO_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "cbo/optimal.hpp"
#include "cbo/policies.hpp"
#include "cbo/time.hpp"
#include "cbo/workload.hpp"

namespace cbo {

struct SimParams {
  double npu_time_s{0.020};
  double calib_time_s{0.008};

  double local_delay_s() const { return npu_time_s + calib_time_s; }
};

// Equal timestamps are processed in this order so that results commit
// before new decisions.
enum class EventKind : int {
  ResultBack = 0,
  DeadlineExpiry = 1,
  TxDone = 2,
  NpuDone = 3,
  FrameArrival = 4,
};

struct SimEvent {
  Millis time;
  EventKind kind;
  std::size_t frame_pos;

  auto key() const { return std::tuple{time, static_cast<int>(kind), frame_pos}; }
};

struct FrameOutcome {
  int frame_index{0};
  std::optional<std::size_t> offload_resolution;
  Millis completion;
  bool deadline_met{true};
  // Server result replaced the local one.
  bool server_result_used{false};
  bool correct{false};
  double expected_contribution{0.0};

  friend bool operator==(const FrameOutcome&, const FrameOutcome&) = default;
};

struct SimReport {
  std::string policy;
  std::vector<FrameOutcome> frames;
  std::vector<Transmission> uplink;
  double empirical_accuracy{0.0};
  double expected_accuracy{0.0};
  double offload_fraction{0.0};
  std::size_t offloaded_count{0};
  std::int64_t bytes_transmitted{0};
  // Offloads whose result came back after arrival + deadline.
  std::size_t deadline_violations{0};
  Millis makespan;

  std::size_t frame_count() const { return frames.size(); }
  friend bool operator==(const SimReport&, const SimReport&) = default;
};

SimReport run(Policy& policy, const FrameTrace& trace, const AccuracyProfile& profile,
              const NetworkModel& network, const TimingConfig& timing,
              const SimParams& params = {});

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { Bandwidth, Fps, Latency };

SweepAxis parse_sweep_axis(std::string_view name);
std::string to_string(SweepAxis axis);

struct SweepRequest {
  SweepAxis axis{SweepAxis::Bandwidth};
  // Mbps, fps or milliseconds depending on the axis.
  std::vector<double> values;
  std::vector<PolicySpec> policies;
  NetworkModel network{};
  TimingConfig timing{};
  SimParams params{};
  // Parallel workers; rows come back in sweep order regardless.
  unsigned workers{1};
};

struct SweepRow {
  std::string policy;
  double value{0.0};
  SimReport report;
};

std::vector<SweepRow> sweep(const SweepRequest& request, const FrameTrace& trace,
                            const AccuracyProfile& profile);

// ---------------------------------------------------------------------------
// CSV output

enum class AccountingMode { Expected, Empirical };

AccountingMode parse_accounting_mode(std::string_view name);
std::string to_string(AccountingMode mode);

double headline_accuracy(const SimReport& report, AccountingMode mode);

// Columns: policy,axis,value,accuracy,expected_accuracy,empirical_accuracy,
// offload_fraction,offloaded,frames,bytes_transmitted,deadline_violations
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const SimReport& report, AccountingMode mode,
                      const std::string& axis = "", std::optional<double> value = std::nullopt);
// Columns: frame,decision,resolution,completion_s,deadline_met,server_result_used,correct,expected
void write_frame_csv(std::ostream& out, const SimReport& report, const FrameTrace& trace);

}  // namespace cbo

#endif  // CBO_SIMULATOR_HPP_

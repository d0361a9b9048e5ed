#ifndef CBO_POLICIES_HPP_
#define CBO_POLICIES_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbo/offload_timing.hpp"
#include "cbo/optimal.hpp"
#include "cbo/time.hpp"
#include "cbo/workload.hpp"

namespace cbo {

// ---------------------------------------------------------------------------
// CBO decision (online DP over locally processed frames)

struct BufferedFrame {
  int frame_index{0};
  Millis arrival;
  // Earliest uplink start (local result available).
  Millis ready;
  double confidence{0.0};
  std::vector<std::int64_t> size_bytes;
};

struct ParetoPair {
  Millis t;
  AccuracyUnits gain{0};
  // Index into the previous list, -1 for the seed pair.
  std::int32_t parent{-1};
  // Resolution of the extension that produced this pair, -1 for "not offloaded".
  std::int32_t resolution{-1};
};

struct PlannedOffload {
  // Position in the buffer passed to cbo_decide.
  std::size_t buffer_pos{0};
  int frame_index{0};
  std::size_t resolution{0};
};

// Which reading of the backtracking step defines the offload set.
enum class BacktrackMode {
  // The recovered DP path is the offload set, each frame at its own resolution.
  OffloadPath,
  // Every buffered frame with confidence <= theta goes at the single resolution r°.
  ThresholdResolution,
};

struct PolicyDecision {
  // 0 means offload nothing.
  double threshold{0.0};
  std::size_t resolution{0};
  AccuracyUnits improvement_units{0};
  // Sorted by arrival.
  std::vector<PlannedOffload> offloads;

  double improvement() const { return from_units(improvement_units); }
  bool offloads_anything() const { return !offloads.empty(); }
};

struct CboDebug {
  std::vector<std::vector<ParetoPair>> lists;
};

// Frames must be sorted by non-increasing confidence. `uplink_free` is when the
// uplink can take the first transmission (at least the current time).
PolicyDecision cbo_decide(std::span<const BufferedFrame> buffered, const AccuracyProfile& profile,
                          const LinkTiming& link, Millis uplink_free,
                          BacktrackMode mode = BacktrackMode::OffloadPath,
                          CboDebug* debug = nullptr);

// ---------------------------------------------------------------------------
// Policies as simulator-driven state machines

// View of the running simulation handed to policies.
class SimContext {
 public:
  virtual ~SimContext() = default;

  virtual Millis now() const = 0;
  virtual Millis uplink_free() const = 0;
  virtual const FrameTrace& trace() const = 0;
  virtual const AccuracyProfile& profile() const = 0;
  virtual const LinkTiming& link() const = 0;
  virtual Millis arrival(std::size_t pos) const = 0;
  // Arrival of the frame after `pos`, or nullopt for the last frame.
  virtual std::optional<Millis> next_arrival(std::size_t pos) const = 0;

  // Queue a frame on the FIFO uplink. The simulator does not second-guess
  // the policy: a result that comes back late counts as a deadline violation.
  virtual void offload(std::size_t pos, std::size_t resolution) = 0;
};

class Policy {
 public:
  enum class Trigger {
    // Decide as soon as the frame arrives (confidence not needed).
    OnArrival,
    // Decide once the local result and its confidence are available.
    OnLocalResult,
  };

  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual Trigger trigger() const { return Trigger::OnLocalResult; }

  virtual void on_frame(SimContext& ctx, std::size_t pos) = 0;
  virtual void on_uplink_idle(SimContext&) {}
  virtual void on_deadline(SimContext&, std::size_t) {}
};

// Largest resolution whose result comes back in time when sent now (or when
// the uplink frees up), with an optional cap on transmission end.
std::optional<std::size_t> largest_feasible_resolution(const SimContext& ctx, std::size_t pos,
                                                       std::optional<Millis> finish_by = std::nullopt);

class LocalPolicy final : public Policy {
 public:
  std::string name() const override { return "local"; }
  void on_frame(SimContext&, std::size_t) override {}
};

// Sends every frame at the largest resolution that clears the uplink before
// the next arrival; otherwise the smallest resolution that meets the
// deadline; otherwise keeps the local result.
class ServerPolicy final : public Policy {
 public:
  std::string name() const override { return "server"; }
  Trigger trigger() const override { return Trigger::OnArrival; }
  void on_frame(SimContext& ctx, std::size_t pos) override;
};

// Offloads iff score <= theta, at the largest deadline-feasible resolution.
class FixedThresholdPolicy final : public Policy {
 public:
  FixedThresholdPolicy(double theta, bool use_calibrated);

  std::string name() const override;
  void on_frame(SimContext& ctx, std::size_t pos) override;

 private:
  double theta_;
  bool use_calibrated_;
};

// Confidence-blind greedy stand-in for FastVA: offload whenever the uplink
// is idle and the deadline allows, at the largest feasible resolution.
class FastVaLikePolicy final : public Policy {
 public:
  std::string name() const override { return "fastva"; }
  Trigger trigger() const override { return Trigger::OnArrival; }
  void on_frame(SimContext& ctx, std::size_t pos) override;
};

// Online CBO. Keeps the locally processed frames that can still be offloaded,
// re-plans with cbo_decide whenever a local result lands or the uplink goes
// idle, and puts the earliest-arriving planned frame on the uplink.
class CboPolicy final : public Policy {
 public:
  explicit CboPolicy(bool use_calibrated = true, BacktrackMode mode = BacktrackMode::OffloadPath);

  std::string name() const override;
  void on_frame(SimContext& ctx, std::size_t pos) override;
  void on_uplink_idle(SimContext& ctx) override;
  void on_deadline(SimContext& ctx, std::size_t pos) override;

  std::size_t decisions_made() const { return decisions_made_; }
  const std::optional<PolicyDecision>& last_decision() const { return last_decision_; }

 private:
  void plan(SimContext& ctx);
  void evict_stale(const SimContext& ctx);

  bool use_calibrated_;
  BacktrackMode mode_;
  std::vector<std::size_t> buffer_;  // trace positions
  std::size_t decisions_made_{0};
  std::optional<PolicyDecision> last_decision_;
};

// Replays a precomputed schedule (e.g. from solve_optimal).
class ReplayPolicy final : public Policy {
 public:
  explicit ReplayPolicy(Schedule schedule);

  std::string name() const override { return "replay"; }
  void on_frame(SimContext& ctx, std::size_t pos) override;

 private:
  Schedule schedule_;
};

struct PolicySpec {
  std::string name;
  double theta{0.5};
};

// Known names: local, server, fastva, threshold (calibrated), threshold-raw,
// cbo, cbo-wo (uncalibrated), cbo-theta (threshold backtrack reading).
std::unique_ptr<Policy> make_policy(const PolicySpec& spec);
std::vector<std::string> policy_names();

}  // namespace cbo

#endif  // CBO_POLICIES_HPP_

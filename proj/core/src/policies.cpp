#include "cbo/policies.hpp"

#include <algorithm>

#include "cbo/config_file.hpp"
#include "cbo/error.hpp"

namespace cbo {

std::optional<std::size_t> largest_feasible_resolution(const SimContext& ctx, std::size_t pos,
                                                       std::optional<Millis> finish_by) {
  const auto& frame = ctx.trace().frames[pos];
  for (std::size_t r = frame.size_bytes.size(); r-- > 0;) {
    const auto w = offload_window(ctx.link(), ctx.uplink_free(), ctx.now(), ctx.arrival(pos),
                                  frame.size_bytes[r]);
    if (w && (!finish_by || w->tx_done <= *finish_by)) return r;
  }
  return std::nullopt;
}

void ServerPolicy::on_frame(SimContext& ctx, std::size_t pos) {
  auto r = largest_feasible_resolution(ctx, pos, ctx.next_arrival(pos));
  if (!r) {
    const auto& frame = ctx.trace().frames[pos];
    if (offload_window(ctx.link(), ctx.uplink_free(), ctx.now(), ctx.arrival(pos),
                       frame.size_bytes.front())) {
      r = 0;
    }
  }
  if (r) ctx.offload(pos, *r);
}

FixedThresholdPolicy::FixedThresholdPolicy(double theta, bool use_calibrated)
    : theta_(theta), use_calibrated_(use_calibrated) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("threshold must be in [0,1]");
}

std::string FixedThresholdPolicy::name() const {
  return std::string(use_calibrated_ ? "threshold" : "threshold-raw") + ":" + format_double(theta_);
}

void FixedThresholdPolicy::on_frame(SimContext& ctx, std::size_t pos) {
  const auto& frame = ctx.trace().frames[pos];
  const double score = use_calibrated_ ? frame.calibrated_confidence : frame.raw_confidence;
  if (score > theta_) return;
  if (const auto r = largest_feasible_resolution(ctx, pos)) ctx.offload(pos, *r);
}

void FastVaLikePolicy::on_frame(SimContext& ctx, std::size_t pos) {
  if (ctx.uplink_free() > ctx.now()) return;
  if (const auto r = largest_feasible_resolution(ctx, pos)) ctx.offload(pos, *r);
}

CboPolicy::CboPolicy(bool use_calibrated, BacktrackMode mode)
    : use_calibrated_(use_calibrated), mode_(mode) {}

std::string CboPolicy::name() const {
  if (mode_ == BacktrackMode::ThresholdResolution) return use_calibrated_ ? "cbo-theta" : "cbo-wo-theta";
  return use_calibrated_ ? "cbo" : "cbo-wo";
}

void CboPolicy::on_frame(SimContext& ctx, std::size_t pos) {
  buffer_.push_back(pos);
  plan(ctx);
}

void CboPolicy::on_uplink_idle(SimContext& ctx) { plan(ctx); }

void CboPolicy::on_deadline(SimContext&, std::size_t pos) { std::erase(buffer_, pos); }

void CboPolicy::evict_stale(const SimContext& ctx) {
  std::erase_if(buffer_, [&](std::size_t pos) {
    const auto& frame = ctx.trace().frames[pos];
    return !offload_window(ctx.link(), ctx.uplink_free(), ctx.now(), ctx.arrival(pos),
                           frame.size_bytes.front());
  });
}

void CboPolicy::plan(SimContext& ctx) {
  evict_stale(ctx);
  if (buffer_.empty()) return;

  const auto& trace = ctx.trace();
  auto score = [&](std::size_t pos) {
    const auto& f = trace.frames[pos];
    return use_calibrated_ ? f.calibrated_confidence : f.raw_confidence;
  };
  std::vector<std::size_t> order = buffer_;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return score(x) > score(y); });

  std::vector<BufferedFrame> frames;
  frames.reserve(order.size());
  for (auto pos : order) {
    BufferedFrame b;
    b.frame_index = trace.frames[pos].index;
    b.arrival = ctx.arrival(pos);
    b.ready = b.arrival + ctx.link().local_delay;
    b.confidence = score(pos);
    b.size_bytes = trace.frames[pos].size_bytes;
    frames.push_back(std::move(b));
  }

  const Millis start = std::max(ctx.now(), ctx.uplink_free());
  last_decision_ = cbo_decide(frames, ctx.profile(), ctx.link(), start, mode_);
  ++decisions_made_;

  if (ctx.uplink_free() > ctx.now()) return;  // re-planned when the uplink goes idle
  for (const auto& planned : last_decision_->offloads) {
    const auto pos = order[planned.buffer_pos];
    const auto& f = trace.frames[pos];
    if (!offload_window(ctx.link(), ctx.uplink_free(), ctx.now(), ctx.arrival(pos),
                        f.size_bytes[planned.resolution])) {
      continue;
    }
    ctx.offload(pos, planned.resolution);
    std::erase(buffer_, pos);
    break;
  }
}

ReplayPolicy::ReplayPolicy(Schedule schedule) : schedule_(std::move(schedule)) {}

void ReplayPolicy::on_frame(SimContext& ctx, std::size_t pos) {
  if (pos >= schedule_.decisions.size()) throw InvalidArgument("replay: schedule shorter than trace");
  const auto& d = schedule_.decisions[pos];
  if (d.frame_index != ctx.trace().frames[pos].index) {
    throw InvalidArgument("replay: schedule does not match trace");
  }
  if (d.offload_resolution) ctx.offload(pos, *d.offload_resolution);
}

std::vector<std::string> policy_names() {
  return {"local", "server", "fastva", "threshold", "threshold-raw", "cbo", "cbo-wo", "cbo-theta"};
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  const auto& n = spec.name;
  if (n == "local") return std::make_unique<LocalPolicy>();
  if (n == "server") return std::make_unique<ServerPolicy>();
  if (n == "fastva") return std::make_unique<FastVaLikePolicy>();
  if (n == "threshold") return std::make_unique<FixedThresholdPolicy>(spec.theta, true);
  if (n == "threshold-raw") return std::make_unique<FixedThresholdPolicy>(spec.theta, false);
  if (n == "cbo") return std::make_unique<CboPolicy>(true, BacktrackMode::OffloadPath);
  if (n == "cbo-wo") return std::make_unique<CboPolicy>(false, BacktrackMode::OffloadPath);
  if (n == "cbo-theta") return std::make_unique<CboPolicy>(true, BacktrackMode::ThresholdResolution);
  throw InvalidArgument("unknown policy '" + n + "'");
}

}  // namespace cbo

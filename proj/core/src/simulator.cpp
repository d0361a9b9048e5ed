#include "cbo/simulator.hpp"

#include <algorithm>
#include <queue>

#include "cbo/config_file.hpp"
#include "cbo/error.hpp"

namespace cbo {

namespace {

struct LaterEvent {
  bool operator()(const SimEvent& a, const SimEvent& b) const { return a.key() > b.key(); }
};

struct FrameState {
  std::optional<std::size_t> offload_resolution;
  std::optional<Millis> result_back;
  bool server_result_used{false};
};

class Engine final : public SimContext {
 public:
  Engine(Policy& policy, const FrameTrace& trace, const AccuracyProfile& profile, LinkTiming link)
      : policy_(policy), trace_(trace), profile_(profile), link_(link), states_(trace.size()) {
    arrivals_.reserve(trace.size());
    for (const auto& f : trace.frames) arrivals_.push_back(to_millis(f.arrival_s));
  }

  Millis now() const override { return now_; }
  Millis uplink_free() const override { return uplink_free_; }
  const FrameTrace& trace() const override { return trace_; }
  const AccuracyProfile& profile() const override { return profile_; }
  const LinkTiming& link() const override { return link_; }
  Millis arrival(std::size_t pos) const override { return arrivals_.at(pos); }
  std::optional<Millis> next_arrival(std::size_t pos) const override {
    if (pos + 1 >= arrivals_.size()) return std::nullopt;
    return arrivals_[pos + 1];
  }

  void offload(std::size_t pos, std::size_t resolution) override {
    auto& state = states_.at(pos);
    if (state.offload_resolution) throw InvalidArgument("frame offloaded twice");
    if (now_ < arrivals_[pos]) throw InvalidArgument("frame offloaded before it arrived");
    const auto& frame = trace_.frames[pos];
    if (resolution >= frame.size_bytes.size()) throw InvalidArgument("unknown resolution position");

    state.offload_resolution = resolution;
    ++offloaded_;
    const auto tx = link_.transmit_time(frame.size_bytes[resolution]);
    if (!tx) {
      ++violations_;  // dead link: the result never comes back
      return;
    }
    const Millis start = std::max(now_, uplink_free_);
    const Millis done = start + *tx;
    uplink_free_ = done;
    bytes_ += frame.size_bytes[resolution];
    uplink_.push_back(Transmission{frame.index, start, done});
    push({done, EventKind::TxDone, pos});
    push({done + link_.round_trip_overhead(), EventKind::ResultBack, pos});
  }

  SimReport run() {
    for (std::size_t pos = 0; pos < trace_.size(); ++pos) {
      push({arrivals_[pos], EventKind::FrameArrival, pos});
    }
    while (!events_.empty()) {
      const SimEvent ev = events_.top();
      events_.pop();
      now_ = ev.time;
      makespan_ = std::max(makespan_, ev.time);
      dispatch(ev);
    }
    return report();
  }

 private:
  void push(SimEvent ev) { events_.push(ev); }

  void dispatch(const SimEvent& ev) {
    const std::size_t pos = ev.frame_pos;
    switch (ev.kind) {
      case EventKind::FrameArrival:
        push({arrivals_[pos] + link_.local_delay, EventKind::NpuDone, pos});
        push({arrivals_[pos] + link_.deadline, EventKind::DeadlineExpiry, pos});
        if (policy_.trigger() == Policy::Trigger::OnArrival) policy_.on_frame(*this, pos);
        break;
      case EventKind::NpuDone:
        if (policy_.trigger() == Policy::Trigger::OnLocalResult) policy_.on_frame(*this, pos);
        break;
      case EventKind::TxDone:
        if (uplink_free_ <= now_) policy_.on_uplink_idle(*this);
        break;
      case EventKind::ResultBack: {
        auto& state = states_[pos];
        state.result_back = now_;
        if (now_ <= arrivals_[pos] + link_.deadline) {
          state.server_result_used = true;
        } else {
          ++violations_;
        }
        break;
      }
      case EventKind::DeadlineExpiry:
        policy_.on_deadline(*this, pos);
        break;
    }
  }

  SimReport report() const {
    SimReport r;
    r.policy = policy_.name();
    r.frames.reserve(trace_.size());
    double correct = 0.0;
    double expected = 0.0;
    for (std::size_t pos = 0; pos < trace_.size(); ++pos) {
      const auto& f = trace_.frames[pos];
      const auto& s = states_[pos];
      FrameOutcome o;
      o.frame_index = f.index;
      o.offload_resolution = s.offload_resolution;
      o.server_result_used = s.server_result_used;
      if (s.server_result_used) {
        o.completion = *s.result_back;
        o.correct = f.server_correct[*s.offload_resolution];
        o.expected_contribution = profile_.server_accuracy[*s.offload_resolution];
      } else {
        o.completion = arrivals_[pos] + link_.local_delay;
        o.correct = f.local_correct;
        o.expected_contribution = npu_accuracy(profile_, f.calibrated_confidence);
      }
      o.deadline_met = o.completion <= arrivals_[pos] + link_.deadline;
      correct += o.correct ? 1.0 : 0.0;
      expected += o.expected_contribution;
      r.frames.push_back(o);
    }
    const auto n = static_cast<double>(trace_.size());
    if (!trace_.empty()) {
      r.empirical_accuracy = correct / n;
      r.expected_accuracy = expected / n;
      r.offload_fraction = static_cast<double>(offloaded_) / n;
    }
    r.offloaded_count = offloaded_;
    r.bytes_transmitted = bytes_;
    r.deadline_violations = violations_;
    r.uplink = uplink_;
    r.makespan = makespan_;
    return r;
  }

  Policy& policy_;
  const FrameTrace& trace_;
  const AccuracyProfile& profile_;
  LinkTiming link_;
  std::vector<Millis> arrivals_;
  std::vector<FrameState> states_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, LaterEvent> events_;
  Millis now_{};
  Millis uplink_free_{-kNoTime.count};
  Millis makespan_{};
  std::size_t offloaded_{0};
  std::size_t violations_{0};
  std::int64_t bytes_{0};
  std::vector<Transmission> uplink_;
};

}  // namespace

SimReport run(Policy& policy, const FrameTrace& trace, const AccuracyProfile& profile,
              const NetworkModel& network, const TimingConfig& timing, const SimParams& params) {
  trace.validate();
  profile.validate();
  if (trace.resolutions != profile.resolutions) {
    throw InvalidArgument("trace and profile resolutions differ");
  }
  if (!(params.npu_time_s >= 0) || !(params.calib_time_s >= 0)) {
    throw InvalidArgument("local processing times must be >= 0");
  }
  if (!(params.local_delay_s() < timing.frame_interval_s())) {
    throw InvalidArgument("local processing time must be shorter than the frame interval");
  }
  Engine engine(policy, trace, profile, LinkTiming::from(network, timing, params.local_delay_s()));
  return engine.run();
}

AccountingMode parse_accounting_mode(std::string_view name) {
  if (name == "expected") return AccountingMode::Expected;
  if (name == "empirical") return AccountingMode::Empirical;
  throw InvalidArgument("unknown accounting mode '" + std::string(name) + "'");
}

std::string to_string(AccountingMode mode) {
  return mode == AccountingMode::Expected ? "expected" : "empirical";
}

double headline_accuracy(const SimReport& report, AccountingMode mode) {
  return mode == AccountingMode::Expected ? report.expected_accuracy : report.empirical_accuracy;
}

void write_report_header(std::ostream& out) {
  out << "policy,axis,value,accuracy,expected_accuracy,empirical_accuracy,offload_fraction,"
         "offloaded,frames,bytes_transmitted,deadline_violations\n";
}

void write_report_row(std::ostream& out, const SimReport& report, AccountingMode mode,
                      const std::string& axis, std::optional<double> value) {
  out << report.policy << ',' << axis << ',' << (value ? format_double(*value) : std::string()) << ','
      << format_double(headline_accuracy(report, mode)) << ','
      << format_double(report.expected_accuracy) << ',' << format_double(report.empirical_accuracy)
      << ',' << format_double(report.offload_fraction) << ',' << report.offloaded_count << ','
      << report.frame_count() << ',' << report.bytes_transmitted << ','
      << report.deadline_violations << '\n';
}

void write_frame_csv(std::ostream& out, const SimReport& report, const FrameTrace& trace) {
  out << "frame,decision,resolution,completion_s,deadline_met,server_result_used,correct,expected\n";
  for (const auto& o : report.frames) {
    out << o.frame_index << ',' << (o.offload_resolution ? "offload" : "local") << ','
        << (o.offload_resolution ? trace.resolutions.at(*o.offload_resolution).id() : std::string())
        << ',' << format_double(to_seconds(o.completion)) << ',' << (o.deadline_met ? 1 : 0) << ','
        << (o.server_result_used ? 1 : 0) << ',' << (o.correct ? 1 : 0) << ','
        << format_double(o.expected_contribution) << '\n';
  }
}

}  // namespace cbo

#include <algorithm>
#include <thread>

#include "cbo/error.hpp"
#include "cbo/simulator.hpp"

namespace cbo {

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "bandwidth") return SweepAxis::Bandwidth;
  if (name == "fps") return SweepAxis::Fps;
  if (name == "latency") return SweepAxis::Latency;
  throw InvalidArgument("invalid sweep axis '" + std::string(name) + "' (bandwidth|fps|latency)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Bandwidth:
      return "bandwidth";
    case SweepAxis::Fps:
      return "fps";
    case SweepAxis::Latency:
      return "latency";
  }
  return "?";
}

std::vector<SweepRow> sweep(const SweepRequest& request, const FrameTrace& trace,
                            const AccuracyProfile& profile) {
  if (request.policies.empty()) throw InvalidArgument("sweep: no policies given");
  // Fail on unknown names before spawning anything.
  for (const auto& p : request.policies) make_policy(p);

  const std::size_t per_value = request.policies.size();
  std::vector<SweepRow> rows(request.values.size() * per_value);

  auto run_one = [&](std::size_t task) {
    const double value = request.values[task / per_value];
    const auto& spec = request.policies[task % per_value];
    NetworkModel network = request.network;
    TimingConfig timing = request.timing;
    const FrameTrace* input = &trace;
    FrameTrace local_trace;
    switch (request.axis) {
      case SweepAxis::Bandwidth:
        network.bandwidth_bps = value * 1e6;
        break;
      case SweepAxis::Latency:
        network.latency_s = value / 1e3;
        break;
      case SweepAxis::Fps:
        timing = TimingConfig(value, timing.deadline_s(), timing.frame_count());
        local_trace = retimed(trace, value);
        input = &local_trace;
        break;
    }
    auto policy = make_policy(spec);
    rows[task] = SweepRow{policy->name(), value,
                          run(*policy, *input, profile, network, timing, request.params)};
  };

  const unsigned workers = std::max(1u, request.workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < rows.size(); ++t) run_one(t);
    return rows;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < rows.size(); t += workers) run_one(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace cbo

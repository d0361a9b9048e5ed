#include <algorithm>
#include <cmath>
#include <random>

#include "cbo/error.hpp"
#include "cbo/workload.hpp"

namespace cbo {

namespace {

double sample_beta(std::mt19937_64& rng, double alpha, double beta) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

FrameTrace generate_trace(const TraceSpec& spec) {
  if (spec.frame_count < 1) throw InvalidArgument("generate_trace: frame_count must be >= 1");
  if (spec.profile.resolutions.empty()) {
    throw InvalidArgument("generate_trace: empty resolution list");
  }
  spec.profile.validate();
  if (!(spec.frame_rate_fps > 0)) throw InvalidArgument("generate_trace: frame rate must be positive");
  if (!(spec.confidence.alpha > 0) || !(spec.confidence.beta > 0)) {
    throw InvalidArgument("generate_trace: Beta parameters must be positive");
  }
  if (!(spec.sizes.bytes_per_pixel > 0) || !(spec.sizes.log_sigma >= 0)) {
    throw InvalidArgument("generate_trace: invalid size model");
  }
  const auto& mis = spec.miscalibration;
  if (!(mis.weight >= 0 && mis.weight <= 1) || !(mis.exponent > 0)) {
    throw InvalidArgument("generate_trace: miscalibration weight must be in [0,1], exponent > 0");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> compressibility(0.0, spec.sizes.log_sigma);

  const auto& profile = spec.profile;
  const std::size_t m = profile.resolutions.size();
  const double gamma = 1.0 / spec.frame_rate_fps;

  FrameTrace trace;
  trace.resolutions = profile.resolutions;
  trace.frames.reserve(static_cast<std::size_t>(spec.frame_count));

  for (int i = 1; i <= spec.frame_count; ++i) {
    Frame f;
    f.index = i;
    f.arrival_s = i * gamma;

    const double p = sample_beta(rng, spec.confidence.alpha, spec.confidence.beta);
    f.calibrated_confidence = p;
    if (mis.is_identity()) {
      f.raw_confidence = p;
    } else {
      const double noise = unit(rng);
      f.raw_confidence =
          std::clamp((1.0 - mis.weight) * std::pow(p, mis.exponent) + mis.weight * noise, 0.0, 1.0);
    }

    const double factor = compressibility(rng);
    f.size_bytes.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      const auto bytes = static_cast<std::int64_t>(std::llround(
          spec.sizes.bytes_per_pixel * static_cast<double>(profile.resolutions[r].pixels()) * factor));
      const std::int64_t floor = r == 0 ? 1 : f.size_bytes[r - 1] + 1;
      f.size_bytes[r] = std::max(bytes, floor);
    }

    f.local_correct = unit(rng) < npu_accuracy(profile, p);
    // One uniform for all resolutions keeps server correctness monotone in
    // resolution while each marginal matches the profile.
    const double u = unit(rng);
    f.server_correct.resize(m);
    for (std::size_t r = 0; r < m; ++r) f.server_correct[r] = u < profile.server_accuracy[r];

    trace.frames.push_back(std::move(f));
  }
  return trace;
}

}  // namespace cbo

#include "fixtures.hpp"

#include <algorithm>

namespace cbo::fixture {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

AccuracyProfile random_profile(Rng& rng, std::size_t m) {
  AccuracyProfile p;
  for (std::size_t r = 0; r < m; ++r) {
    const int side = 32 * static_cast<int>(r + 1);
    p.resolutions.push_back(Resolution{side, side});
    p.server_accuracy.push_back(uniform(rng, 0.2, 0.99));
  }
  std::sort(p.server_accuracy.begin(), p.server_accuracy.end());
  for (auto& a : p.npu_accuracy_bins) a = uniform(rng, 0.0, 0.9);
  return p;
}

FrameTrace random_trace(Rng& rng, const AccuracyProfile& profile, int n, int gamma_ms) {
  FrameTrace t;
  t.resolutions = profile.resolutions;
  const std::size_t m = profile.resolutions.size();
  for (int i = 1; i <= n; ++i) {
    Frame f;
    f.index = i;
    f.arrival_s = i * gamma_ms / 1000.0;
    f.calibrated_confidence = uniform(rng, 0.0, 1.0);
    f.raw_confidence = f.calibrated_confidence;
    std::int64_t size = 0;
    for (std::size_t r = 0; r < m; ++r) {
      size += uniform_int(rng, 500, 20000);
      f.size_bytes.push_back(size);
      f.server_correct.push_back(uniform(rng, 0, 1) < profile.server_accuracy[r]);
    }
    f.local_correct = uniform(rng, 0, 1) < 0.5;
    t.frames.push_back(std::move(f));
  }
  return t;
}

LinkTiming random_link(Rng& rng, int gamma_ms) {
  LinkTiming link;
  link.bandwidth_bps = uniform(rng, 0.5e6, 8e6);
  link.server = Millis{uniform_int(rng, 0, 40)};
  link.latency = Millis{uniform_int(rng, 0, 80)};
  link.deadline = Millis{uniform_int(rng, 60, 300)};
  link.local_delay = Millis{uniform_int(rng, 0, gamma_ms - 1)};
  return link;
}

BufferCase random_buffer(Rng& rng, std::size_t k, std::size_t m) {
  BufferCase c;
  c.profile = random_profile(rng, m);
  c.link = random_link(rng, 33);
  const std::int64_t now = 1000;
  std::vector<double> conf;
  for (std::size_t j = 0; j < k; ++j) conf.push_back(uniform(rng, 0.0, 1.0));
  std::sort(conf.rbegin(), conf.rend());
  for (std::size_t j = 0; j < k; ++j) {
    BufferedFrame b;
    b.frame_index = static_cast<int>(j + 1);
    b.arrival = Millis{now - uniform_int(rng, 0, 150)};
    b.ready = b.arrival + c.link.local_delay;
    b.confidence = conf[j];
    std::int64_t size = 0;
    for (std::size_t r = 0; r < m; ++r) {
      size += uniform_int(rng, 500, 20000);
      b.size_bytes.push_back(size);
    }
    c.buffered.push_back(std::move(b));
  }
  c.uplink_free = Millis{now + uniform_int(rng, 0, 40)};
  return c;
}

AccuracyProfile flat_profile(double local, double server_max) {
  AccuracyProfile p = default_profile();
  p.npu_accuracy_bins.fill(local);
  const double top = p.server_accuracy.back();
  for (auto& a : p.server_accuracy) a *= server_max / top;
  p.server_accuracy.back() = server_max;
  return p;
}

FrameTrace synthetic_trace(std::uint64_t seed, int frames, double fps, const AccuracyProfile& profile,
                           Miscalibration miscal) {
  TraceSpec spec;
  spec.frame_count = frames;
  spec.frame_rate_fps = fps;
  spec.profile = profile;
  spec.miscalibration = miscal;
  spec.seed = seed;
  return generate_trace(spec);
}

}  // namespace cbo::fixture

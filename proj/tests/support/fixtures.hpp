#ifndef CBO_TESTS_FIXTURES_HPP_
#define CBO_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "cbo/offload_timing.hpp"
#include "cbo/policies.hpp"
#include "cbo/workload.hpp"

namespace cbo::fixture {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

// m square resolutions, sorted server accuracies, arbitrary NPU bins.
AccuracyProfile random_profile(Rng& rng, std::size_t m);

// n frames gamma_ms apart with random confidences, sizes and labels.
FrameTrace random_trace(Rng& rng, const AccuracyProfile& profile, int n, int gamma_ms);

// Link where some but not all offloads fit.
LinkTiming random_link(Rng& rng, int gamma_ms);

struct BufferCase {
  AccuracyProfile profile;
  LinkTiming link;
  std::vector<BufferedFrame> buffered;
  Millis uplink_free;
};

// k locally processed frames sorted by non-increasing confidence.
BufferCase random_buffer(Rng& rng, std::size_t k, std::size_t m);

// Every NPU bin at `local`, server accuracies rising to `server_max`.
AccuracyProfile flat_profile(double local, double server_max);

FrameTrace synthetic_trace(std::uint64_t seed, int frames, double fps = 30.0,
                           const AccuracyProfile& profile = default_profile(),
                           Miscalibration miscal = {});

}  // namespace cbo::fixture

#endif  // CBO_TESTS_FIXTURES_HPP_

#ifndef CBO_WORKLOAD_HPP_
#define CBO_WORKLOAD_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cbo {

class KeyValueFile;

struct Resolution {
  int width{0};
  int height{0};

  std::int64_t pixels() const { return std::int64_t{width} * height; }
  std::string id() const;  // "224x224"
  static Resolution parse(std::string_view id);

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// One video frame of a trace. Per-resolution vectors are indexed by position
// in the owning trace's resolution list.
struct Frame {
  int index{0};
  double arrival_s{0.0};
  double raw_confidence{0.0};
  double calibrated_confidence{0.0};
  std::vector<std::int64_t> size_bytes;
  bool local_correct{false};
  std::vector<bool> server_correct;
  // Raw classifier output; optional.
  std::vector<double> raw_scores;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameTrace {
  std::vector<Resolution> resolutions;
  std::vector<Frame> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }

  // Throws InvalidArgument on the first violated invariant.
  void validate() const;

  friend bool operator==(const FrameTrace&, const FrameTrace&) = default;
};

inline constexpr std::size_t kConfidenceBins = 10;

// Bin of a confidence in [0,1]: [b/10,(b+1)/10), with 1.0 in the top bin.
std::size_t confidence_bin(double confidence);

struct AccuracyProfile {
  std::array<double, kConfidenceBins> npu_accuracy_bins{};
  std::vector<Resolution> resolutions;
  std::vector<double> server_accuracy;

  std::size_t resolution_count() const { return resolutions.size(); }
  std::size_t resolution_index(std::string_view id) const;

  void validate() const;

  static AccuracyProfile from_config(const KeyValueFile& file);
  KeyValueFile to_config() const;
  static AccuracyProfile load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const AccuracyProfile&, const AccuracyProfile&) = default;
};

double npu_accuracy(const AccuracyProfile& profile, double calibrated_confidence);
double offload_accuracy(const AccuracyProfile& profile, std::size_t resolution);
double offload_accuracy(const AccuracyProfile& profile, std::string_view resolution_id);

// Synthetic default: five resolutions 45..224 px, NPU bin accuracies rising
// linearly from 0.11 to 1.0, server accuracy topping out at 0.81.
AccuracyProfile default_profile();

struct NetworkModel {
  double bandwidth_bps{5e6};
  double latency_s{0.100};
  double server_time_s{0.037};

  void validate() const;

  static NetworkModel from_config(const KeyValueFile& file);
  KeyValueFile to_config() const;
  static NetworkModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

class TimingConfig {
 public:
  TimingConfig() = default;
  TimingConfig(double frame_rate_fps, double deadline_s, int frame_count);

  double frame_rate_fps() const { return frame_rate_fps_; }
  double frame_interval_s() const { return frame_interval_s_; }
  double deadline_s() const { return deadline_s_; }
  int frame_count() const { return frame_count_; }

 private:
  double frame_rate_fps_{30.0};
  double frame_interval_s_{1.0 / 30.0};
  double deadline_s_{0.200};
  int frame_count_{0};
};

// Trace with arrival times reset to index * (1 / fps).
FrameTrace retimed(const FrameTrace& trace, double frame_rate_fps);

// Text format, one frame per line; see docs in README.
void save_trace(const FrameTrace& trace, const std::filesystem::path& path);
FrameTrace load_trace(const std::filesystem::path& path);
std::string write_trace(const FrameTrace& trace);
FrameTrace parse_trace(std::string_view text, const std::string& source = "<memory>");

struct SizeModel {
  double bytes_per_pixel{2.0};
  // Sigma of the per-frame lognormal compressibility factor.
  double log_sigma{0.25};
};

// Calibrated confidence ~ Beta(alpha, beta).
struct ConfidenceModel {
  double alpha{2.0};
  double beta{3.5};
};

// raw = (1 - weight) * p^exponent + weight * U(0,1).
// weight 0 and exponent 1 is the identity.
struct Miscalibration {
  double weight{0.5};
  double exponent{0.5};

  bool is_identity() const { return weight == 0.0 && exponent == 1.0; }
  static Miscalibration identity() { return {0.0, 1.0}; }
};

struct TraceSpec {
  int frame_count{1000};
  double frame_rate_fps{30.0};
  AccuracyProfile profile{default_profile()};
  SizeModel sizes{};
  ConfidenceModel confidence{};
  Miscalibration miscalibration{};
  std::uint64_t seed{1};
};

FrameTrace generate_trace(const TraceSpec& spec);

}  // namespace cbo

#endif  // CBO_WORKLOAD_HPP_

#include "cbo/workload.hpp"

#include <algorithm>
#include <cmath>

#include "cbo/calibration.hpp"
#include "cbo/config_file.hpp"
#include "cbo/error.hpp"

namespace cbo {

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void validate_resolutions(const std::vector<Resolution>& resolutions, const char* owner) {
  if (resolutions.empty()) {
    throw InvalidArgument(std::string(owner) + ": resolution list is empty");
  }
  for (std::size_t r = 0; r < resolutions.size(); ++r) {
    if (resolutions[r].width <= 0 || resolutions[r].height <= 0) {
      throw InvalidArgument(std::string(owner) + ": non-positive resolution " + resolutions[r].id());
    }
    if (r > 0 && resolutions[r].pixels() <= resolutions[r - 1].pixels()) {
      throw InvalidArgument(std::string(owner) + ": resolutions must be sorted ascending");
    }
  }
}

std::string frame_label(const Frame& f) { return "frame " + std::to_string(f.index); }

}  // namespace

std::string Resolution::id() const { return std::to_string(width) + "x" + std::to_string(height); }

Resolution Resolution::parse(std::string_view id) {
  id = trim(id);
  const auto x = id.find('x');
  if (x == std::string_view::npos) {
    throw InvalidArgument("resolution '" + std::string(id) + "' is not WxH");
  }
  const double w = parse_double(id.substr(0, x));
  const double h = parse_double(id.substr(x + 1));
  if (w != std::floor(w) || h != std::floor(h) || w <= 0 || h <= 0) {
    throw InvalidArgument("resolution '" + std::string(id) + "' is not WxH");
  }
  return Resolution{static_cast<int>(w), static_cast<int>(h)};
}

std::size_t confidence_bin(double confidence) {
  if (!in_unit_interval(confidence)) {
    throw InvalidArgument("confidence " + format_double(confidence) + " outside [0,1]");
  }
  const auto bin = static_cast<std::size_t>(std::floor(confidence * kConfidenceBins));
  return std::min(bin, kConfidenceBins - 1);
}

void FrameTrace::validate() const {
  validate_resolutions(resolutions, "trace");
  const std::size_t m = resolutions.size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (f.index < 1) throw InvalidArgument(frame_label(f) + ": index must be >= 1");
    if (!std::isfinite(f.arrival_s)) throw InvalidArgument(frame_label(f) + ": arrival not finite");
    if (i > 0) {
      if (f.index <= frames[i - 1].index) {
        throw InvalidArgument(frame_label(f) + ": indices must increase");
      }
      if (f.arrival_s <= frames[i - 1].arrival_s) {
        throw InvalidArgument(frame_label(f) + ": arrival_time out of order");
      }
    }
    if (!in_unit_interval(f.raw_confidence)) {
      throw InvalidArgument(frame_label(f) + ": raw_confidence outside [0,1]");
    }
    if (!in_unit_interval(f.calibrated_confidence)) {
      throw InvalidArgument(frame_label(f) + ": calibrated_confidence outside [0,1]");
    }
    if (f.size_bytes.size() != m || f.server_correct.size() != m) {
      throw InvalidArgument(frame_label(f) + ": expected one size and one server flag per resolution");
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (f.size_bytes[r] <= 0) throw InvalidArgument(frame_label(f) + ": size must be positive");
      if (r > 0 && f.size_bytes[r] <= f.size_bytes[r - 1]) {
        throw InvalidArgument(frame_label(f) + ": size_bytes must increase with resolution");
      }
    }
    if (!f.raw_scores.empty()) {
      const double c = softmax_confidence(f.raw_scores);
      if (std::abs(c - f.raw_confidence) > 1e-9) {
        throw InvalidArgument(frame_label(f) + ": raw_confidence differs from softmax of raw scores");
      }
    }
  }
}

std::size_t AccuracyProfile::resolution_index(std::string_view id) const {
  for (std::size_t r = 0; r < resolutions.size(); ++r) {
    if (resolutions[r].id() == id) return r;
  }
  throw InvalidArgument("unknown resolution '" + std::string(id) + "'");
}

void AccuracyProfile::validate() const {
  validate_resolutions(resolutions, "profile");
  if (server_accuracy.size() != resolutions.size()) {
    throw InvalidArgument("profile: need one server accuracy per resolution");
  }
  for (std::size_t r = 0; r < server_accuracy.size(); ++r) {
    if (!in_unit_interval(server_accuracy[r])) {
      throw InvalidArgument("profile: server accuracy outside [0,1]");
    }
    if (r > 0 && server_accuracy[r] < server_accuracy[r - 1]) {
      throw InvalidArgument("profile: server accuracy must be non-decreasing in resolution");
    }
  }
  for (double a : npu_accuracy_bins) {
    if (!in_unit_interval(a)) throw InvalidArgument("profile: NPU bin accuracy outside [0,1]");
  }
}

AccuracyProfile AccuracyProfile::from_config(const KeyValueFile& file) {
  AccuracyProfile p;
  for (const auto& id : file.get_list("resolutions")) p.resolutions.push_back(Resolution::parse(id));
  p.server_accuracy = file.get_doubles("server_accuracy");
  const auto bins = file.get_doubles("npu_accuracy_bins");
  if (bins.size() != kConfidenceBins) {
    throw ParseError(file.source(), 0, "npu_accuracy_bins", "expected 10 values");
  }
  std::copy(bins.begin(), bins.end(), p.npu_accuracy_bins.begin());
  p.validate();
  return p;
}

KeyValueFile AccuracyProfile::to_config() const {
  KeyValueFile file;
  std::string ids;
  for (std::size_t r = 0; r < resolutions.size(); ++r) {
    if (r) ids += ",";
    ids += resolutions[r].id();
  }
  file.set("resolutions", ids);
  file.set("server_accuracy", server_accuracy);
  file.set("npu_accuracy_bins",
           std::vector<double>(npu_accuracy_bins.begin(), npu_accuracy_bins.end()));
  return file;
}

AccuracyProfile AccuracyProfile::load(const std::filesystem::path& path) {
  return from_config(KeyValueFile::load(path));
}

void AccuracyProfile::save(const std::filesystem::path& path) const { to_config().save(path); }

double npu_accuracy(const AccuracyProfile& profile, double calibrated_confidence) {
  return profile.npu_accuracy_bins[confidence_bin(calibrated_confidence)];
}

double offload_accuracy(const AccuracyProfile& profile, std::size_t resolution) {
  if (resolution >= profile.server_accuracy.size()) {
    throw InvalidArgument("unknown resolution position " + std::to_string(resolution));
  }
  return profile.server_accuracy[resolution];
}

double offload_accuracy(const AccuracyProfile& profile, std::string_view resolution_id) {
  return profile.server_accuracy[profile.resolution_index(resolution_id)];
}

AccuracyProfile default_profile() {
  AccuracyProfile p;
  p.resolutions = {{45, 45}, {90, 90}, {134, 134}, {179, 179}, {224, 224}};
  p.server_accuracy = {0.30, 0.58, 0.70, 0.77, 0.81};
  p.npu_accuracy_bins = {0.110, 0.209, 0.308, 0.407, 0.506, 0.604, 0.703, 0.802, 0.901, 1.000};
  return p;
}

void NetworkModel::validate() const {
  if (!std::isfinite(bandwidth_bps) || bandwidth_bps < 0) {
    throw InvalidArgument("network: bandwidth must be >= 0");
  }
  if (!std::isfinite(latency_s) || latency_s < 0) throw InvalidArgument("network: latency must be >= 0");
  if (!std::isfinite(server_time_s) || server_time_s < 0) {
    throw InvalidArgument("network: server time must be >= 0");
  }
}

NetworkModel NetworkModel::from_config(const KeyValueFile& file) {
  NetworkModel n;
  n.bandwidth_bps = file.get_double_or("bandwidth_mbps", n.bandwidth_bps / 1e6) * 1e6;
  n.latency_s = file.get_double_or("latency_ms", n.latency_s * 1e3) / 1e3;
  n.server_time_s = file.get_double_or("server_time_ms", n.server_time_s * 1e3) / 1e3;
  n.validate();
  return n;
}

KeyValueFile NetworkModel::to_config() const {
  KeyValueFile file;
  file.set("bandwidth_mbps", bandwidth_bps / 1e6);
  file.set("latency_ms", latency_s * 1e3);
  file.set("server_time_ms", server_time_s * 1e3);
  return file;
}

NetworkModel NetworkModel::load(const std::filesystem::path& path) {
  return from_config(KeyValueFile::load(path));
}

void NetworkModel::save(const std::filesystem::path& path) const { to_config().save(path); }

TimingConfig::TimingConfig(double frame_rate_fps, double deadline_s, int frame_count)
    : frame_rate_fps_(frame_rate_fps),
      frame_interval_s_(1.0 / frame_rate_fps),
      deadline_s_(deadline_s),
      frame_count_(frame_count) {
  if (!std::isfinite(frame_rate_fps) || frame_rate_fps <= 0) {
    throw InvalidArgument("timing: frame rate must be positive");
  }
  if (!std::isfinite(deadline_s) || deadline_s <= 0) {
    throw InvalidArgument("timing: deadline must be positive");
  }
  if (frame_count < 0) throw InvalidArgument("timing: negative frame count");
}

FrameTrace retimed(const FrameTrace& trace, double frame_rate_fps) {
  if (!std::isfinite(frame_rate_fps) || frame_rate_fps <= 0) {
    throw InvalidArgument("frame rate must be positive");
  }
  FrameTrace out = trace;
  const double gamma = 1.0 / frame_rate_fps;
  for (auto& f : out.frames) f.arrival_s = f.index * gamma;
  return out;
}

}  // namespace cbo

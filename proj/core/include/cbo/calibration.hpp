#ifndef CBO_CALIBRATION_HPP_
#define CBO_CALIBRATION_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "cbo/workload.hpp"

namespace cbo {

class KeyValueFile;

// max_i softmax(scores)_i, computed with max subtraction.
double softmax_confidence(std::span<const double> scores);
std::size_t argmax(std::span<const double> scores);

// ---------------------------------------------------------------------------
// Platt scaling
//
// One logistic model per class: P(y = 1 | x) = 1 / (1 + exp(a * f(x) + b))
// where f(x) is the class's raw score. Training follows the one-vs-rest
// procedure: the label of a sample for class i is 1 iff object i is present.

struct PlattParams {
  double a{0.0};
  double b{0.0};
  // Only one label value was seen; a is fixed at 0 and b at the cap.
  bool degenerate{false};
  // Optimizer hit the magnitude cap (separable data).
  bool capped{false};
  int iterations{0};

  double apply(double score) const;
};

struct PlattSample {
  std::vector<double> scores;
  std::size_t class_id{0};
  bool label{false};
};

struct PlattFitOptions {
  double gradient_tolerance{1e-8};
  int max_iterations{100000};
  double parameter_cap{50.0};
};

class PlattModel {
 public:
  PlattModel() = default;
  explicit PlattModel(std::vector<PlattParams> classes) : classes_(std::move(classes)) {}

  std::size_t class_count() const { return classes_.size(); }
  const PlattParams& params(std::size_t class_id) const;
  const std::vector<PlattParams>& classes() const { return classes_; }

  double apply(std::span<const double> scores, std::size_t class_id) const;
  // Calibrated score of the argmax class.
  double frame_confidence(std::span<const double> scores) const;

 private:
  std::vector<PlattParams> classes_;
};

PlattModel fit_platt(std::span<const PlattSample> samples, std::size_t class_count,
                     const PlattFitOptions& options = {});
double apply_platt(const PlattModel& model, std::span<const double> scores, std::size_t class_id);

// Fit a single (a, b) on scalar scores.
PlattParams fit_platt_scalar(std::span<const double> scores, const std::vector<bool>& labels,
                             const PlattFitOptions& options = {});
// Mean negative log-likelihood of (a, b) on scalar scores.
double platt_nll(double a, double b, std::span<const double> scores, const std::vector<bool>& labels);

// ---------------------------------------------------------------------------
// Isotonic regression (pool adjacent violators)

struct IsotonicSample {
  double score{0.0};
  bool label{false};
};

// Right-continuous non-decreasing step function: value[k] holds on
// [breakpoint[k], breakpoint[k+1]); inputs below the first breakpoint take
// value[0].
class IsotonicModel {
 public:
  IsotonicModel() = default;
  IsotonicModel(std::vector<double> breakpoints, std::vector<double> values);

  double apply(double score) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

IsotonicModel fit_isotonic(std::span<const IsotonicSample> samples);

// ---------------------------------------------------------------------------
// Reliability bins, ECE, MCE

struct ConfidenceSample {
  double confidence{0.0};
  bool correct{false};
};

struct ReliabilityBin {
  std::size_t count{0};
  double accuracy{0.0};
  double mean_confidence{0.0};

  bool empty() const { return count == 0; }
};

struct ReliabilityBins {
  std::array<ReliabilityBin, kConfidenceBins> bins{};
  std::size_t sample_count{0};
};

ReliabilityBins reliability_bins(std::span<const ConfidenceSample> samples);
double ece(const ReliabilityBins& bins);
double mce(const ReliabilityBins& bins);

// ---------------------------------------------------------------------------
// Trace-level calibration: fits on (raw_confidence, local_correct).

using CalibrationModel = std::variant<PlattModel, IsotonicModel>;

enum class CalibrationMethod { Platt, Isotonic };

CalibrationModel fit_trace_calibration(const FrameTrace& trace, CalibrationMethod method);
double calibrate_confidence(const CalibrationModel& model, double raw_confidence);
// Copy of `trace` with calibrated_confidence recomputed from raw_confidence.
FrameTrace apply_calibration(const CalibrationModel& model, const FrameTrace& trace);

KeyValueFile calibration_to_config(const CalibrationModel& model);
CalibrationModel calibration_from_config(const KeyValueFile& file);
void save_calibration(const CalibrationModel& model, const std::filesystem::path& path);
CalibrationModel load_calibration(const std::filesystem::path& path);

}  // namespace cbo

#endif  // CBO_CALIBRATION_HPP_

#include "cbo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cbo/error.hpp"

namespace cbo {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 - P(y = 1) = e^z / (1 + e^z)
double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct NllState {
  double value{0.0};
  double grad_a{0.0};
  double grad_b{0.0};
  double h_aa{0.0};
  double h_ab{0.0};
  double h_bb{0.0};
};

NllState evaluate_nll(double a, double b, std::span<const double> scores, const std::vector<bool>& labels,
                      bool with_gradient) {
  NllState s;
  const double n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = a * scores[i] + b;
    const double neg = labels[i] ? 0.0 : 1.0;
    s.value += softplus(z) - neg * z;
    if (with_gradient) {
      const double p = logistic(z);
      const double dz = p - neg;
      const double w = p * (1.0 - p);
      s.grad_a += dz * scores[i];
      s.grad_b += dz;
      s.h_aa += w * scores[i] * scores[i];
      s.h_ab += w * scores[i];
      s.h_bb += w;
    }
  }
  s.value /= n;
  s.grad_a /= n;
  s.grad_b /= n;
  s.h_aa /= n;
  s.h_ab /= n;
  s.h_bb /= n;
  return s;
}

// Gradient with the components that push against an active box bound zeroed.
double projected_component(double x, double g, double cap) {
  if (x >= cap && g < 0) return 0.0;
  if (x <= -cap && g > 0) return 0.0;
  return g;
}

}  // namespace

double softmax_confidence(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("softmax_confidence: empty score vector");
  for (double x : scores) {
    if (!std::isfinite(x)) throw InvalidArgument("softmax_confidence: non-finite score");
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double denom = 0.0;
  for (double x : scores) denom += std::exp(x - top);
  return 1.0 / denom;
}

std::size_t argmax(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("argmax: empty score vector");
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

// ---------------------------------------------------------------------------

double PlattParams::apply(double score) const {
  const double z = a * score + b;
  double p = 0.0;
  if (z >= 0) {
    const double e = std::exp(-z);
    p = e / (1.0 + e);
  } else {
    p = 1.0 / (1.0 + std::exp(z));
  }
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

const PlattParams& PlattModel::params(std::size_t class_id) const {
  if (class_id >= classes_.size()) {
    throw InvalidArgument("unknown class id " + std::to_string(class_id));
  }
  return classes_[class_id];
}

double PlattModel::apply(std::span<const double> scores, std::size_t class_id) const {
  const auto& p = params(class_id);
  if (class_id >= scores.size()) throw InvalidArgument("score vector shorter than class id");
  return p.apply(scores[class_id]);
}

double PlattModel::frame_confidence(std::span<const double> scores) const {
  return apply(scores, argmax(scores));
}

double apply_platt(const PlattModel& model, std::span<const double> scores, std::size_t class_id) {
  return model.apply(scores, class_id);
}

double platt_nll(double a, double b, std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw InvalidArgument("platt_nll: scores and labels must be non-empty and equal length");
  }
  return evaluate_nll(a, b, scores, labels, false).value;
}

PlattParams fit_platt_scalar(std::span<const double> scores, const std::vector<bool>& labels,
                             const PlattFitOptions& options) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("fit_platt: scores and labels differ in length");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("fit_platt: non-finite score");
  }
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  const double cap = options.parameter_cap;

  PlattParams params;
  if (positives == 0 || negatives == 0) {
    params.degenerate = true;
    params.a = 0.0;
    params.b = scores.empty() ? 0.0 : (positives > 0 ? -cap : cap);
    params.capped = !scores.empty();
    return params;
  }

  double a = 0.0;
  double b = std::clamp(std::log((negatives + 1.0) / (positives + 1.0)), -cap, cap);
  auto state = evaluate_nll(a, b, scores, labels, true);

  // Armijo backtracking along d from step 1, projecting onto the box.
  auto line_search = [&](double da, double db, double min_step) {
    for (double step = 1.0; step > min_step; step *= 0.5) {
      const double na = std::clamp(a + step * da, -cap, cap);
      const double nb = std::clamp(b + step * db, -cap, cap);
      const double decrease = state.grad_a * (a - na) + state.grad_b * (b - nb);
      if (decrease <= 0.0) continue;
      const auto next = evaluate_nll(na, nb, scores, labels, false);
      if (next.value <= state.value - 1e-4 * decrease) {
        a = na;
        b = nb;
        return true;
      }
    }
    return false;
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const double ga = projected_component(a, state.grad_a, cap);
    const double gb = projected_component(b, state.grad_b, cap);
    if (std::hypot(ga, gb) < options.gradient_tolerance) break;

    // Newton step on the coordinates not held at a bound.
    const bool fix_a = ga == 0.0, fix_b = gb == 0.0;
    double da = 0.0, db = 0.0;
    if (fix_a) {
      db = state.h_bb > 0.0 ? -gb / state.h_bb : 0.0;
    } else if (fix_b) {
      da = state.h_aa > 0.0 ? -ga / state.h_aa : 0.0;
    } else {
      const double det = state.h_aa * state.h_bb - state.h_ab * state.h_ab;
      if (det > 1e-14 * state.h_aa * state.h_bb) {
        da = -(state.h_bb * ga - state.h_ab * gb) / det;
        db = -(state.h_aa * gb - state.h_ab * ga) / det;
      }
    }
    if (!line_search(da, db, 1e-10) && !line_search(-ga, -gb, 1e-20)) {
      break;  // no further progress possible in double precision
    }
    state = evaluate_nll(a, b, scores, labels, true);
  }

  params.a = a;
  params.b = b;
  params.iterations = iter;
  params.capped = std::abs(a) >= cap || std::abs(b) >= cap;
  return params;
}

PlattModel fit_platt(std::span<const PlattSample> samples, std::size_t class_count,
                     const PlattFitOptions& options) {
  std::vector<std::vector<double>> scores(class_count);
  std::vector<std::vector<bool>> labels(class_count);
  for (const auto& s : samples) {
    if (s.class_id >= class_count) {
      throw InvalidArgument("fit_platt: unknown class id " + std::to_string(s.class_id));
    }
    if (s.class_id >= s.scores.size()) {
      throw InvalidArgument("fit_platt: score vector shorter than class id");
    }
    scores[s.class_id].push_back(s.scores[s.class_id]);
    labels[s.class_id].push_back(s.label);
  }

  std::vector<PlattParams> classes;
  classes.reserve(class_count);
  for (std::size_t c = 0; c < class_count; ++c) {
    classes.push_back(fit_platt_scalar(scores[c], labels[c], options));
  }
  return PlattModel(std::move(classes));
}

// ---------------------------------------------------------------------------

IsotonicModel::IsotonicModel(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw InvalidArgument("isotonic model: need one value per breakpoint");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k]) || !(values_[k] >= 0.0 && values_[k] <= 1.0)) {
      throw InvalidArgument("isotonic model: invalid breakpoint or value");
    }
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
      throw InvalidArgument("isotonic model: breakpoints must be strictly ascending");
    }
    if (k > 0 && values_[k] < values_[k - 1]) {
      throw InvalidArgument("isotonic model: values must be non-decreasing");
    }
  }
}

double IsotonicModel::apply(double score) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), score);
  if (it == breakpoints_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

IsotonicModel fit_isotonic(std::span<const IsotonicSample> samples) {
  if (samples.size() < 2) throw InvalidArgument("fit_isotonic: need at least 2 samples");
  std::vector<IsotonicSample> sorted(samples.begin(), samples.end());
  for (const auto& s : sorted) {
    if (!std::isfinite(s.score)) throw InvalidArgument("fit_isotonic: non-finite score");
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& x, const auto& y) { return x.score < y.score; });

  struct Block {
    double lo;
    double sum;
    double weight;
    double mean() const { return sum / weight; }
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < sorted.size();) {
    // Tied scores must share a value.
    Block block{sorted[i].score, 0.0, 0.0};
    for (; i < sorted.size() && sorted[i].score == block.lo; ++i) {
      block.sum += sorted[i].label ? 1.0 : 0.0;
      block.weight += 1.0;
    }
    blocks.push_back(block);
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().weight += top.weight;
    }
  }

  std::vector<double> breakpoints;
  std::vector<double> values;
  for (const auto& block : blocks) {
    const double v = block.mean();
    if (!values.empty() && values.back() == v) continue;
    breakpoints.push_back(block.lo);
    values.push_back(v);
  }
  return IsotonicModel(std::move(breakpoints), std::move(values));
}

// ---------------------------------------------------------------------------

ReliabilityBins reliability_bins(std::span<const ConfidenceSample> samples) {
  ReliabilityBins out;
  std::array<double, kConfidenceBins> correct{};
  std::array<double, kConfidenceBins> confidence{};
  for (const auto& s : samples) {
    const auto b = confidence_bin(s.confidence);
    ++out.bins[b].count;
    correct[b] += s.correct ? 1.0 : 0.0;
    confidence[b] += s.confidence;
  }
  for (std::size_t b = 0; b < kConfidenceBins; ++b) {
    auto& bin = out.bins[b];
    if (bin.count == 0) continue;
    bin.accuracy = correct[b] / static_cast<double>(bin.count);
    bin.mean_confidence = confidence[b] / static_cast<double>(bin.count);
  }
  out.sample_count = samples.size();
  return out;
}

double ece(const ReliabilityBins& bins) {
  if (bins.sample_count == 0) throw InvalidArgument("ece: all bins are empty");
  double total = 0.0;
  const auto n = static_cast<double>(bins.sample_count);
  for (const auto& bin : bins.bins) {
    if (bin.empty()) continue;
    total += static_cast<double>(bin.count) / n * std::abs(bin.accuracy - bin.mean_confidence);
  }
  return total;
}

double mce(const ReliabilityBins& bins) {
  if (bins.sample_count == 0) throw InvalidArgument("mce: all bins are empty");
  double worst = 0.0;
  for (const auto& bin : bins.bins) {
    if (bin.empty()) continue;
    worst = std::max(worst, std::abs(bin.accuracy - bin.mean_confidence));
  }
  return worst;
}

// ---------------------------------------------------------------------------

CalibrationModel fit_trace_calibration(const FrameTrace& trace, CalibrationMethod method) {
  if (method == CalibrationMethod::Isotonic) {
    std::vector<IsotonicSample> samples;
    samples.reserve(trace.size());
    for (const auto& f : trace.frames) samples.push_back({f.raw_confidence, f.local_correct});
    return fit_isotonic(samples);
  }
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& f : trace.frames) {
    scores.push_back(f.raw_confidence);
    labels.push_back(f.local_correct);
  }
  return PlattModel({fit_platt_scalar(scores, labels)});
}

double calibrate_confidence(const CalibrationModel& model, double raw_confidence) {
  const double value = std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PlattModel>) {
          return m.params(0).apply(raw_confidence);
        } else {
          return m.apply(raw_confidence);
        }
      },
      model);
  return std::clamp(value, 0.0, 1.0);
}

FrameTrace apply_calibration(const CalibrationModel& model, const FrameTrace& trace) {
  FrameTrace out = trace;
  const auto* platt = std::get_if<PlattModel>(&model);
  for (auto& f : out.frames) {
    if (platt && platt->class_count() > 1 && f.raw_scores.size() == platt->class_count()) {
      f.calibrated_confidence = platt->frame_confidence(f.raw_scores);
    } else {
      f.calibrated_confidence = calibrate_confidence(model, f.raw_confidence);
    }
  }
  return out;
}

}  // namespace cbo

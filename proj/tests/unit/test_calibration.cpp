#include <doctest.h>

#include <cmath>
#include <random>

#include "cbo/calibration.hpp"
#include "cbo/config_file.hpp"
#include "cbo/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cbo;

namespace {

struct LogisticData {
  std::vector<double> x;
  std::vector<bool> y;
};

// Labels drawn from P(y=1|x) = 1/(1+exp(a*x+b)), x ~ U(0,1).
LogisticData logistic_data(double a, double b, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LogisticData d;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    d.x.push_back(x);
    d.y.push_back(u(rng) < 1.0 / (1.0 + std::exp(a * x + b)));
  }
  return d;
}

double ece_of(const std::vector<double>& conf, const std::vector<bool>& y) {
  std::vector<ConfidenceSample> s;
  for (std::size_t i = 0; i < conf.size(); ++i) s.push_back({conf[i], y[i]});
  return ece(reliability_bins(s));
}

}  // namespace

TEST_CASE("softmax confidence") {
  CHECK(softmax_confidence(std::vector<double>{0, 0, 0, 0}) == doctest::Approx(0.25));
  CHECK(softmax_confidence(std::vector<double>{std::log(2.0), 0}) == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(softmax_confidence(std::vector<double>{1000, 0}) - 1.0) < 1e-12);
  CHECK_THROWS_AS(softmax_confidence(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(softmax_confidence(std::vector<double>{1.0, std::nan("")}), InvalidArgument);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(5), shifted(5);
    const double c = fixture::uniform(rng, -100, 100);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = fixture::uniform(rng, -10, 10);
      shifted[i] = x[i] + c;
    }
    CHECK(std::abs(softmax_confidence(x) - softmax_confidence(shifted)) < 1e-9);
  }
  CHECK(argmax(std::vector<double>{0.1, 3.0, 3.0}) == 1);
}

TEST_CASE("platt: identity parameters give 0.5") {
  const PlattParams p{};
  CHECK(p.apply(-3.0) == 0.5);
  CHECK(p.apply(12.0) == 0.5);
  const PlattModel m({PlattParams{}, PlattParams{}});
  CHECK(apply_platt(m, std::vector<double>{1.0, 2.0}, 1) == 0.5);
  CHECK_THROWS_AS(apply_platt(m, std::vector<double>{1.0, 2.0}, 2), InvalidArgument);
}

TEST_CASE("platt: output stays in the open unit interval") {
  const PlattParams p{-50, 0};
  CHECK(p.apply(100.0) < 1.0);
  CHECK(p.apply(-100.0) > 0.0);
}

TEST_CASE("platt: recovers generating parameters") {
  const auto d = logistic_data(-4, 2, 10000, 17);
  const auto p = fit_platt_scalar(d.x, d.y);
  CHECK_FALSE(p.degenerate);
  CHECK_FALSE(p.capped);
  CHECK(std::abs(p.a - -4.0) <= 0.2);
  CHECK(std::abs(p.b - 2.0) <= 0.2);
}

TEST_CASE("platt: fitted NLL beats random perturbations") {
  const auto d = logistic_data(-3, 1, 2000, 23);
  const auto p = fit_platt_scalar(d.x, d.y);
  const double best = platt_nll(p.a, p.b, d.x, d.y);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 64; ++i) {
    const double scale = i < 32 ? 1e-3 : 0.5;
    const double a = p.a + fixture::uniform(rng, -scale, scale);
    const double b = p.b + fixture::uniform(rng, -scale, scale);
    CHECK(best <= platt_nll(a, b, d.x, d.y));
  }
}

TEST_CASE("platt: one-sided labels are degenerate") {
  const std::vector<double> x{0.1, 0.5, 0.9};
  const std::vector<bool> ones{true, true, true};
  const auto p = fit_platt_scalar(x, ones);
  CHECK(p.degenerate);
  CHECK(p.a == 0.0);
  for (double s = -10; s <= 10; s += 0.5) CHECK(p.apply(s) >= 0.5);

  const std::vector<bool> zeros{false, false, false};
  const auto q = fit_platt_scalar(x, zeros);
  CHECK(q.degenerate);
  CHECK(q.apply(0.3) < 0.5);
}

TEST_CASE("platt: separable data hits the cap") {
  const std::vector<double> x{0.1, 0.2, 0.8, 0.9};
  const std::vector<bool> y{false, false, true, true};
  const auto p = fit_platt_scalar(x, y);
  CHECK(p.capped);
  CHECK(std::max(std::abs(p.a), std::abs(p.b)) <= 50.0 + 1e-9);
  CHECK(p.apply(0.9) > 0.99);
}

TEST_CASE("platt: per-class models use one-vs-rest labels") {
  // Class 0 positives have high scores; class 1 is the mirror image.
  std::mt19937_64 rng(3);
  std::vector<PlattSample> samples;
  for (int i = 0; i < 4000; ++i) {
    const std::size_t cls = i % 2;
    const double s = fixture::uniform(rng, 0, 1);
    const double p1 = 1.0 / (1.0 + std::exp(-6 * s + 3));
    const bool label = fixture::uniform(rng, 0, 1) < (cls == 0 ? p1 : 1 - p1);
    std::vector<double> scores(2, 0.0);
    scores[cls] = s;
    samples.push_back(PlattSample{scores, cls, label});
  }
  const auto model = fit_platt(samples, 2);
  REQUIRE(model.class_count() == 2);
  CHECK(model.params(0).a < 0);
  CHECK(model.params(1).a > 0);
  CHECK(std::abs(model.params(0).a - -6) < 0.6);
  // Frame confidence is the calibrated score of the argmax class.
  const std::vector<double> x{0.9, 0.2};
  CHECK(model.frame_confidence(x) == model.apply(x, 0));
}

TEST_CASE("platt: class without one label value is flagged, others fit") {
  std::vector<PlattSample> samples;
  for (int i = 0; i < 20; ++i) {
    samples.push_back(PlattSample{{i / 20.0, 0.0}, 0, i % 3 == 0});
    samples.push_back(PlattSample{{0.0, i / 20.0}, 1, true});
  }
  const auto model = fit_platt(samples, 2);
  CHECK_FALSE(model.params(0).degenerate);
  CHECK(model.params(1).degenerate);
}

TEST_CASE("platt reduces held-out ECE on miscalibrated traces") {
  const auto train = fixture::synthetic_trace(31, 10000);
  const auto test = fixture::synthetic_trace(32, 10000);
  std::vector<double> raw;
  std::vector<bool> y;
  for (const auto& f : test.frames) {
    raw.push_back(f.raw_confidence);
    y.push_back(f.local_correct);
  }
  const double before = ece_of(raw, y);

  for (const auto method : {CalibrationMethod::Platt, CalibrationMethod::Isotonic}) {
    const auto model = fit_trace_calibration(train, method);
    std::vector<double> cal;
    for (const auto& f : test.frames) cal.push_back(calibrate_confidence(model, f.raw_confidence));
    const double after = ece_of(cal, y);
    CAPTURE(before);
    CAPTURE(after);
    CHECK(after < before);
  }
}

TEST_CASE("isotonic: monotone input stays put") {
  const std::vector<IsotonicSample> s{{0.1, false}, {0.2, false}, {0.3, true}, {0.4, true}};
  const auto m = fit_isotonic(s);
  CHECK(m.apply(0.1) == 0.0);
  CHECK(m.apply(0.2) == 0.0);
  CHECK(m.apply(0.3) == 1.0);
  CHECK(m.apply(0.4) == 1.0);
}

TEST_CASE("isotonic: violators are pooled") {
  const std::vector<IsotonicSample> s{{0.1, false}, {0.2, true}, {0.3, false}, {0.4, true}};
  const auto m = fit_isotonic(s);
  CHECK(m.apply(0.1) == 0.0);
  CHECK(m.apply(0.2) == 0.5);
  CHECK(m.apply(0.3) == 0.5);
  CHECK(m.apply(0.4) == 1.0);
  CHECK(oracle::isotonic_by_partitions(s) == std::vector<double>{0.0, 0.5, 0.5, 1.0});
  // Step function semantics between and outside the points.
  CHECK(m.apply(0.0) == 0.0);
  CHECK(m.apply(0.25) == 0.5);
  CHECK(m.apply(2.0) == 1.0);
}

TEST_CASE("isotonic: needs two samples") {
  const std::vector<IsotonicSample> one{{0.5, true}};
  CHECK_THROWS_AS(fit_isotonic(one), InvalidArgument);
}

TEST_CASE("isotonic: matches the partition oracle on every small input") {
  // All tie patterns (compositions of n) times all label vectors, n <= 6.
  std::size_t cases = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::uint32_t ties = 0; ties < (1u << (n - 1)); ++ties) {
      std::vector<double> scores;
      double score = 0.1;
      for (std::size_t i = 0; i < n; ++i) {
        scores.push_back(score);
        if (ties >> i & 1) score += 0.1;
      }
      for (std::uint32_t labels = 0; labels < (1u << n); ++labels) {
        std::vector<IsotonicSample> s;
        for (std::size_t i = 0; i < n; ++i) s.push_back({scores[i], (labels >> i & 1) != 0});
        const auto expect = oracle::isotonic_by_partitions(s);
        const auto model = fit_isotonic(s);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(model.apply(s[i].score) - expect[i]) < 1e-12);
        for (std::size_t k = 1; k < model.values().size(); ++k) {
          CHECK(model.values()[k - 1] < model.values()[k]);
        }
        ++cases;
      }
    }
  }
  CHECK(cases > 2000);
}

TEST_CASE("isotonic: apply is monotone on random data") {
  std::mt19937_64 rng(8);
  std::vector<IsotonicSample> s;
  for (int i = 0; i < 500; ++i) {
    const double x = fixture::uniform(rng, 0, 1);
    s.push_back({x, fixture::uniform(rng, 0, 1) < x * x});
  }
  const auto m = fit_isotonic(s);
  double prev = -1;
  for (double x = -0.1; x <= 1.1; x += 0.001) {
    const double v = m.apply(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("reliability bins") {
  const std::vector<ConfidenceSample> one{{0.95, true}};
  const auto b1 = reliability_bins(one);
  CHECK(b1.bins[9].count == 1);
  CHECK(b1.bins[9].accuracy == 1.0);
  CHECK(b1.bins[9].mean_confidence == 0.95);

  const std::vector<ConfidenceSample> four{{0.25, true}, {0.25, false}, {0.85, true}, {0.85, true}};
  const auto b = reliability_bins(four);
  CHECK(b.bins[2].count == 2);
  CHECK(b.bins[2].accuracy == 0.5);
  CHECK(b.bins[2].mean_confidence == 0.25);
  CHECK(b.bins[8].accuracy == 1.0);
  CHECK(b.bins[8].mean_confidence == 0.85);
  // 0.5*0.25 + 0.5*0.15 evaluates to exactly 0.2 in binary64 here.
  CHECK(ece(b) == 0.2);
  CHECK(mce(b) == 0.25);

  CHECK_THROWS_AS(ece(ReliabilityBins{}), InvalidArgument);
  CHECK_THROWS_AS(mce(ReliabilityBins{}), InvalidArgument);
}

TEST_CASE("perfectly calibrated bins have zero error") {
  // One dyadic confidence m/16 per bin, 16 samples with exactly m correct,
  // so every mean is exact in binary64.
  std::vector<ConfidenceSample> s;
  for (const int m : {1, 2, 4, 6, 7, 9, 10, 12, 14, 15}) {
    for (int i = 0; i < 16; ++i) s.push_back({m / 16.0, i < m});
  }
  const auto b = reliability_bins(s);
  for (const auto& bin : b.bins) {
    CHECK(bin.count == 16);
    CHECK(bin.accuracy == bin.mean_confidence);
  }
  CHECK(ece(b) == 0.0);
  CHECK(mce(b) == 0.0);
}

TEST_CASE("calibration models serialize") {
  const auto trace = fixture::synthetic_trace(2, 2000);
  for (const auto method : {CalibrationMethod::Platt, CalibrationMethod::Isotonic}) {
    const auto model = fit_trace_calibration(trace, method);
    const auto back = calibration_from_config(KeyValueFile::parse(calibration_to_config(model).to_string()));
    for (double x = 0.0; x <= 1.0; x += 0.01) {
      CHECK(calibrate_confidence(back, x) == calibrate_confidence(model, x));
    }
  }
  CHECK_THROWS_AS(calibration_from_config(KeyValueFile::parse("method = temperature\n")), ParseError);
}

TEST_CASE("apply_calibration rewrites only calibrated confidence") {
  const auto trace = fixture::synthetic_trace(6, 100);
  const auto model = fit_trace_calibration(trace, CalibrationMethod::Platt);
  const auto out = apply_calibration(model, trace);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(out.frames[i].raw_confidence == trace.frames[i].raw_confidence);
    CHECK(out.frames[i].size_bytes == trace.frames[i].size_bytes);
    CHECK(out.frames[i].calibrated_confidence == calibrate_confidence(model, trace.frames[i].raw_confidence));
  }
}

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "cbo/calibration.hpp"
#include "cbo/config_file.hpp"
#include "cbo/error.hpp"
#include "cbo/optimal.hpp"
#include "cbo/policies.hpp"
#include "cbo/simulator.hpp"
#include "cbo/workload.hpp"

namespace cbo::cli {

namespace {

std::string env(const std::string& flag) {
  std::string name = kEnvPrefix;
  for (char c : flag.substr(2)) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

struct Options {
  // inputs
  std::string trace_path;
  std::string profile_path;
  std::string network_path;
  std::string calibration_path;
  std::string schedule_path;
  std::string out_path;
  std::string frames_out_path;
  std::string schedule_out_path;

  std::uint64_t seed{0};
  int frames{200};
  double fps{30.0};
  double deadline_ms{200.0};
  double bandwidth_mbps{5.0};
  double latency_ms{100.0};
  double server_ms{37.0};
  double npu_ms{20.0};
  double calib_ms{8.0};
  std::string policy{"cbo"};
  double theta{0.5};
  std::string mode{"expected"};

  // gen-trace
  double miscal_weight{0.5};
  double miscal_exponent{0.5};
  double bytes_per_pixel{2.0};

  // calibrate
  std::string method{"platt"};

  // sweep / compare
  std::string axis{"bandwidth"};
  std::vector<double> values;
  std::vector<std::string> policies;
  unsigned workers{1};
  int instances{1};
  std::vector<double> bandwidths{1, 2, 5, 10, 20};
  std::vector<double> fps_values{15, 30};

  // Which overriding flags were given.
  CLI::Option* seed_opt{nullptr};
  CLI::Option* fps_opt{nullptr};
  CLI::Option* bandwidth_opt{nullptr};
  CLI::Option* latency_opt{nullptr};
  CLI::Option* server_opt{nullptr};
};

CLI::Option* flag(CLI::App* app, const std::string& name, auto& value, const std::string& help) {
  return app->add_option(name, value, help)->envname(env(name));
}

void add_trace_source(CLI::App* app, Options& o) {
  flag(app, "--trace", o.trace_path, "Trace file")->check(CLI::ExistingFile);
  o.seed_opt = flag(app, "--seed", o.seed, "Generate a synthetic trace with this seed instead of --trace");
  flag(app, "--frames", o.frames, "Frames to generate when --seed is used")->check(CLI::Range(1, 10'000'000));
  flag(app, "--calibration", o.calibration_path, "Calibration model applied to the trace")
      ->check(CLI::ExistingFile);
  flag(app, "--profile", o.profile_path, "Accuracy profile (default: built-in synthetic)")
      ->check(CLI::ExistingFile);
}

void add_network(CLI::App* app, Options& o) {
  flag(app, "--network", o.network_path, "Network model file")->check(CLI::ExistingFile);
  o.bandwidth_opt = flag(app, "--bandwidth-mbps", o.bandwidth_mbps, "Uplink bandwidth, Mbit/s");
  o.latency_opt = flag(app, "--latency-ms", o.latency_ms, "Round-trip network latency, ms");
  o.server_opt = flag(app, "--server-ms", o.server_ms, "Server inference time, ms");
  flag(app, "--deadline-ms", o.deadline_ms, "Per-frame deadline, ms");
  flag(app, "--npu-ms", o.npu_ms, "On-device inference time, ms");
  flag(app, "--calib-ms", o.calib_ms, "Calibration time, ms");
}

void add_mode(CLI::App* app, Options& o) {
  flag(app, "--mode", o.mode, "Accounting mode")->check(CLI::IsMember({"expected", "empirical"}));
}

AccuracyProfile load_profile(const Options& o) {
  return o.profile_path.empty() ? default_profile() : AccuracyProfile::load(o.profile_path);
}

NetworkModel load_network(const Options& o) {
  NetworkModel n = o.network_path.empty() ? NetworkModel{} : NetworkModel::load(o.network_path);
  if (o.network_path.empty() || *o.bandwidth_opt) n.bandwidth_bps = o.bandwidth_mbps * 1e6;
  if (o.network_path.empty() || *o.latency_opt) n.latency_s = o.latency_ms / 1e3;
  if (o.network_path.empty() || *o.server_opt) n.server_time_s = o.server_ms / 1e3;
  n.validate();
  return n;
}

SimParams sim_params(const Options& o) {
  return SimParams{o.npu_ms / 1e3, o.calib_ms / 1e3};
}

FrameTrace generate(const Options& o, const AccuracyProfile& profile, std::uint64_t seed) {
  TraceSpec spec;
  spec.frame_count = o.frames;
  spec.frame_rate_fps = o.fps;
  spec.profile = profile;
  spec.sizes.bytes_per_pixel = o.bytes_per_pixel;
  spec.miscalibration = Miscalibration{o.miscal_weight, o.miscal_exponent};
  spec.seed = seed;
  return generate_trace(spec);
}

FrameTrace calibrated(const Options& o, FrameTrace trace) {
  if (o.calibration_path.empty()) return trace;
  return apply_calibration(load_calibration(o.calibration_path), trace);
}

FrameTrace load_trace_source(const Options& o, const AccuracyProfile& profile) {
  if (!o.trace_path.empty()) {
    if (*o.seed_opt) throw InvalidArgument("--trace and --seed are mutually exclusive");
    return calibrated(o, load_trace(o.trace_path));
  }
  if (!*o.seed_opt) throw InvalidArgument("either --trace or --seed is required");
  return calibrated(o, generate(o, profile, o.seed));
}

// Mean arrival spacing of a trace; used when --fps is not given.
double trace_fps(const FrameTrace& trace, double fallback) {
  if (trace.size() < 2) return fallback;
  const double span = trace.frames.back().arrival_s - trace.frames.front().arrival_s;
  return span > 0 ? static_cast<double>(trace.size() - 1) / span : fallback;
}

std::string seed_text(const Options& o) {
  return o.seed_opt != nullptr && *o.seed_opt ? std::to_string(o.seed) : std::string("none");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_) {
      file_->close();
      if (!*file_) throw Error("write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_{nullptr};
};

std::string provenance(const std::string& command, const std::string& canonical, const std::string& seed) {
  return "# cbo " + command + " config_hash=" + config_hash(canonical) + " seed=" + seed + "\n";
}

std::string canonical_network(const NetworkModel& n, const TimingConfig& t, const SimParams& p) {
  std::ostringstream s;
  s << n.to_config().to_string() << "deadline_s=" << format_double(t.deadline_s())
    << "\nfps=" << format_double(t.frame_rate_fps()) << "\nnpu_s=" << format_double(p.npu_time_s)
    << "\ncalib_s=" << format_double(p.calib_time_s) << '\n';
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_gen_trace(const Options& o, std::ostream& stdout_stream) {
  const auto profile = load_profile(o);
  const auto trace = generate(o, profile, o.seed);
  std::ostringstream canonical;
  canonical << "frames=" << o.frames << "\nfps=" << format_double(o.fps)
            << "\nbytes_per_pixel=" << format_double(o.bytes_per_pixel)
            << "\nmiscal=" << format_double(o.miscal_weight) << ','
            << format_double(o.miscal_exponent) << '\n'
            << profile.to_config().to_string();

  auto text = write_trace(trace);
  const auto eol = text.find('\n');
  text.insert(eol + 1, provenance("gen-trace", canonical.str(), std::to_string(o.seed)));
  Output out(o.out_path, stdout_stream);
  *out << text;
  out.close();
  return 0;
}

int cmd_calibrate(const Options& o, std::ostream& log) {
  const auto trace = load_trace(o.trace_path);
  const auto method = o.method == "isotonic" ? CalibrationMethod::Isotonic : CalibrationMethod::Platt;
  const auto model = fit_trace_calibration(trace, method);

  const auto before = [&] {
    std::vector<ConfidenceSample> s;
    for (const auto& f : trace.frames) s.push_back({f.raw_confidence, f.local_correct});
    return ece(reliability_bins(s));
  }();
  const auto fitted = apply_calibration(model, trace);
  const auto after = [&] {
    std::vector<ConfidenceSample> s;
    for (const auto& f : fitted.frames) s.push_back({f.calibrated_confidence, f.local_correct});
    return ece(reliability_bins(s));
  }();

  const auto config = calibration_to_config(model).to_string();
  Output out(o.out_path, log);
  *out << provenance("calibrate", write_trace(trace) + "method=" + o.method, "none") << config;
  out.close();
  log << "ece_raw=" << format_double(before) << " ece_calibrated=" << format_double(after) << '\n';
  return 0;
}

int cmd_run(const Options& o, std::ostream& stdout_stream) {
  const auto profile = load_profile(o);
  auto trace = load_trace_source(o, profile);
  double fps = trace_fps(trace, o.fps);
  if (*o.fps_opt) {
    fps = o.fps;
    trace = retimed(trace, fps);
  }
  const auto network = load_network(o);
  const TimingConfig timing(fps, o.deadline_ms / 1e3, static_cast<int>(trace.size()));
  const auto params = sim_params(o);
  const auto mode = parse_accounting_mode(o.mode);

  std::unique_ptr<Policy> policy;
  std::optional<Schedule> schedule;
  if (o.policy == "optimal") {
    schedule = solve_optimal(trace, profile, network, timing, params.local_delay_s());
    policy = std::make_unique<ReplayPolicy>(*schedule);
  } else if (o.policy == "replay") {
    if (o.schedule_path.empty()) throw InvalidArgument("--policy replay needs --schedule");
    policy = std::make_unique<ReplayPolicy>(load_schedule(o.schedule_path, trace));
  } else {
    policy = make_policy(PolicySpec{o.policy, o.theta});
  }
  const auto report = run(*policy, trace, profile, network, timing, params);

  const std::string canonical = write_trace(trace) + profile.to_config().to_string() +
                                canonical_network(network, timing, params) + "policy=" + o.policy +
                                "\ntheta=" + format_double(o.theta) + "\nmode=" + o.mode + '\n';
  const auto header = provenance("run", canonical, seed_text(o));

  Output out(o.out_path, stdout_stream);
  *out << header;
  write_report_header(*out);
  write_report_row(*out, report, mode, "", std::nullopt);
  out.close();

  if (!o.frames_out_path.empty()) {
    Output frames(o.frames_out_path, stdout_stream);
    *frames << header;
    write_frame_csv(*frames, report, trace);
    frames.close();
  }
  if (!o.schedule_out_path.empty()) {
    if (!schedule) throw InvalidArgument("--schedule-out needs --policy optimal");
    save_schedule(*schedule, trace, o.schedule_out_path);
  }
  return 0;
}

std::vector<PolicySpec> policy_specs(const Options& o) {
  std::vector<PolicySpec> specs;
  const auto names = o.policies.empty() ? policy_names() : o.policies;
  for (const auto& n : names) specs.push_back(PolicySpec{n, o.theta});
  return specs;
}

std::string joined(const std::vector<double>& values) {
  std::string s;
  for (const auto v : values) s += (s.empty() ? "" : ",") + format_double(v);
  return s;
}

int cmd_sweep(const Options& o, std::ostream& stdout_stream) {
  const auto profile = load_profile(o);
  auto trace = load_trace_source(o, profile);
  double fps = trace_fps(trace, o.fps);
  if (*o.fps_opt) {
    fps = o.fps;
    trace = retimed(trace, fps);
  }
  SweepRequest req;
  req.axis = parse_sweep_axis(o.axis);
  req.values = o.values;
  if (req.values.empty()) throw InvalidArgument("--values is required");
  req.policies = policy_specs(o);
  req.network = load_network(o);
  req.timing = TimingConfig(fps, o.deadline_ms / 1e3, static_cast<int>(trace.size()));
  req.params = sim_params(o);
  req.workers = o.workers;
  const auto mode = parse_accounting_mode(o.mode);

  const auto rows = sweep(req, trace, profile);

  std::string names;
  for (const auto& p : req.policies) names += p.name + ",";
  const std::string canonical =
      write_trace(trace) + profile.to_config().to_string() +
      canonical_network(req.network, req.timing, req.params) + "axis=" + o.axis +
      "\nvalues=" + joined(o.values) + "\npolicies=" + names + "\ntheta=" + format_double(o.theta) +
      "\nmode=" + o.mode + '\n';

  Output out(o.out_path, stdout_stream);
  *out << provenance("sweep", canonical, seed_text(o));
  write_report_header(*out);
  for (const auto& row : rows) write_report_row(*out, row.report, mode, o.axis, row.value);
  out.close();
  return 0;
}

int cmd_compare(const Options& o, std::ostream& stdout_stream) {
  const auto profile = load_profile(o);
  const auto network_base = load_network(o);
  const auto params = sim_params(o);
  const auto mode = parse_accounting_mode(o.mode);
  const PolicySpec spec{o.policy, o.theta};
  make_policy(spec);  // reject unknown names early

  std::vector<std::pair<std::uint64_t, FrameTrace>> instances;
  if (!o.trace_path.empty()) {
    if (*o.seed_opt) throw InvalidArgument("--trace and --seed are mutually exclusive");
    instances.emplace_back(0, calibrated(o, load_trace(o.trace_path)));
  } else {
    if (!*o.seed_opt) throw InvalidArgument("either --trace or --seed is required");
    for (int k = 0; k < o.instances; ++k) {
      const auto seed = o.seed + static_cast<std::uint64_t>(k);
      instances.emplace_back(seed, calibrated(o, generate(o, profile, seed)));
    }
  }

  std::ostringstream body;
  body << "instance,seed,bandwidth_mbps,fps,policy,optimal_accuracy,policy_accuracy,gap\n";
  double gap_sum = 0.0;
  std::size_t count = 0;
  std::string canonical = profile.to_config().to_string();
  for (std::size_t k = 0; k < instances.size(); ++k) {
    canonical += write_trace(instances[k].second);
    for (const double bw : o.bandwidths) {
      for (const double fps : o.fps_values) {
        const auto trace = retimed(instances[k].second, fps);
        NetworkModel network = network_base;
        network.bandwidth_bps = bw * 1e6;
        const TimingConfig timing(fps, o.deadline_ms / 1e3, static_cast<int>(trace.size()));

        ReplayPolicy optimal(solve_optimal(trace, profile, network, timing, params.local_delay_s()));
        const auto best = run(optimal, trace, profile, network, timing, params);
        auto policy = make_policy(spec);
        const auto online = run(*policy, trace, profile, network, timing, params);

        const double a = headline_accuracy(best, mode);
        const double b = headline_accuracy(online, mode);
        gap_sum += a - b;
        ++count;
        body << k << ',' << instances[k].first << ',' << format_double(bw) << ','
             << format_double(fps) << ',' << policy->name() << ',' << format_double(a) << ','
             << format_double(b) << ',' << format_double(a - b) << '\n';
      }
    }
  }
  canonical += canonical_network(network_base, TimingConfig(30.0, o.deadline_ms / 1e3, 0), params) +
               "bandwidths=" + joined(o.bandwidths) + "\nfps=" + joined(o.fps_values) +
               "\npolicy=" + o.policy + "\ntheta=" + format_double(o.theta) + "\nmode=" + o.mode + '\n';

  Output out(o.out_path, stdout_stream);
  *out << provenance("compare", canonical, seed_text(o)) << body.str();
  *out << "# mean_gap=" << format_double(count ? gap_sum / static_cast<double>(count) : 0.0) << '\n';
  out.close();
  return 0;
}

}  // namespace

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence-based offloading: traces, calibration, simulation and sweeps", "cbo"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic frame trace");
  flag(gen, "--out", o.out_path, "Output trace file")->required();
  o.seed_opt = flag(gen, "--seed", o.seed, "RNG seed")->required();
  flag(gen, "--frames", o.frames, "Number of frames")->check(CLI::Range(1, 10'000'000));
  o.fps_opt = flag(gen, "--fps", o.fps, "Frame rate");
  flag(gen, "--profile", o.profile_path, "Accuracy profile")->check(CLI::ExistingFile);
  flag(gen, "--miscal-weight", o.miscal_weight, "Weight of the uniform noise in raw confidence");
  flag(gen, "--miscal-exponent", o.miscal_exponent, "Exponent applied to calibrated confidence");
  flag(gen, "--bytes-per-pixel", o.bytes_per_pixel, "Mean encoded bytes per pixel");

  auto* cal = app.add_subcommand("calibrate", "Fit a calibration model on a trace");
  flag(cal, "--trace", o.trace_path, "Trace file")->required()->check(CLI::ExistingFile);
  flag(cal, "--out", o.out_path, "Output model file")->required();
  flag(cal, "--method", o.method, "platt or isotonic")->check(CLI::IsMember({"platt", "isotonic"}));

  auto* run_cmd = app.add_subcommand("run", "Simulate one policy on one trace");
  add_trace_source(run_cmd, o);
  add_network(run_cmd, o);
  add_mode(run_cmd, o);
  o.fps_opt = flag(run_cmd, "--fps", o.fps, "Retime the trace to this frame rate");
  flag(run_cmd, "--policy", o.policy, "Policy name, 'optimal' or 'replay'");
  flag(run_cmd, "--theta", o.theta, "Threshold for the fixed-threshold policies");
  flag(run_cmd, "--schedule", o.schedule_path, "Schedule file for --policy replay")
      ->check(CLI::ExistingFile);
  flag(run_cmd, "--schedule-out", o.schedule_out_path, "Write the optimal schedule here");
  flag(run_cmd, "--frames-out", o.frames_out_path, "Per-frame CSV output");
  flag(run_cmd, "--out", o.out_path, "Report CSV (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep bandwidth, fps or latency");
  add_trace_source(sweep_cmd, o);
  add_network(sweep_cmd, o);
  add_mode(sweep_cmd, o);
  o.fps_opt = flag(sweep_cmd, "--fps", o.fps, "Retime the trace to this frame rate");
  flag(sweep_cmd, "--axis", o.axis, "bandwidth (Mbps), fps or latency (ms)");
  flag(sweep_cmd, "--values", o.values, "Comma-separated axis values")->delimiter(',');
  flag(sweep_cmd, "--policies", o.policies, "Comma-separated policy names (default all)")->delimiter(',');
  flag(sweep_cmd, "--theta", o.theta, "Threshold for the fixed-threshold policies");
  flag(sweep_cmd, "--workers", o.workers, "Parallel workers")->check(CLI::Range(1u, 256u));
  flag(sweep_cmd, "--out", o.out_path, "Table CSV (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Gap between the offline optimum and a policy");
  add_trace_source(cmp, o);
  add_network(cmp, o);
  add_mode(cmp, o);
  flag(cmp, "--instances", o.instances, "Generated instances (seeds seed..seed+k-1)")
      ->check(CLI::Range(1, 100000));
  flag(cmp, "--bandwidths", o.bandwidths, "Comma-separated Mbps grid")->delimiter(',');
  flag(cmp, "--fps-values", o.fps_values, "Comma-separated fps grid")->delimiter(',');
  flag(cmp, "--policy", o.policy, "Online policy to compare");
  flag(cmp, "--theta", o.theta, "Threshold for the fixed-threshold policies");
  flag(cmp, "--out", o.out_path, "Gap CSV (default stdout)");

  std::vector<std::string> storage{"cbo"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
    err << "cbo: error: " << e.what() << '\n';
    return e.get_exit_code();
  }

  // Each subcommand re-bound the shared option pointers; point them at the
  // parsed subcommand's options.
  auto rebind = [&](CLI::App* sub) {
    auto find = [&](const std::string& name) { return sub->get_option_no_throw(name); };
    o.seed_opt = find("--seed");
    o.fps_opt = find("--fps");
    o.bandwidth_opt = find("--bandwidth-mbps");
    o.latency_opt = find("--latency-ms");
    o.server_opt = find("--server-ms");
  };

  try {
    if (gen->parsed()) {
      rebind(gen);
      return cmd_gen_trace(o, out);
    }
    if (cal->parsed()) return cmd_calibrate(o, out);
    if (run_cmd->parsed()) {
      rebind(run_cmd);
      return cmd_run(o, out);
    }
    if (sweep_cmd->parsed()) {
      rebind(sweep_cmd);
      return cmd_sweep(o, out);
    }
    if (cmp->parsed()) {
      rebind(cmp);
      return cmd_compare(o, out);
    }
  } catch (const std::exception& e) {
    err << "cbo: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cbo::cli

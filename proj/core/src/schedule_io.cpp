#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cbo/config_file.hpp"
#include "cbo/error.hpp"
#include "cbo/optimal.hpp"

// Schedule file:
//
//   # cbo-schedule v1 frames=<n> expected_accuracy=<real> objective_units=<int>
//   index,decision,resolution,start_s,finish_s
//   1,local,,0.033,0.061
//   2,offload,90x90,0.095,0.251
//
// One line per frame of the trace, in trace order.

namespace cbo {

namespace {

constexpr std::string_view kMagic = "# cbo-schedule v1";
constexpr std::string_view kColumns = "index,decision,resolution,start_s,finish_s";

std::string header_value(std::string_view header, std::string_view key) {
  const std::string needle = " " + std::string(key) + "=";
  const auto pos = header.find(needle);
  if (pos == std::string_view::npos) return {};
  const auto begin = pos + needle.size();
  const auto end = header.find(' ', begin);
  return std::string(header.substr(begin, end == std::string_view::npos ? end : end - begin));
}

}  // namespace

std::string write_schedule(const Schedule& schedule, const FrameTrace& trace) {
  if (schedule.decisions.size() != trace.size()) {
    throw InvalidArgument("write_schedule: one decision per frame required");
  }
  std::string out(kMagic);
  out += " frames=" + std::to_string(schedule.decisions.size()) +
         " expected_accuracy=" + format_double(schedule.expected_accuracy) +
         " objective_units=" + std::to_string(schedule.objective_units) + "\n";
  out += std::string(kColumns) + "\n";
  for (const auto& d : schedule.decisions) {
    out += std::to_string(d.frame_index) + ",";
    if (d.offloaded()) {
      out += "offload," + trace.resolutions.at(*d.offload_resolution).id();
    } else {
      out += "local,";
    }
    out += "," + format_double(d.start_s) + "," + format_double(d.finish_s) + "\n";
  }
  return out;
}

Schedule parse_schedule(std::string_view text, const FrameTrace& trace, const std::string& source) {
  Schedule schedule;
  std::unordered_map<std::string, std::size_t> resolution_of;
  for (std::size_t r = 0; r < trace.resolutions.size(); ++r) {
    resolution_of[trace.resolutions[r].id()] = r;
  }

  std::size_t line_no = 0;
  std::size_t begin = 0;
  bool saw_columns = false;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(begin, end - begin));
    begin = end + 1;
    ++line_no;

    if (line_no == 1) {
      if (!line.starts_with(kMagic)) throw ParseError(source, 1, "header", "not a cbo schedule file");
      try {
        const auto acc = header_value(line, "expected_accuracy");
        if (!acc.empty()) schedule.expected_accuracy = parse_double(acc);
        const auto units = header_value(line, "objective_units");
        if (!units.empty()) schedule.objective_units = std::stoll(units);
      } catch (const std::exception& e) {
        throw ParseError(source, 1, "header", e.what());
      }
      continue;
    }
    if (!saw_columns) {
      if (line.starts_with('#')) continue;
      if (line != kColumns) throw ParseError(source, line_no, "columns", "unexpected column header");
      saw_columns = true;
      continue;
    }
    if (line.empty()) continue;

    const auto fields = split(line, ',');
    if (fields.size() != 5) throw ParseError(source, line_no, "record", "expected 5 fields");
    const std::size_t pos = schedule.decisions.size();
    if (pos >= trace.size()) throw ParseError(source, line_no, "index", "more decisions than frames");

    Decision d;
    try {
      d.frame_index = std::stoi(fields[0]);
    } catch (const std::exception&) {
      throw ParseError(source, line_no, "index", "not an integer");
    }
    if (d.frame_index != trace.frames[pos].index) {
      throw ParseError(source, line_no, "index", "does not match trace frame order");
    }
    if (fields[1] == "offload") {
      const auto it = resolution_of.find(fields[2]);
      if (it == resolution_of.end()) {
        throw ParseError(source, line_no, "resolution", "unknown resolution '" + fields[2] + "'");
      }
      d.offload_resolution = it->second;
    } else if (fields[1] != "local") {
      throw ParseError(source, line_no, "decision", "expected 'local' or 'offload'");
    }
    try {
      d.start_s = parse_double(fields[3]);
      d.finish_s = parse_double(fields[4]);
    } catch (const InvalidArgument& e) {
      throw ParseError(source, line_no, "start_s", e.what());
    }
    schedule.decisions.push_back(d);
  }
  if (schedule.decisions.size() != trace.size()) {
    throw ParseError(source, line_no, "record", "schedule has fewer decisions than trace frames");
  }
  return schedule;
}

void save_schedule(const Schedule& schedule, const FrameTrace& trace,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << write_schedule(schedule, trace);
}

Schedule load_schedule(const std::filesystem::path& path, const FrameTrace& trace) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schedule(ss.str(), trace, path.string());
}

}  // namespace cbo

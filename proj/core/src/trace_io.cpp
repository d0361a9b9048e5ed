#include <charconv>
#include <fstream>
#include <sstream>

#include "cbo/config_file.hpp"
#include "cbo/error.hpp"
#include "cbo/workload.hpp"

// Trace file grammar:
//
//   line 1   "# cbo-trace v1 resolutions=<id>,<id>,..."
//   "#" comment lines may follow the first line.
//   then     column header:
//            index,arrival_s,raw_confidence,calibrated_confidence,
//            size_<id>...,local_correct,server_<id>...,raw_scores
//   rest     one frame per line; booleans are 0/1; raw_scores is a
//            ';'-separated list or empty.
//
// Doubles are written in shortest round-trip form.

namespace cbo {

namespace {

constexpr std::string_view kMagic = "# cbo-trace v1 resolutions=";

std::string column_header(const std::vector<Resolution>& resolutions) {
  std::string h = "index,arrival_s,raw_confidence,calibrated_confidence";
  for (const auto& r : resolutions) h += ",size_" + r.id();
  h += ",local_correct";
  for (const auto& r : resolutions) h += ",server_" + r.id();
  h += ",raw_scores";
  return h;
}

std::vector<std::string> column_names(const std::vector<Resolution>& resolutions) {
  return split(column_header(resolutions), ',');
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line, const std::vector<std::string>& fields,
             const std::vector<std::string>& names)
      : source_(source), line_(line), fields_(fields), names_(names) {}

  double real(std::size_t col) const {
    try {
      return parse_double(fields_[col]);
    } catch (const InvalidArgument& e) {
      throw ParseError(source_, line_, names_[col], e.what());
    }
  }

  std::int64_t integer(std::size_t col) const {
    const auto& text = fields_[col];
    std::int64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
      throw ParseError(source_, line_, names_[col], "not an integer: '" + text + "'");
    }
    return value;
  }

  bool flag(std::size_t col) const {
    const auto& text = fields_[col];
    if (text == "1") return true;
    if (text == "0") return false;
    throw ParseError(source_, line_, names_[col], "expected 0 or 1, got '" + text + "'");
  }

  std::vector<double> reals(std::size_t col) const {
    std::vector<double> out;
    if (fields_[col].empty()) return out;
    for (const auto& item : split(fields_[col], ';')) {
      try {
        out.push_back(parse_double(item));
      } catch (const InvalidArgument& e) {
        throw ParseError(source_, line_, names_[col], e.what());
      }
    }
    return out;
  }

  [[noreturn]] void fail(std::size_t col, const std::string& what) const {
    throw ParseError(source_, line_, names_[col], what);
  }

 private:
  const std::string& source_;
  std::size_t line_;
  const std::vector<std::string>& fields_;
  const std::vector<std::string>& names_;
};

}  // namespace

std::string write_trace(const FrameTrace& trace) {
  trace.validate();
  std::string out(kMagic);
  for (std::size_t r = 0; r < trace.resolutions.size(); ++r) {
    if (r) out += ",";
    out += trace.resolutions[r].id();
  }
  out += "\n" + column_header(trace.resolutions) + "\n";
  for (const auto& f : trace.frames) {
    out += std::to_string(f.index) + "," + format_double(f.arrival_s) + "," +
           format_double(f.raw_confidence) + "," + format_double(f.calibrated_confidence);
    for (auto s : f.size_bytes) out += "," + std::to_string(s);
    out += f.local_correct ? ",1" : ",0";
    for (bool c : f.server_correct) out += c ? ",1" : ",0";
    out += ",";
    for (std::size_t k = 0; k < f.raw_scores.size(); ++k) {
      if (k) out += ";";
      out += format_double(f.raw_scores[k]);
    }
    out += "\n";
  }
  return out;
}

FrameTrace parse_trace(std::string_view text, const std::string& source) {
  FrameTrace trace;
  std::vector<std::string> names;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  bool saw_columns = false;

  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    begin = end + 1;
    ++line_no;

    if (line_no == 1) {
      if (!line.starts_with(kMagic)) {
        throw ParseError(source, line_no, "header", "missing '# cbo-trace v1 resolutions=' header");
      }
      for (const auto& id : split(line.substr(kMagic.size()), ',')) {
        try {
          trace.resolutions.push_back(Resolution::parse(id));
        } catch (const InvalidArgument& e) {
          throw ParseError(source, line_no, "resolutions", e.what());
        }
      }
      names = column_names(trace.resolutions);
      continue;
    }
    if (!saw_columns) {
      if (line.starts_with('#')) continue;
      if (line != column_header(trace.resolutions)) {
        throw ParseError(source, line_no, "columns", "column header does not match resolutions");
      }
      saw_columns = true;
      continue;
    }
    if (trim(line).empty()) continue;

    const auto fields = split(line, ',');
    if (fields.size() != names.size()) {
      throw ParseError(source, line_no, "record",
                       "expected " + std::to_string(names.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    const LineParser p(source, line_no, fields, names);
    const std::size_t m = trace.resolutions.size();

    Frame f;
    const auto index = p.integer(0);
    if (index < 1 || index > std::numeric_limits<int>::max()) p.fail(0, "index must be >= 1");
    f.index = static_cast<int>(index);
    f.arrival_s = p.real(1);
    f.raw_confidence = p.real(2);
    f.calibrated_confidence = p.real(3);
    for (std::size_t r = 0; r < m; ++r) {
      f.size_bytes.push_back(p.integer(4 + r));
      if (f.size_bytes.back() <= 0) p.fail(4 + r, "size must be positive");
      if (r > 0 && f.size_bytes[r] <= f.size_bytes[r - 1]) {
        p.fail(4 + r, "size_bytes must increase with resolution");
      }
    }
    f.local_correct = p.flag(4 + m);
    for (std::size_t r = 0; r < m; ++r) f.server_correct.push_back(p.flag(5 + m + r));
    f.raw_scores = p.reals(5 + 2 * m);

    if (f.raw_confidence < 0 || f.raw_confidence > 1) p.fail(2, "outside [0,1]");
    if (f.calibrated_confidence < 0 || f.calibrated_confidence > 1) p.fail(3, "outside [0,1]");
    if (!trace.frames.empty()) {
      if (f.index <= trace.frames.back().index) p.fail(0, "indices must increase");
      if (f.arrival_s <= trace.frames.back().arrival_s) p.fail(1, "arrival_time out of order");
    }
    trace.frames.push_back(std::move(f));
  }
  if (line_no == 0) throw ParseError(source, 1, "header", "empty trace file");
  if (!saw_columns) throw ParseError(source, line_no + 1, "columns", "missing column header");

  try {
    trace.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(source, 0, "trace", e.what());
  }
  return trace;
}

void save_trace(const FrameTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << write_trace(trace);
}

FrameTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), path.string());
}

}  // namespace cbo

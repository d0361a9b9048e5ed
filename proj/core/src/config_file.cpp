#include "cbo/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cbo/error.hpp"

namespace cbo {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(sep, begin);
    out.emplace_back(trim(text.substr(begin, pos == std::string_view::npos ? pos : pos - begin)));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(begin, end - begin));
    begin = end + 1;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source, line_no, std::string(line), "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(source, line_no, "<key>", "empty key");
    if (file.entries_.contains(key)) throw ParseError(source, line_no, key, "duplicate key");
    file.entries_[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
    file.order_.push_back(std::move(key));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_string();
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& key : order_) {
    out += key + " = " + entries_.at(key).value + "\n";
  }
  return out;
}

void KeyValueFile::set(const std::string& key, std::string value) {
  if (!entries_.contains(key)) order_.push_back(key);
  entries_[key] = Entry{std::move(value), 0};
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueFile::set(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ",";
    joined += format_double(values[i]);
  }
  set(key, std::move(joined));
}

bool KeyValueFile::contains(const std::string& key) const { return entries_.contains(key); }

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ParseError(source_, 0, key, "missing key");
  return it->second.value;
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

double KeyValueFile::get_double(const std::string& key) const {
  const auto& value = get(key);
  try {
    return parse_double(value);
  } catch (const InvalidArgument& e) {
    throw ParseError(source_, entries_.at(key).line, key, e.what());
  }
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) {
    try {
      out.push_back(parse_double(item));
    } catch (const InvalidArgument& e) {
      throw ParseError(source_, entries_.at(key).line, key, e.what());
    }
  }
  return out;
}

std::vector<std::string> KeyValueFile::get_list(const std::string& key) const {
  const auto& value = get(key);
  if (trim(value).empty()) return {};
  return split(value, ',');
}

}  // namespace cbo

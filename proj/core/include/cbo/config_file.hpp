#ifndef CBO_CONFIG_FILE_HPP_
#define CBO_CONFIG_FILE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbo {

// Flat "key = value" file. Blank lines and lines starting with '#' are
// ignored; keys are unique. Used for profiles, network models and
// calibration models.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text, const std::string& source = "<memory>");
  static KeyValueFile load(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;
  std::string to_string() const;

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, const std::vector<double>& values);

  bool contains(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line{0};
  };
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::string source_{"<memory>"};
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace cbo

#endif  // CBO_CONFIG_FILE_HPP_

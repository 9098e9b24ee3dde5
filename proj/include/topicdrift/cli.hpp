#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace topicdrift::cli {

/// Flat `section.key -> value` settings. Every key has a default; unknown keys
/// are rejected.
class Config {
 public:
  static Config defaults();

  /// Overlays an INI-style file (`[section]` headers, `key = value` lines).
  void merge_ini(std::string_view text);
  /// Overlays one `section.key=value` assignment.
  void set(std::string_view assignment);
  void set(const std::string& key, std::string value);

  const std::string& str(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  std::vector<std::size_t> size_list(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;

  /// Fills empty per-stage seeds from `run.seed`.
  void resolve_seeds();

  /// Sorted `key=value` lines; the hash is FNV-1a over this text.
  std::string canonical() const;
  std::string hash() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Runs one command line (without the program name). Returns the process exit
/// code: 0 success, 2 invalid input or usage, 1 internal failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topicdrift::cli

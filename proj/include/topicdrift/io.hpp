#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace topicdrift::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trippable rendering is not required; 17 significant digits is.
std::string format_double(double value);

/// RFC-4180 field quoting (only when needed).
std::string csv_escape(std::string_view field);

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// Parses RFC-4180 text. Quoted fields may contain separators, doubled quotes
/// and line breaks. A trailing newline does not produce an empty record.
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Little-endian binary encoder used by the model file formats.
class BinaryWriter {
 public:
  void bytes(std::string_view raw) { buffer_.append(raw); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);  // u32 length prefix

  /// Appends the FNV-1a checksum of everything written so far.
  void seal();
  const std::string& buffer() const noexcept { return buffer_; }

 private:
  std::string buffer_;
};

class BinaryReader {
 public:
  /// Verifies and strips the trailing checksum. Throws ParseError on mismatch.
  explicit BinaryReader(std::string data, std::string_view what);

  std::string bytes(std::size_t n);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::string data_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace topicdrift::io

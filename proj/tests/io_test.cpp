#include <gtest/gtest.h>

#include <filesystem>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"

using namespace topicdrift;

TEST(Csv, ParsesQuotedFieldsAgainstReferenceReader) {
  // Expected fields produced by Python's csv module on the same bytes.
  const std::string text =
      "id,label,text\r\n1,fake,\"Line one.\nLine two, with comma.\"\n2,real,\"He said \"\"hi\"\".\"\n3,real,plain text\n";
  const auto rows = io::parse_csv(text);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"id", "label", "text"}));
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"1", "fake", "Line one.\nLine two, with comma."}));
  EXPECT_EQ(rows[2].fields, (std::vector<std::string>{"2", "real", "He said \"hi\"."}));
  EXPECT_EQ(rows[3].fields, (std::vector<std::string>{"3", "real", "plain text"}));
  EXPECT_EQ(rows[1].line, 2u);
  EXPECT_EQ(rows[2].line, 4u);
}

TEST(Csv, EscapeRoundTrips) {
  for (std::string s : {"plain", "a,b", "q\"uote", "multi\nline", ""}) {
    const auto rows = io::parse_csv(io::csv_escape(s) + ",x\n");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].fields[0], s);
  }
}

TEST(Csv, UnterminatedQuoteIsAParseError) { EXPECT_THROW(io::parse_csv("a,\"b\n"), ParseError); }

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Binary, WriterReaderRoundTrip) {
  io::BinaryWriter w;
  w.u32(7);
  w.u64(1ULL << 40);
  w.f64(-2.5);
  w.str("hello");
  w.seal();
  io::BinaryReader r(w.buffer(), "test");
  EXPECT_EQ(r.u32(), 7u);
  EXPECT_EQ(r.u64(), 1ULL << 40);
  EXPECT_EQ(r.f64(), -2.5);
  EXPECT_EQ(r.str(), "hello");
  EXPECT_TRUE(r.at_end());
}

TEST(Binary, CorruptionFailsChecksum) {
  io::BinaryWriter w;
  w.u32(7);
  w.seal();
  std::string bytes = w.buffer();
  bytes[0] ^= 1;
  EXPECT_THROW(io::BinaryReader(bytes, "test"), ParseError);
}

TEST(Binary, TruncatedReadThrows) {
  io::BinaryWriter w;
  w.u32(7);
  w.seal();
  io::BinaryReader r(w.buffer(), "test");
  r.u32();
  EXPECT_THROW(r.u64(), ParseError);
}

TEST(WriteAtomic, ReplacesContents) {
  const auto path = std::filesystem::temp_directory_path() / "topicdrift_io_test.txt";
  io::write_atomic(path, "first");
  io::write_atomic(path, "second");
  EXPECT_EQ(io::read_file(path), "second");
  std::filesystem::remove(path);
}

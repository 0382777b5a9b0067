#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "rulelab/bitstream.hpp"
#include "rulelab/rng.hpp"

using namespace rulelab;

namespace {

// Independent ones count: walk the ascii rendering instead of the packed
// bytes.
std::uint64_t count_ones_ascii(const BitSequence& seq) {
  const std::string s = seq.to_string();
  return static_cast<std::uint64_t>(std::count(s.begin(), s.end(), '1'));
}

}  // namespace

TEST_CASE("rational reduces and compares exactly") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(0, 7) == Rational(0, 1));
  CHECK(Rational(4, 4) == Rational(1, 1));
  CHECK_THROWS_AS(Rational(1, 0), ValidationError);
  CHECK(parse_rational("1/4") == Rational(1, 4));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("3") == Rational(3, 1));
  CHECK_THROWS_AS(parse_rational("x"), ValidationError);
  CHECK_THROWS_AS(parse_rational("1/"), ValidationError);
}

TEST_CASE("bit sequence basics") {
  const BitSequence s = BitSequence::from_string("0110");
  CHECK(s.size() == 4);
  CHECK_FALSE(s.bit(1));
  CHECK(s.bit(2));
  CHECK(s.bit(3));
  CHECK_FALSE(s.bit(4));
  CHECK(s.to_string() == "0110");
  CHECK(s.ones_count() == 2);
  CHECK(s.prefix(2) == BitSequence::from_string("01"));
  CHECK(s.prefix(0).empty());
  CHECK_THROWS_AS(s.prefix(5), ValidationError);
  CHECK_THROWS_AS(BitSequence::from_string("01x"), ValidationError);

  CHECK(BitSequence::filled(9, true).to_string() == "111111111");
  CHECK(BitSequence::filled(3, false).to_string() == "000");
}

TEST_CASE("generate: periodic repeats and truncates") {
  const auto spec = SourceSpec::periodic(BitSequence::from_string("01"));
  CHECK(generate(spec, 6).to_string() == "010101");
  CHECK(generate(spec, 5).to_string() == "01010");
  CHECK(generate(spec, 0).empty());
  const auto spec3 = SourceSpec::periodic(BitSequence::from_string("110"));
  CHECK(generate(spec3, 7).to_string() == "1101101");
}

TEST_CASE("generate: uniform matches the fixed word-level scheme") {
  // First 64 bits must equal the first xoshiro256** output, MSB first.
  Xoshiro256StarStar rng(42);
  const std::uint64_t w0 = rng.next();
  const std::uint64_t w1 = rng.next();
  const BitSequence seq = generate(SourceSpec::uniform(42), 72);
  for (int j = 0; j < 64; ++j) {
    CHECK(seq.bit(j + 1) == (((w0 >> (63 - j)) & 1) != 0));
  }
  for (int j = 0; j < 8; ++j) {
    CHECK(seq.bit(65 + j) == (((w1 >> (63 - j)) & 1) != 0));
  }
}

TEST_CASE("generate: uniform seed=1 n=2^20 is nearly balanced") {
  const BitSequence seq = generate(SourceSpec::uniform(1), 1 << 20);
  const std::uint64_t ones = count_ones_ascii(seq);
  CHECK(ones == 523980);  // frozen from an independent implementation
  const double nu = static_cast<double>(ones) / (1 << 20);
  CHECK(std::abs(nu - 0.5) < 0.0015);  // 3 sigma for a fair coin
}

TEST_CASE("generate: bernoulli p=1/4 seed=7 n=2^20 tracks p") {
  const auto spec = SourceSpec::bernoulli(Rational(1, 4), 7);
  const BitSequence seq = generate(spec, 1 << 20);
  const std::uint64_t ones = count_ones_ascii(seq);
  CHECK(ones == 262292);  // frozen from an independent implementation
  const double nu = static_cast<double>(ones) / (1 << 20);
  CHECK(std::abs(nu - 0.25) < 0.0013);  // 3 sigma at p(1-p)=3/16
}

TEST_CASE("generate: determinism and prefix property") {
  const auto uniform = SourceSpec::uniform(99);
  CHECK(generate(uniform, 1000) == generate(uniform, 1000));

  for (const auto& spec :
       {SourceSpec::uniform(5), SourceSpec::bernoulli(Rational(1, 3), 5),
        SourceSpec::periodic(BitSequence::from_string("0110"))}) {
    const BitSequence longer = generate(spec, 777);
    for (const std::uint64_t n : {0ULL, 1ULL, 63ULL, 64ULL, 65ULL, 776ULL}) {
      CHECK(generate(spec, n) == longer.prefix(n));
    }
  }
}

TEST_CASE("generate: invalid specs rejected") {
  CHECK_THROWS_AS(SourceSpec::bernoulli(Rational(0, 3), 1), ValidationError);
  CHECK_THROWS_AS(SourceSpec::bernoulli(Rational(3, 3), 1), ValidationError);
  CHECK_THROWS_AS(SourceSpec::periodic(BitSequence()), ValidationError);
}

TEST_CASE("frequency is exact") {
  CHECK(frequency(BitSequence::from_string("0101")) == Rational(1, 2));
  CHECK(frequency(BitSequence::from_string("1111")) == Rational(1, 1));
  CHECK(frequency(BitSequence::from_string("0010")) == Rational(1, 4));
  CHECK_THROWS_AS(frequency(BitSequence()), ValidationError);
  for (const std::uint64_t k : {1ULL, 5ULL, 64ULL, 100ULL}) {
    CHECK(frequency(BitSequence::filled(k, false)) == Rational(0, 1));
    CHECK(frequency(BitSequence::filled(k, true)) == Rational(1, 1));
  }
}

TEST_CASE("ascii01 parses and reports bad characters by offset") {
  {
    std::istringstream in("0101\n");
    CHECK(read_bits(in, BitFileFormat::kAscii01) ==
          BitSequence::from_string("0101"));
  }
  {
    std::istringstream in(" 0 1\t1\r\n0");
    CHECK(read_bits(in, BitFileFormat::kAscii01) ==
          BitSequence::from_string("0110"));
  }
  {
    std::istringstream in("01x1");
    try {
      read_bits(in, BitFileFormat::kAscii01);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 2);
    }
  }
}

TEST_CASE("ascii01 writes exactly the bit characters") {
  std::ostringstream out;
  write_bits(BitSequence::from_string("010"), out, BitFileFormat::kAscii01);
  CHECK(out.str() == "010");
}

TEST_CASE("packed layout is bit-exact") {
  std::ostringstream out;
  write_bits(BitSequence::from_string("111111111"), out,
             BitFileFormat::kPacked);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 4 + 8 + 2);
  CHECK(bytes.substr(0, 4) == "RLB1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 9);  // little-endian n
  for (int i = 5; i < 12; ++i) CHECK(bytes[i] == 0);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0xFF);
  CHECK(static_cast<unsigned char>(bytes[13]) == 0x80);  // 7 pad bits zero

  std::ostringstream empty_out;
  write_bits(BitSequence(), empty_out, BitFileFormat::kPacked);
  CHECK(empty_out.str().size() == 12);  // header only
}

TEST_CASE("packed read rejects malformed files with offsets") {
  const auto offset_of = [](const std::string& data) -> std::uint64_t {
    std::istringstream in(data);
    try {
      read_bits(in, BitFileFormat::kPacked);
    } catch (const FormatError& e) {
      return e.offset();
    }
    return static_cast<std::uint64_t>(-1);
  };

  CHECK(offset_of("RLX1") == 2);  // bad magic
  CHECK(offset_of("RL") == 2);    // truncated header
  std::string short_len = "RLB1";
  short_len += '\x01';
  short_len += '\x00';
  CHECK(offset_of(short_len) == 6);  // truncated length field
  // n=9 but only one payload byte
  std::string truncated = "RLB1";
  truncated += '\x09';
  truncated += std::string(7, '\0');
  truncated += '\xFF';
  CHECK(offset_of(truncated) == 13);
  // n=1 with a nonzero pad bit
  std::string dirty = "RLB1";
  dirty += '\x01';
  dirty += std::string(7, '\0');
  dirty += '\xC0';
  CHECK(offset_of(dirty) == 12);
  // trailing byte after payload
  std::string trailing = "RLB1";
  trailing += '\x01';
  trailing += std::string(7, '\0');
  trailing += '\x80';
  trailing += 'Z';
  CHECK(offset_of(trailing) == 13);
}

TEST_CASE("file round-trips over generated corpus") {
  SplitMix64 gen(2024);
  for (int iter = 0; iter < 200; ++iter) {
    const std::uint64_t n = gen.next() % 300;
    BitSequence seq;
    for (std::uint64_t i = 0; i < n; ++i) seq.push_back(gen.next() & 1);

    for (const auto format :
         {BitFileFormat::kAscii01, BitFileFormat::kPacked}) {
      std::ostringstream out;
      write_bits(seq, out, format);
      std::istringstream in(out.str());
      CHECK(read_bits(in, format) == seq);
    }
  }
}

TEST_CASE("path round-trip and auto-detection") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto ascii_path = dir / "rulelab_test_ascii.bits";
  const auto packed_path = dir / "rulelab_test_packed.bits";
  const BitSequence seq = generate(SourceSpec::uniform(3), 1000);

  write_bits(seq, ascii_path, BitFileFormat::kAscii01);
  write_bits(seq, packed_path, BitFileFormat::kPacked);
  CHECK(read_bits(ascii_path, BitFileFormat::kAscii01) == seq);
  CHECK(read_bits(packed_path, BitFileFormat::kPacked) == seq);
  CHECK(read_bits_auto(ascii_path) == seq);
  CHECK(read_bits_auto(packed_path) == seq);

  CHECK_THROWS_AS(read_bits(dir / "rulelab_does_not_exist.bits",
                            BitFileFormat::kAscii01),
                  IoError);

  std::filesystem::remove(ascii_path);
  std::filesystem::remove(packed_path);
}

TEST_CASE("generate from file source takes a prefix") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "rulelab_test_source.bits";
  write_bits(BitSequence::from_string("110110"), path,
             BitFileFormat::kPacked);
  const auto spec = SourceSpec::file(path);
  CHECK(generate(spec, 4).to_string() == "1101");
  CHECK(generate(spec, 6).to_string() == "110110");
  CHECK_THROWS_AS(generate(spec, 7), ValidationError);
  std::filesystem::remove(path);
}

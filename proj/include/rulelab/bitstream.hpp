#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulelab/errors.hpp"

namespace rulelab {

/// Exact ratio of two 64-bit unsigned integers, kept in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  Rational() = default;
  Rational(std::uint64_t n, std::uint64_t d);  // reduces; throws if d == 0

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Parses "a/b", a decimal like "0.25", or a bare integer into an exact
/// Rational. Throws ValidationError on malformed input.
Rational parse_rational(std::string_view text);

/// A finite binary sequence, bit-packed most-significant-bit-first.
///
/// Bit positions are 1-based in every public contract: bit(1) is the first
/// symbol, bit(size()) the last. Padding bits in the last byte are always
/// zero, so byte-level comparison equals logical comparison.
class BitSequence {
 public:
  static constexpr std::uint64_t kMaxBits = 0xFFFFFFFFULL;  // 2^32 - 1

  BitSequence() = default;

  /// Builds from a string of '0'/'1' characters (no whitespace allowed).
  static BitSequence from_string(std::string_view bits);

  /// n copies of the same bit value.
  static BitSequence filled(std::uint64_t n, bool value);

  /// Adopts a packed payload (MSB-first, zero padding) of exactly
  /// ceil(n/8) bytes.
  static BitSequence from_packed(std::vector<std::uint8_t> bytes,
                                 std::uint64_t n);

  void push_back(bool bit);

  /// Reads the bit at 1-based position pos; pos must be in [1, size()].
  bool bit(std::uint64_t pos) const {
    const std::uint64_t i = pos - 1;
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
  }

  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  std::uint64_t ones_count() const;

  /// First len bits as a new sequence; len must be <= size().
  BitSequence prefix(std::uint64_t len) const;

  std::string to_string() const;

  /// Packed representation: MSB-first within each byte, pad bits zero.
  std::span<const std::uint8_t> bytes() const { return bytes_; }

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t size_ = 0;
};

enum class SourceKind { kUniform, kBernoulli, kPeriodic, kFile };

/// Description of a bit source. Bit content is a pure function of the spec
/// (and, for file sources, the file content).
struct SourceSpec {
  SourceKind kind = SourceKind::kUniform;
  std::uint64_t seed = 0;        // uniform, bernoulli
  Rational p{1, 2};              // bernoulli, must satisfy 0 < p < 1
  BitSequence pattern;           // periodic, must be non-empty
  std::filesystem::path path;    // file

  static SourceSpec uniform(std::uint64_t seed);
  static SourceSpec bernoulli(Rational p, std::uint64_t seed);
  static SourceSpec periodic(BitSequence pattern);
  static SourceSpec file(std::filesystem::path path);

  void validate() const;  // throws ValidationError
};

enum class BitFileFormat { kAscii01, kPacked };

/// Produces exactly n bits from the source. Deterministic; for a fixed spec,
/// the n-bit output is a prefix of the m-bit output whenever n <= m.
BitSequence generate(const SourceSpec& spec, std::uint64_t n);

// ascii01 files hold '0'/'1' characters; ASCII whitespace is ignored.
// packed files are: magic "RLB1", bit count as 8-byte little-endian,
// then ceil(n/8) payload bytes (MSB-first, pad bits zero). Bit-exact.
BitSequence read_bits(std::istream& in, BitFileFormat format);
BitSequence read_bits(const std::filesystem::path& path, BitFileFormat format);

/// Reads a bit file, detecting the packed format by its magic bytes and
/// falling back to ascii01 otherwise.
BitSequence read_bits_auto(const std::filesystem::path& path);

void write_bits(const BitSequence& seq, std::ostream& out,
                BitFileFormat format);
void write_bits(const BitSequence& seq, const std::filesystem::path& path,
                BitFileFormat format);

/// Frequency of ones, #ones/length, as an exact rational.
/// Throws ValidationError on an empty sequence.
Rational frequency(const BitSequence& seq);

}  // namespace rulelab

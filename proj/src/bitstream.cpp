#include "rulelab/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "rulelab/rng.hpp"

namespace rulelab {

namespace {

constexpr char kPackedMagic[4] = {'R', 'L', 'B', '1'};

bool is_ascii_space(int c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("invalid unsigned integer: '" + std::string(text) +
                          "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ValidationError("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::uint64_t num = parse_u64(text.substr(0, slash));
    const std::uint64_t den = parse_u64(text.substr(slash + 1));
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) {
      throw ValidationError("invalid decimal: '" + std::string(text) + "'");
    }
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : parse_u64(whole);
    return Rational(w * den + parse_u64(frac), den);
  }
  return Rational(parse_u64(text), 1);
}

BitSequence BitSequence::from_string(std::string_view bits) {
  BitSequence out;
  for (const char c : bits) {
    if (c != '0' && c != '1') {
      throw ValidationError(std::string("invalid bit character '") + c + "'");
    }
    out.push_back(c == '1');
  }
  return out;
}

BitSequence BitSequence::filled(std::uint64_t n, bool value) {
  if (n > kMaxBits) throw ValidationError("sequence length exceeds 2^32-1");
  BitSequence out;
  out.size_ = n;
  out.bytes_.assign((n + 7) / 8, value ? 0xFF : 0x00);
  if (value && n % 8 != 0) {
    out.bytes_.back() = static_cast<std::uint8_t>(0xFF << (8 - n % 8));
  }
  return out;
}

BitSequence BitSequence::from_packed(std::vector<std::uint8_t> bytes,
                                     std::uint64_t n) {
  if (n > kMaxBits) throw ValidationError("sequence length exceeds 2^32-1");
  if (bytes.size() != (n + 7) / 8) {
    throw ValidationError("packed payload size does not match bit count");
  }
  BitSequence out;
  out.bytes_ = std::move(bytes);
  out.size_ = n;
  return out;
}

void BitSequence::push_back(bool bit) {
  if (size_ >= kMaxBits) throw ValidationError("sequence length exceeds 2^32-1");
  if (size_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80 >> (size_ % 8));
  ++size_;
}

std::uint64_t BitSequence::ones_count() const {
  std::uint64_t ones = 0;
  for (const std::uint8_t b : bytes_) ones += std::popcount(b);
  return ones;
}

BitSequence BitSequence::prefix(std::uint64_t len) const {
  if (len > size_) throw ValidationError("prefix longer than sequence");
  BitSequence out;
  out.size_ = len;
  out.bytes_.assign(bytes_.begin(), bytes_.begin() + (len + 7) / 8);
  if (len % 8 != 0) {
    out.bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - len % 8));
  }
  return out;
}

std::string BitSequence::to_string() const {
  std::string out;
  out.reserve(size_);
  for (std::uint64_t pos = 1; pos <= size_; ++pos) {
    out.push_back(bit(pos) ? '1' : '0');
  }
  return out;
}

SourceSpec SourceSpec::uniform(std::uint64_t seed) {
  SourceSpec s;
  s.kind = SourceKind::kUniform;
  s.seed = seed;
  return s;
}

SourceSpec SourceSpec::bernoulli(Rational p, std::uint64_t seed) {
  SourceSpec s;
  s.kind = SourceKind::kBernoulli;
  s.p = p;
  s.seed = seed;
  s.validate();
  return s;
}

SourceSpec SourceSpec::periodic(BitSequence pattern) {
  SourceSpec s;
  s.kind = SourceKind::kPeriodic;
  s.pattern = std::move(pattern);
  s.validate();
  return s;
}

SourceSpec SourceSpec::file(std::filesystem::path path) {
  SourceSpec s;
  s.kind = SourceKind::kFile;
  s.path = std::move(path);
  return s;
}

void SourceSpec::validate() const {
  switch (kind) {
    case SourceKind::kUniform:
      return;
    case SourceKind::kBernoulli:
      if (p.num == 0 || p.num >= p.den) {
        throw ValidationError("bernoulli p must satisfy 0 < p < 1");
      }
      return;
    case SourceKind::kPeriodic:
      if (pattern.empty()) {
        throw ValidationError("periodic source requires a non-empty pattern");
      }
      return;
    case SourceKind::kFile:
      if (path.empty()) {
        throw ValidationError("file source requires a path");
      }
      return;
  }
  throw ValidationError("unknown source kind");
}

namespace {

BitSequence generate_uniform(std::uint64_t seed, std::uint64_t n) {
  std::vector<std::uint8_t> bytes((n + 7) / 8, 0);
  Xoshiro256StarStar rng(seed);
  std::uint64_t pos = 0;
  while (pos + 64 <= n) {
    const std::uint64_t w = rng.next();
    for (int k = 0; k < 8; ++k) {
      bytes[(pos >> 3) + k] = static_cast<std::uint8_t>(w >> (56 - 8 * k));
    }
    pos += 64;
  }
  if (pos < n) {
    const std::uint64_t w = rng.next();
    for (std::uint64_t j = 0; pos < n; ++j, ++pos) {
      if ((w >> (63 - j)) & 1) {
        bytes[pos >> 3] |= static_cast<std::uint8_t>(0x80 >> (pos & 7));
      }
    }
  }
  return BitSequence::from_packed(std::move(bytes), n);
}

BitSequence generate_bernoulli(const Rational& p, std::uint64_t seed,
                               std::uint64_t n) {
  // bit = 1 iff the next output falls below floor(p * 2^64); exact for any
  // rational p with a 64-bit numerator and denominator.
  const std::uint64_t threshold = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(p.num) << 64) / p.den);
  std::vector<std::uint8_t> bytes((n + 7) / 8, 0);
  Xoshiro256StarStar rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (rng.next() < threshold) {
      bytes[i >> 3] |= static_cast<std::uint8_t>(0x80 >> (i & 7));
    }
  }
  return BitSequence::from_packed(std::move(bytes), n);
}

BitSequence generate_periodic(const BitSequence& pattern, std::uint64_t n) {
  std::vector<std::uint8_t> bytes((n + 7) / 8, 0);
  const std::uint64_t period = pattern.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    if (pattern.bit(1 + (i % period))) {
      bytes[i >> 3] |= static_cast<std::uint8_t>(0x80 >> (i & 7));
    }
  }
  return BitSequence::from_packed(std::move(bytes), n);
}

}  // namespace

BitSequence generate(const SourceSpec& spec, std::uint64_t n) {
  spec.validate();
  if (n > BitSequence::kMaxBits) {
    throw ValidationError("sequence length exceeds 2^32-1");
  }
  switch (spec.kind) {
    case SourceKind::kUniform:
      return generate_uniform(spec.seed, n);
    case SourceKind::kBernoulli:
      return generate_bernoulli(spec.p, spec.seed, n);
    case SourceKind::kPeriodic:
      return generate_periodic(spec.pattern, n);
    case SourceKind::kFile: {
      const BitSequence all = read_bits_auto(spec.path);
      if (all.size() < n) {
        throw ValidationError("file source holds " +
                              std::to_string(all.size()) +
                              " bits, fewer than requested " +
                              std::to_string(n));
      }
      return all.prefix(n);
    }
  }
  throw ValidationError("unknown source kind");
}

namespace {

BitSequence read_ascii01(std::istream& in) {
  BitSequence out;
  std::uint64_t offset = 0;
  int c;
  while ((c = in.get()) != std::char_traits<char>::eof()) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (!is_ascii_space(c)) {
      throw FormatError(std::string("invalid character '") +
                            static_cast<char>(c) + "' in ascii01 input",
                        offset);
    }
    ++offset;
  }
  return out;
}

BitSequence read_packed(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() < 4) {
    throw FormatError("truncated header",
                      static_cast<std::uint64_t>(in.gcount()));
  }
  for (int i = 0; i < 4; ++i) {
    if (magic[i] != kPackedMagic[i]) {
      throw FormatError("bad magic", static_cast<std::uint64_t>(i));
    }
  }
  std::uint8_t len_bytes[8];
  in.read(reinterpret_cast<char*>(len_bytes), 8);
  if (in.gcount() < 8) {
    throw FormatError("truncated length field",
                      4 + static_cast<std::uint64_t>(in.gcount()));
  }
  std::uint64_t n = 0;
  for (int i = 7; i >= 0; --i) n = (n << 8) | len_bytes[i];
  if (n > BitSequence::kMaxBits) {
    throw FormatError("bit count exceeds 2^32-1", 4);
  }
  const std::uint64_t payload_len = (n + 7) / 8;
  std::vector<std::uint8_t> payload(payload_len);
  if (payload_len > 0) {
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload_len));
    if (static_cast<std::uint64_t>(in.gcount()) < payload_len) {
      throw FormatError("truncated payload",
                        12 + static_cast<std::uint64_t>(in.gcount()));
    }
  }
  if (n % 8 != 0) {
    const std::uint8_t pad_mask =
        static_cast<std::uint8_t>(0xFF >> (n % 8));
    if ((payload.back() & pad_mask) != 0) {
      throw FormatError("nonzero padding bits", 12 + payload_len - 1);
    }
  }
  if (in.get() != std::char_traits<char>::eof()) {
    throw FormatError("trailing data after payload", 12 + payload_len);
  }
  return BitSequence::from_packed(std::move(payload), n);
}

}  // namespace

BitSequence read_bits(std::istream& in, BitFileFormat format) {
  switch (format) {
    case BitFileFormat::kAscii01:
      return read_ascii01(in);
    case BitFileFormat::kPacked:
      return read_packed(in);
  }
  throw ValidationError("unknown bit file format");
}

BitSequence read_bits(const std::filesystem::path& path,
                      BitFileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_bits(in, format);
}

BitSequence read_bits_auto(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  const bool packed =
      in.gcount() == 4 && std::equal(magic, magic + 4, kPackedMagic);
  in.clear();
  in.seekg(0);
  return read_bits(in, packed ? BitFileFormat::kPacked
                              : BitFileFormat::kAscii01);
}

void write_bits(const BitSequence& seq, std::ostream& out,
                BitFileFormat format) {
  switch (format) {
    case BitFileFormat::kAscii01: {
      const std::string s = seq.to_string();
      out.write(s.data(), static_cast<std::streamsize>(s.size()));
      break;
    }
    case BitFileFormat::kPacked: {
      out.write(kPackedMagic, 4);
      const std::uint64_t n = seq.size();
      char len_bytes[8];
      for (int i = 0; i < 8; ++i) {
        len_bytes[i] = static_cast<char>(n >> (8 * i));
      }
      out.write(len_bytes, 8);
      const auto payload = seq.bytes();
      out.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
      break;
    }
  }
  if (!out) throw IoError("write failed");
}

void write_bits(const BitSequence& seq, const std::filesystem::path& path,
                BitFileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_bits(seq, out, format);
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

Rational frequency(const BitSequence& seq) {
  if (seq.empty()) {
    throw ValidationError("frequency of an empty sequence is undefined");
  }
  return Rational(seq.ones_count(), seq.size());
}

}  // namespace rulelab

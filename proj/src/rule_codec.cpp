#include <cstring>

#include "rulelab/rulevm.hpp"

namespace rulelab {

namespace {

constexpr char kRuleMagic[4] = {'R', 'U', 'L', 'E'};
constexpr std::size_t kHeaderSize = 6;
constexpr std::size_t kRecordSize = 9;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_u16(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
}

}  // namespace

std::vector<std::uint8_t> serialize_rule(const SelectionRule& rule) {
  rule.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + kRecordSize * rule.states.size());
  out.insert(out.end(), kRuleMagic, kRuleMagic + 4);
  put_u16(out, static_cast<std::uint16_t>(rule.states.size()));
  for (const RuleState& s : rule.states) {
    put_u16(out, static_cast<std::uint16_t>(s.move));
    out.push_back(static_cast<std::uint8_t>((s.select ? 1 : 0) |
                                            (s.halt ? 2 : 0)));
    put_u16(out, s.next_on_0);
    put_u16(out, s.next_on_1);
    put_u16(out, s.next_skip);
  }
  return out;
}

SelectionRule deserialize_rule(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw FormatError("truncated header", bytes.size());
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kRuleMagic[i])) {
      throw FormatError("bad magic", i);
    }
  }
  const std::uint16_t count = get_u16(bytes, 4);
  if (count == 0) throw FormatError("rule has no states", 4);
  const std::size_t expected = kHeaderSize + kRecordSize * count;
  if (bytes.size() < expected) {
    throw FormatError("truncated state records", bytes.size());
  }
  if (bytes.size() > expected) {
    throw FormatError("trailing data after state records", expected);
  }

  SelectionRule rule;
  rule.states.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kHeaderSize + kRecordSize * i;
    RuleState s;
    s.move = static_cast<std::int16_t>(get_u16(bytes, at));
    const std::uint8_t flags = bytes[at + 2];
    if (flags > 3) {
      throw FormatError("unknown flag bits in state " + std::to_string(i + 1),
                        at + 2);
    }
    s.select = flags & 1;
    s.halt = flags & 2;
    s.next_on_0 = get_u16(bytes, at + 3);
    s.next_on_1 = get_u16(bytes, at + 5);
    s.next_skip = get_u16(bytes, at + 7);
    rule.states.push_back(s);
  }
  rule.validate();
  return rule;
}

std::uint64_t rule_complexity(const SelectionRule& rule) {
  return 8 * static_cast<std::uint64_t>(serialize_rule(rule).size());
}

}  // namespace rulelab

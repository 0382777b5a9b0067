#include <charconv>
#include <cstdlib>
#include <string>

#include "rulelab/rulevm.hpp"

namespace rulelab {

namespace {

// Cursor over a single DSL line; columns are 1-based for error reporting.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::uint64_t line_no)
      : text_(text), line_no_(line_no) {}

  void skip_spaces() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_spaces();
    return pos_ >= text_.size();
  }

  std::uint64_t column() const { return pos_ + 1; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_no_, column());
  }

  void expect_word(std::string_view word) {
    skip_spaces();
    if (text_.substr(pos_, word.size()) != word) {
      fail("expected '" + std::string(word) + "'");
    }
    pos_ += word.size();
  }

  bool try_word(std::string_view word) {
    skip_spaces();
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void expect_char(char c) {
    skip_spaces();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  long long integer(std::string_view what) {
    skip_spaces();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      ++pos_;
    }
    std::size_t digits_start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      ++pos_;
    }
    if (pos_ == digits_start) {
      pos_ = start;
      fail("expected " + std::string(what));
    }
    long long value = 0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    if (std::from_chars(first, last, value).ec != std::errc{}) {
      pos_ = start;
      fail(std::string(what) + " out of range");
    }
    return value;
  }

 private:
  std::string_view text_;
  std::uint64_t line_no_;
  std::size_t pos_ = 0;
};

struct ParsedState {
  std::uint64_t id;
  RuleState state;
  std::uint64_t line_no;
  // Raw transition targets, range-checked once the state count is known.
  long long on0, on1, skip;
};

ParsedState parse_state_line(std::string_view line, std::uint64_t line_no) {
  LineCursor cur(line, line_no);
  ParsedState out{};
  out.line_no = line_no;

  cur.expect_word("state");
  const long long id = cur.integer("state id");
  if (id < 1 || id > static_cast<long long>(SelectionRule::kMaxStates)) {
    cur.fail("state id must be in 1..65535");
  }
  out.id = static_cast<std::uint64_t>(id);
  cur.expect_char(':');

  cur.expect_word("move");
  const long long move = cur.integer("move");
  if (move < std::numeric_limits<std::int16_t>::min() ||
      move > std::numeric_limits<std::int16_t>::max()) {
    cur.fail("move out of range [-32768, 32767]");
  }
  out.state.move = static_cast<std::int16_t>(move);

  if (cur.try_word("select")) {
    out.state.select = true;
  } else if (cur.try_word("skip")) {
    out.state.select = false;
  } else {
    cur.fail("expected 'select' or 'skip'");
  }

  cur.expect_word("halt=");
  if (cur.try_word("yes")) {
    out.state.halt = true;
  } else if (cur.try_word("no")) {
    out.state.halt = false;
  } else {
    cur.fail("expected 'yes' or 'no'");
  }

  cur.expect_word("->");
  out.on0 = cur.integer("transition target");
  cur.expect_char(',');
  out.on1 = cur.integer("transition target");
  cur.expect_char(',');
  out.skip = cur.integer("transition target");

  if (!cur.at_end()) cur.fail("unexpected trailing text");
  return out;
}

}  // namespace

SelectionRule parse_rule(std::string_view text) {
  std::vector<ParsedState> parsed;
  std::uint64_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    if (line.ends_with('\r')) line.remove_suffix(1);
    parsed.push_back(parse_state_line(line, line_no));
  }

  if (parsed.empty()) throw ValidationError("rule has no states");
  const std::uint64_t count = parsed.size();

  SelectionRule rule;
  rule.states.resize(count);
  std::vector<bool> seen(count, false);
  for (const ParsedState& p : parsed) {
    if (p.id > count) {
      throw ValidationError("state ids are not contiguous: state " +
                            std::to_string(p.id) + " with only " +
                            std::to_string(count) + " states");
    }
    if (seen[p.id - 1]) {
      throw ValidationError("duplicate state " + std::to_string(p.id));
    }
    seen[p.id - 1] = true;

    RuleState s = p.state;
    for (const long long target : {p.on0, p.on1, p.skip}) {
      if (target < 1 || target > static_cast<long long>(count)) {
        throw ValidationError("state " + std::to_string(p.id) +
                              ": undefined state " + std::to_string(target));
      }
    }
    s.next_on_0 = static_cast<std::uint16_t>(p.on0);
    s.next_on_1 = static_cast<std::uint16_t>(p.on1);
    s.next_skip = static_cast<std::uint16_t>(p.skip);
    if (s.move == 0) {
      throw ValidationError("state " + std::to_string(p.id) +
                            ": move must be nonzero");
    }
    rule.states[p.id - 1] = s;
  }
  rule.validate();
  return rule;
}

std::string serialize_rule_text(const SelectionRule& rule) {
  rule.validate();
  std::string out;
  for (std::size_t i = 0; i < rule.states.size(); ++i) {
    const RuleState& s = rule.states[i];
    out += "state " + std::to_string(i + 1) + ": move ";
    if (s.move > 0) out += '+';
    out += std::to_string(s.move);
    out += s.select ? " select" : " skip";
    out += s.halt ? " halt=yes" : " halt=no";
    out += " -> " + std::to_string(s.next_on_0) + "," +
           std::to_string(s.next_on_1) + "," + std::to_string(s.next_skip) +
           "\n";
  }
  return out;
}

}  // namespace rulelab

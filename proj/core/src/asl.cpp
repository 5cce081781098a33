#include "citopt/asl.hpp"

#include <cctype>
#include <sstream>

#include "citopt/error.hpp"

namespace citopt {

namespace {

void check_item(const AslItem& item) {
  if (const auto* b = std::get_if<SystemBehavior>(&item)) {
    if (b->k < 0) fail(ErrorCode::InvalidArgument, "behavior index must be >= 0");
    if (b->sign != 1 && b->sign != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
    return;
  }
  const auto& t = std::get<TangentMarker>(item);
  if (t.k < 1) fail(ErrorCode::InvalidArgument, "tangent marker index must be >= 1");
  if (t.sign != 1 && t.sign != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  const bool even_case = t.degree > 0 && t.degree % 2 == 0 && t.degree < t.k;
  if (!even_case && t.degree != t.k)
    fail(ErrorCode::InvalidArgument, "tangent degree must be even and < k, or equal to k");
}

char sign_char(int s) { return s > 0 ? '+' : '-'; }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  AugmentedSwitchingLaw run() {
    AugmentedSwitchingLaw out;
    skip_ws();
    while (pos_ < s_.size()) {
      if (s_[pos_] == '(') {
        ++pos_;
        TangentMarker t;
        t.k = number();
        t.sign = sign();
        expect(',');
        t.degree = number();
        expect(')');
        out.push_back(t);
      } else {
        SystemBehavior b;
        b.k = number();
        b.sign = sign();
        out.push_back(b);
      }
      if (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])))
        error("expected whitespace between tokens");
      skip_ws();
    }
    for (const auto& item : out) {
      try {
        check_item(item);
      } catch (const Error& e) {
        error(e.what());
      }
    }
    return out;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, msg + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  int number() {
    const size_t start = pos_;
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) error("index too large");
      ++pos_;
    }
    if (pos_ == start) error("expected digit");
    return v;
  }

  int sign() {
    if (pos_ >= s_.size()) error("expected sign");
    const char c = s_[pos_++];
    if (c == '+') return 1;
    if (c == '-') return -1;
    --pos_;
    error("expected '+' or '-'");
  }

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

void validate_asl(const AugmentedSwitchingLaw& a) {
  for (const auto& item : a) check_item(item);
}

std::string asl_to_text(const AugmentedSwitchingLaw& a) {
  validate_asl(a);
  std::ostringstream os;
  bool first = true;
  for (const auto& item : a) {
    if (!first) os << ' ';
    first = false;
    if (const auto* b = std::get_if<SystemBehavior>(&item)) {
      os << b->k << sign_char(b->sign);
    } else {
      const auto& t = std::get<TangentMarker>(item);
      os << '(' << t.k << sign_char(t.sign) << ',' << t.degree << ')';
    }
  }
  return os.str();
}

AugmentedSwitchingLaw asl_parse(std::string_view text) { return Parser(text).run(); }

}  // namespace citopt

#ifndef REGSEQ_FUNCSPEC_HPP
#define REGSEQ_FUNCSPEC_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "regseq/errors.hpp"
#include "regseq/numeric.hpp"

namespace regseq::funclib {

struct PowerTerm {
  Rat coeff;
  Rat expo;
};

// A finite sum of rational-coefficient power terms c * x^e with e >= 0,
// exponents pairwise distinct and stored in decreasing order. This family
// covers every function the toolkit evaluates; monotonicity metadata is
// derived symbolically from it.
class FunctionSpec {
 public:
  FunctionSpec(std::vector<PowerTerm> terms, std::string label)
      : terms_(std::move(terms)), label_(std::move(label)) {
    if (terms_.empty()) throw BadArgument("function spec must have at least one term");
    std::sort(terms_.begin(), terms_.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.expo > b.expo; });
    for (std::size_t i = 0; i + 1 < terms_.size(); ++i)
      if (terms_[i].expo == terms_[i + 1].expo)
        throw BadArgument("duplicate exponent in function spec");
    for (const auto& t : terms_)
      if (sign(t.expo) < 0) throw BadArgument("negative exponent in function spec");
  }

  const std::vector<PowerTerm>& terms() const { return terms_; }
  const std::string& label() const { return label_; }

  // Leading term positive with exponent strictly inside (1, 2): forces
  // f''(x) -> 0 and f'(x) -> infinity, the hypotheses the seekers need.
  bool admissible() const {
    const PowerTerm& lead = terms_.front();
    return sign(lead.coeff) > 0 && lead.expo > 1 && lead.expo < 2;
  }

  // All exponents nonnegative integers: every evaluation is exact rational.
  bool integer_only() const {
    for (const auto& t : terms_)
      if (!is_integer(t.expo)) return false;
    return true;
  }

  // Effective terms of the order-th derivative, zero coefficients dropped.
  // d/dx of c*x^e is c*e*x^(e-1).
  std::vector<PowerTerm> derivative_terms(int order) const {
    std::vector<PowerTerm> out;
    for (const auto& t : terms_) {
      Rat c = t.coeff;
      Rat e = t.expo;
      for (int d = 0; d < order; ++d) {
        c *= e;
        e -= 1;
      }
      if (sign(c) != 0) out.push_back({c, e});
    }
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      if (i > 0) s += " + ";
      if (t.expo == 0) {
        s += regseq::to_string(t.coeff);
        continue;
      }
      if (t.coeff != 1) s += regseq::to_string(t.coeff) + "*";
      s += "x";
      if (t.expo != 1) {
        if (is_integer(t.expo))
          s += "^" + t.expo.get_num().get_str();
        else
          s += "^(" + t.expo.get_num().get_str() + "/" + t.expo.get_den().get_str() + ")";
      }
    }
    return s;
  }

 private:
  std::vector<PowerTerm> terms_;
  std::string label_;
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : s_(text) {}

  std::vector<PowerTerm> parse() {
    std::vector<PowerTerm> terms;
    bool first = true;
    skip_ws();
    while (pos_ < s_.size()) {
      int sg = 1;
      if (first) {
        if (peek() == '+' || peek() == '-') sg = (take() == '-') ? -1 : 1;
      } else {
        char c = take();
        if (c == '+')
          sg = 1;
        else if (c == '-')
          sg = -1;
        else
          fail("expected '+' or '-' between terms");
      }
      first = false;
      PowerTerm t = parse_term();
      t.coeff *= sg;
      terms.push_back(std::move(t));
      skip_ws();
    }
    if (terms.empty()) fail("empty function spec");
    return combine(std::move(terms));
  }

 private:
  PowerTerm parse_term() {
    skip_ws();
    Rat coeff(1);
    bool saw_coeff = false;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = parse_rational();
      saw_coeff = true;
      skip_ws();
      if (pos_ < s_.size() && peek() == '*') {
        ++pos_;
        skip_ws();
      }
    }
    if (pos_ < s_.size() && peek() == 'x') {
      ++pos_;
      skip_ws();
      Rat expo(1);
      if (pos_ < s_.size() && peek() == '^') {
        ++pos_;
        expo = parse_exponent();
      }
      return {coeff, expo};
    }
    if (!saw_coeff) fail("expected coefficient or 'x'");
    return {coeff, Rat(0)};  // bare constant
  }

  Rat parse_exponent() {
    skip_ws();
    if (pos_ < s_.size() && peek() == '(') {
      ++pos_;
      Rat e = parse_rational();
      skip_ws();
      if (pos_ >= s_.size() || take() != ')') fail("unterminated exponent parenthesis");
      return e;
    }
    return Rat(parse_integer());
  }

  Rat parse_rational() {
    Int num = parse_integer();
    skip_ws();
    if (pos_ < s_.size() && peek() == '/') {
      ++pos_;
      skip_ws();
      Int den = parse_integer();
      if (den == 0) fail("zero denominator");
      Rat r(num, den);
      r.canonicalize();
      return r;
    }
    return Rat(num);
  }

  Int parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (peek() == '-' || peek() == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(s_[start]))))
      fail("expected integer");
    return parse_int(s_.substr(start, pos_ - start));
  }

  static std::vector<PowerTerm> combine(std::vector<PowerTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.expo > b.expo; });
    std::vector<PowerTerm> out;
    for (auto& t : terms) {
      if (!out.empty() && out.back().expo == t.expo)
        out.back().coeff += t.coeff;
      else
        out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const PowerTerm& t) { return sign(t.coeff) == 0; }),
              out.end());
    if (out.empty()) throw ParseError("function spec reduces to zero");
    return out;
  }

  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("spec '" + s_ + "' at position " + std::to_string(pos_) + ": " + msg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Text syntax: `c1*x^(p1/q1) + c2*x^(p2/q2) + ...` with rational
// coefficients `a/b`; canonical example `x^(3/2)`. Integer exponents may be
// written without parentheses (`x^2`); `x` alone means x^1.
inline FunctionSpec parse_function_spec(const std::string& text) {
  return FunctionSpec(detail::SpecParser(text).parse(), text);
}

// f/2: same family, coefficients halved. Used by the even-block seeker.
inline FunctionSpec halved_spec(const FunctionSpec& spec) {
  std::vector<PowerTerm> terms = spec.terms();
  for (auto& t : terms) t.coeff /= 2;
  return FunctionSpec(std::move(terms), "(" + spec.label() + ")/2");
}

}  // namespace regseq::funclib

namespace regseq {
using funclib::FunctionSpec;
using funclib::parse_function_spec;
using funclib::PowerTerm;
}  // namespace regseq

#endif  // REGSEQ_FUNCSPEC_HPP

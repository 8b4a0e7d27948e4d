#include "dunkl/polynomial_io.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace dunkl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::string_view line, const std::string& why) {
  throw std::invalid_argument("cannot parse polynomial term '" + std::string(line) + "': " + why);
}

// Base-10 integer with optional sign (cpp_int alone would treat "010" as octal).
boost::multiprecision::cpp_int decimal_integer(std::string s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.erase(0, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::runtime_error("not an integer");
  }
  s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
  boost::multiprecision::cpp_int v(s);
  return negative ? boost::multiprecision::cpp_int(-v) : v;
}

Rational parse_coefficient(std::string_view tok, std::string_view line) {
  if (tok.empty()) fail(line, "missing coefficient");
  std::string s(tok);
  if (s.front() == '+') s.erase(0, 1);
  try {
    if (s.find_first_of(".eE") != std::string::npos) {
      // Decimal: parse exactly as m * 10^k.
      bool negative = false;
      std::size_t pos = 0;
      if (s[pos] == '-') {
        negative = true;
        ++pos;
      }
      std::string mantissa;
      int scale = 0;
      bool seen_point = false;
      for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
        if (s[pos] == '.') {
          if (seen_point) fail(line, "bad decimal");
          seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
          mantissa.push_back(s[pos]);
          if (seen_point) --scale;
        } else {
          fail(line, "bad decimal");
        }
      }
      if (pos < s.size()) scale += std::stoi(s.substr(pos + 1));
      if (mantissa.empty()) fail(line, "bad decimal");
      // cpp_int reads a leading 0 as an octal prefix.
      mantissa.erase(0, std::min(mantissa.find_first_not_of('0'), mantissa.size() - 1));
      boost::multiprecision::cpp_int m(mantissa);
      boost::multiprecision::cpp_int ten_pow = 1;
      for (int i = 0; i < std::abs(scale); ++i) ten_pow *= 10;
      Rational r = scale >= 0 ? Rational(m * ten_pow) : Rational(m, ten_pow);
      return negative ? Rational(-r) : r;
    }
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(decimal_integer(s));
    const boost::multiprecision::cpp_int num = decimal_integer(s.substr(0, slash));
    const boost::multiprecision::cpp_int den = decimal_integer(s.substr(slash + 1));
    if (den == 0) fail(line, "zero denominator");
    return Rational(num, den);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "bad coefficient");
  }
}

void parse_term(std::string_view line, int dimension, RationalPolynomial& out) {
  std::string cleaned;
  for (char ch : line) cleaned.push_back(ch == '*' ? ' ' : ch);
  std::istringstream tokens(cleaned);
  std::string tok;
  Rational coeff(1);
  Exponent e(dimension, 0);
  bool first = true;
  while (tokens >> tok) {
    if (tok.front() == 'x' || (tok.size() > 1 && tok.front() == '-' && tok[1] == 'x')) {
      if (tok.front() == '-') {
        coeff = -coeff;
        tok.erase(0, 1);
      }
      const auto caret = tok.find('^');
      int index = 0, power = 1;
      try {
        index = std::stoi(tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
        if (caret != std::string::npos) power = std::stoi(tok.substr(caret + 1));
      } catch (const std::exception&) {
        fail(line, "bad variable token '" + tok + "'");
      }
      if (index < 1 || index > dimension) fail(line, "variable index out of range");
      if (power < 0) fail(line, "negative exponent");
      e[index - 1] += power;
    } else if (first) {
      coeff *= parse_coefficient(tok, line);
    } else {
      fail(line, "unexpected token '" + tok + "'");
    }
    first = false;
  }
  out.add_term(e, coeff);
}

// Splits "a x1 - b x2 + c" into signed terms; signs after '^', '*' or an
// exponent marker belong to the current token.
std::vector<std::string> split_terms(std::string_view line) {
  std::vector<std::string> terms;
  std::string current;
  char previous = '\0';
  auto flush = [&] {
    std::string_view t = trim(current);
    if (!t.empty()) {
      std::string term;
      if (t.front() == '+' || t.front() == '-') {
        if (t.front() == '-') term.push_back('-');
        t = trim(t.substr(1));
        if (t.empty()) fail(line, "dangling sign");
      }
      term += std::string(t);
      terms.push_back(std::move(term));
    }
    current.clear();
  };
  for (char ch : line) {
    const bool sign = ch == '+' || ch == '-';
    if (sign && previous != '\0' && previous != '^' && previous != '*' && previous != 'e' && previous != 'E') flush();
    current.push_back(ch);
    if (!std::isspace(static_cast<unsigned char>(ch))) previous = ch;
  }
  flush();
  return terms;
}

}  // namespace

RationalPolynomial parse_polynomial(std::string_view text, int dimension) {
  RationalPolynomial p(dimension);
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      for (const std::string& term : split_terms(line)) parse_term(term, dimension, p);
    }
    start = end + 1;
  }
  return p;
}

RationalPolynomial read_polynomial(std::istream& in, int dimension) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_polynomial(buffer.str(), dimension);
}

namespace {

template <class T, class F>
std::string format_terms(const BasicPolynomial<T>& p, F&& format_coeff) {
  std::string out;
  // Highest degree first, then descending lexicographic.
  std::vector<const std::pair<const Exponent, T>*> order;
  for (const auto& t : p.terms()) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    const int da = total_degree(a->first), db = total_degree(b->first);
    if (da != db) return da > db;
    return a->first > b->first;
  });
  for (const auto* t : order) {
    out += format_coeff(t->second);
    bool any = false;
    for (std::size_t i = 0; i < t->first.size(); ++i) {
      if (t->first[i] == 0) continue;
      out += any ? " " : " * ";
      any = true;
      out += "x" + std::to_string(i + 1);
      if (t->first[i] != 1) out += "^" + std::to_string(t->first[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string format_polynomial(const RationalPolynomial& p) {
  return format_terms(p, [](const Rational& c) { return c.str(); });
}

std::string format_polynomial(const Polynomial& p) {
  return format_terms(p, [](double c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return std::string(buf);
  });
}

}  // namespace dunkl

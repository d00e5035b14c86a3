#include "rxscale/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rxscale {

namespace {

[[noreturn]] void bad(std::string_view text, const char* why) {
  throw std::invalid_argument("bad rational literal '" + std::string(text) + "': " + why);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::string_view text) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) bad(text, "overflow");
  return out;
}

std::int64_t ipow10(int e, std::string_view text) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) v = checked_mul(v, 10, text);
  return v;
}

}  // namespace

std::string to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rat rat_from_string(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad(text, "empty");

  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
    if (s.empty()) bad(text, "sign only");
  }

  // p/q form
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (num.empty() || den.empty()) bad(text, "missing numerator or denominator");
    for (char c : num + den)
      if (!std::isdigit(static_cast<unsigned char>(c))) bad(text, "non-digit in fraction");
    std::int64_t p = 0, q = 0;
    try {
      p = std::stoll(num);
      q = std::stoll(den);
    } catch (const std::exception&) {
      bad(text, "overflow");
    }
    if (q == 0) bad(text, "zero denominator");
    return Rat(neg ? -p : p, q);
  }

  // decimal / scientific form: digits[.digits][(e|E)[+-]digits]
  std::int64_t mantissa = 0;
  int frac_digits = 0;
  int exponent = 0;
  std::size_t i = 0;
  bool any_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (mantissa > (std::numeric_limits<std::int64_t>::max() - 9) / 10) bad(text, "too many digits");
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else if (c == '.') {
      if (seen_dot) bad(text, "two dots");
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      bad(text, "unexpected character");
    }
  }
  if (!any_digit) bad(text, "no digits");
  if (i < s.size()) {  // exponent part
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      eneg = s[i] == '-';
      ++i;
    }
    if (i >= s.size()) bad(text, "empty exponent");
    int e = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad(text, "non-digit exponent");
      e = e * 10 + (s[i] - '0');
      if (e > 18) bad(text, "exponent out of range");
    }
    exponent = eneg ? -e : e;
  }

  int net = exponent - frac_digits;
  Rat value(neg ? -mantissa : mantissa, 1);
  if (net >= 0)
    value *= Rat(ipow10(net, text), 1);
  else
    value /= Rat(ipow10(-net, text), 1);
  return value;
}

Rat rat_pow(const Rat& base, long exp) {
  if (exp == 0) return Rat(1);
  if (exp < 0) {
    if (base.numerator() == 0) throw std::domain_error("rat_pow: 0 to negative power");
    return rat_pow(Rat(base.denominator(), base.numerator()), -exp);
  }
  Rat acc(1), b = base;
  long e = exp;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

namespace {

// Exact integer q-th root, or nullopt.
std::optional<std::int64_t> iroot(std::int64_t x, unsigned q) {
  if (x < 0) {
    if (q % 2 == 0) return std::nullopt;
    auto r = iroot(-x, q);
    if (!r) return std::nullopt;
    return -*r;
  }
  if (x <= 1 || q == 1) return x;
  auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(x), 1.0 / q)));
  for (std::int64_t c = std::max<std::int64_t>(0, guess - 2); c <= guess + 2; ++c) {
    __int128 p = 1;
    for (unsigned i = 0; i < q; ++i) {
      p *= c;
      if (p > static_cast<__int128>(std::numeric_limits<std::int64_t>::max())) {
        p = -1;
        break;
      }
    }
    if (p == static_cast<__int128>(x)) return c;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Rat> rat_root(const Rat& x, unsigned q) {
  if (q == 0) throw std::domain_error("rat_root: zeroth root");
  auto pn = iroot(x.numerator(), q);
  auto pd = iroot(x.denominator(), q);
  if (!pn || !pd) return std::nullopt;
  return Rat(*pn, *pd);
}

std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& exp) {
  if (exp.denominator() == 1) return rat_pow(base, static_cast<long>(exp.numerator()));
  auto root = rat_root(base, static_cast<unsigned>(exp.denominator()));
  if (!root) return std::nullopt;
  return rat_pow(*root, static_cast<long>(exp.numerator()));
}

double rat_pow_d(const Rat& base, const Rat& exp) {
  if (auto exact = rat_pow_exact(base, exp)) return to_double(*exact);
  return std::pow(to_double(base), to_double(exp));
}

std::string to_decimal_string(const Rat& r) {
  std::int64_t den = r.denominator();
  int twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) throw std::domain_error("to_decimal_string: non-terminating decimal " + to_string(r));

  // Scale numerator so the denominator becomes a power of ten.
  __int128 num = r.numerator();
  int digits = std::max(twos, fives);
  for (int i = 0; i < twos - fives; ++i) num *= 5;
  for (int i = 0; i < fives - twos; ++i) num *= 2;

  bool neg = num < 0;
  if (neg) num = -num;
  std::string raw;
  if (num == 0) raw = "0";
  while (num > 0) {
    raw.insert(raw.begin(), static_cast<char>('0' + static_cast<int>(num % 10)));
    num /= 10;
  }
  while (static_cast<int>(raw.size()) <= digits) raw.insert(raw.begin(), '0');

  std::string out = raw;
  if (digits > 0) {
    out = raw.substr(0, raw.size() - digits) + "." + raw.substr(raw.size() - digits);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

}  // namespace rxscale

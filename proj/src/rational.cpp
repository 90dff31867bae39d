#include "schelling/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>

namespace schelling {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
}

Rational make_reduced(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num;
    i128 b = den;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(narrow(num), narrow(den));
}

std::int64_t parse_uint(std::string_view s, std::string_view whole) {
    if (s.empty())
        throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    std::int64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
        if (v > (std::numeric_limits<std::int64_t>::max() - 9) / 10)
            throw std::invalid_argument("rational out of range: '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

Rational Rational::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty())
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::int64_t p = parse_uint(s.substr(0, slash), text);
        std::int64_t q = parse_uint(s.substr(slash + 1), text);
        if (q == 0)
            throw std::invalid_argument("rational with zero denominator: '" + std::string(text) + "'");
        return Rational(negative ? -p : p, q);
    }

    auto dot = s.find('.');
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    if (frac_part.size() > 15)
        throw std::invalid_argument("too many decimal digits: '" + std::string(text) + "'");
    std::int64_t ip = int_part.empty() ? 0 : parse_uint(int_part, text);
    std::int64_t fp = frac_part.empty() ? 0 : parse_uint(frac_part, text);
    if (dot != std::string_view::npos && frac_part.empty() && int_part.empty())
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i)
        den *= 10;
    i128 num = static_cast<i128>(ip) * den + fp;
    return make_reduced(negative ? -num : num, den);
}

std::string Rational::to_string() const {
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Rational::count_at_least(std::int64_t count, std::int64_t total) const {
    return static_cast<i128>(count) * den_ >= static_cast<i128>(num_) * total;
}

Rational operator+(const Rational& a, const Rational& b) {
    return make_reduced(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                        static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return make_reduced(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    i128 lhs = static_cast<i128>(a.num_) * b.den_;
    i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs)
        return std::strong_ordering::less;
    if (lhs > rhs)
        return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace schelling

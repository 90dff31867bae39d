// rational.hpp
// Exact p/q values for intolerances and thresholds. Threshold tests compare
// integer counts against rationals by cross-multiplication, never in floating
// point.
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace schelling {

class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den);

    // Accepts "0.44", "1", ".5", "3/8". Decimals become num / 10^digits
    // (reduced). Throws std::invalid_argument on malformed input.
    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "p/q" in lowest terms; integers print without a denominator.
    std::string to_string() const;

    // count >= this * total, exactly.
    bool count_at_least(std::int64_t count, std::int64_t total) const;
    // count < this * total, exactly.
    bool count_below(std::int64_t count, std::int64_t total) const { return !count_at_least(count, total); }

    Rational operator-() const { return {-num_, den_}; }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace schelling

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lamlab {

class overflow_error : public std::overflow_error {
  public:
    using std::overflow_error::overflow_error;
};

/// Exact rational with 64-bit numerator/denominator, always reduced, den > 0.
/// Intermediate products use 128-bit integers; results that do not fit throw.
class Rational {
  public:
    using int_t = std::int64_t;

    constexpr Rational() = default;
    constexpr Rational(int_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(int_t n, int_t d) { assign(n, d); }

    int_t num() const { return num_; }
    int_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }

    /// floor(x) as an integer
    int_t floor() const {
        int_t q = num_ / den_;
        if ((num_ % den_) != 0 && num_ < 0) --q;
        return q;
    }

    /// representative of x mod 1 in [0, 1)
    Rational frac() const { return Rational(num_ - floor() * den_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 g = std::gcd(a.den_, b.den_);
        __int128 n = (__int128)a.num_ * (b.den_ / g) + (__int128)b.num_ * (a.den_ / g);
        __int128 d = (__int128)(a.den_ / g) * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.num_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        return from128(n, d);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 l = (__int128)a.num_ * b.den_;
        __int128 r = (__int128)b.num_ * a.den_;
        return l <=> r;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// parses "p/q" or "p"
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw std::invalid_argument("not a rational: '" + s + "'");
        }
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  private:
    int_t num_ = 0;
    int_t den_ = 1;

    void assign(int_t n, int_t d) {
        if (d == 0) throw std::domain_error("zero denominator");
        *this = from128(n, d);
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from128(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim) throw overflow_error("rational overflow");
        Rational r;
        r.num_ = (int_t)n;
        r.den_ = (int_t)d;
        return r;
    }
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

/// x mod 1 in [0,1)
inline Rational mod1(const Rational& r) { return r.frac(); }

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    __int128 l = (__int128)(a / std::gcd(a, b)) * b;
    if (l < 0) l = -l;
    if (l > INT64_MAX) throw overflow_error("lcm overflow");
    return (std::int64_t)l;
}

}  // namespace lamlab

template <>
struct std::hash<lamlab::Rational> {
    size_t operator()(const lamlab::Rational& r) const noexcept {
        return std::hash<std::int64_t>()(r.num()) * 1000003u ^ std::hash<std::int64_t>()(r.den());
    }
};

#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace finlat {

// Exact rational arithmetic for observables and energy bookkeeping.
// Desk-scale lattices keep numerators far below the int64 range.
using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Value of the form a + b*sqrt(d), d a square-free non-negative integer.
// Closed under addition and multiplication by rationals, which is all the
// relativistic string observables need (everything lives in Q(sqrt(R*L))).
struct QuadraticReal {
    Rat a{0};
    Rat b{0};
    long long d{0}; // square-free; 0 iff b == 0

    QuadraticReal() = default;
    QuadraticReal(Rat rational_part) : a(rational_part) {}
    QuadraticReal(Rat rational_part, Rat radical_coeff, long long radicand)
        : a(rational_part), b(radical_coeff), d(radicand) {
        normalize();
    }

    // Pull square factors out of the radicand so equal values compare equal.
    void normalize() {
        if (d < 0) throw std::invalid_argument("QuadraticReal: negative radicand");
        if (b == 0 || d == 0) {
            b = 0;
            d = 0;
            return;
        }
        long long square = 1;
        long long rest = d;
        for (long long f = 2; f * f <= rest; ++f) {
            while (rest % (f * f) == 0) {
                rest /= f * f;
                square *= f;
            }
        }
        b *= square;
        d = rest;
        if (d == 1) {
            a += b;
            b = 0;
            d = 0;
        }
    }

    bool rational() const { return b == 0; }

    double value() const { return to_double(a) + to_double(b) * std::sqrt(static_cast<double>(d)); }

    // sign of a + b*sqrt(d), exactly.
    int sign() const {
        const int sa = a > 0 ? 1 : (a < 0 ? -1 : 0);
        if (b == 0) return sa;
        const int sb = b > 0 ? 1 : -1;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // Opposite signs: compare a^2 against b^2 * d.
        const Rat lhs = a * a;
        const Rat rhs = b * b * d;
        if (lhs == rhs) return 0;
        return (lhs > rhs) ? sa : sb;
    }

    friend QuadraticReal operator+(const QuadraticReal& x, const QuadraticReal& y) {
        if (x.b != 0 && y.b != 0 && x.d != y.d)
            throw std::invalid_argument("QuadraticReal: incompatible radicands");
        QuadraticReal r;
        r.a = x.a + y.a;
        r.b = x.b + y.b;
        r.d = x.b != 0 ? x.d : y.d;
        r.normalize();
        return r;
    }
    friend QuadraticReal operator-(const QuadraticReal& x, const QuadraticReal& y) {
        return x + QuadraticReal(-y.a, -y.b, y.d == 0 ? 1 : y.d);
    }
    friend QuadraticReal operator*(const Rat& s, const QuadraticReal& x) {
        return QuadraticReal(s * x.a, s * x.b, x.d == 0 ? 1 : x.d);
    }
    friend bool operator==(const QuadraticReal& x, const QuadraticReal& y) {
        return x.a == y.a && x.b == y.b && x.d == y.d;
    }
    friend bool operator!=(const QuadraticReal& x, const QuadraticReal& y) { return !(x == y); }

    friend std::ostream& operator<<(std::ostream& os, const QuadraticReal& x) {
        os << x.a;
        if (x.b != 0) os << " + " << x.b << "*sqrt(" << x.d << ")";
        return os;
    }
};

} // namespace finlat

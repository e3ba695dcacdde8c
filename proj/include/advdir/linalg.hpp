#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace advdir {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec scaled(const Vec& x, double c) {
    Vec r(x);
    for (double& v : r) v *= c;
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a);
    axpy(1.0, b, r);
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a);
    axpy(-1.0, b, r);
    return r;
}

// a + c*v without mutating a; the workhorse of every ray search.
inline Vec ray_point(const Vec& a, double c, const Vec& v) {
    Vec r(a);
    axpy(c, v, r);
    return r;
}

}  // namespace advdir

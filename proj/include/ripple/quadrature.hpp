#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ripple/error.hpp"

namespace ripple {

// Composite Simpson rule over uniformly spaced samples. An even sample count
// closes the last three intervals with Simpson's 3/8 rule; two samples fall
// back to the trapezoid.
inline double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) throw Error(ErrorCode::InsufficientPoints, "simpson needs at least two samples");
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);

    // Simpson-1/3 covers [0, m], m even; 3/8 covers whatever is left.
    std::size_t m = n - 1;
    double tail = 0.0;
    if (m % 2 == 1) {
        m -= 3;
        tail = 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]);
        if (m == 0) return tail;
    }
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < m; i += 2) odd += f[i];
    for (std::size_t i = 2; i < m; i += 2) even += f[i];
    return h / 3.0 * (f[0] + 4.0 * odd + 2.0 * even + f[m]) + tail;
}

template <class F>
double simpson(F&& f, double a, double b, std::size_t nodes) {
    if (nodes < 2) throw Error(ErrorCode::InsufficientPoints, "simpson needs at least two nodes");
    const double h = (b - a) / static_cast<double>(nodes - 1);
    double acc_odd = 0.0;
    double acc_even = 0.0;
    if (nodes % 2 == 1) {
        for (std::size_t i = 1; i + 1 < nodes; ++i) {
            const double v = f(a + h * static_cast<double>(i));
            (i % 2 == 1 ? acc_odd : acc_even) += v;
        }
        return h / 3.0 * (f(a) + 4.0 * acc_odd + 2.0 * acc_even + f(b));
    }
    std::vector<double> values(nodes);
    for (std::size_t i = 0; i < nodes; ++i) values[i] = f(i + 1 == nodes ? b : a + h * static_cast<double>(i));
    return simpson(std::span<const double>(values), h);
}

}  // namespace ripple

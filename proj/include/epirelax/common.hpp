#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epirelax {

/// Error with a stable machine-readable code ("NegativeHeight", ...) plus a
/// human message. Codes are part of the public contract and asserted in tests.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(const Point& p, const Point& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

using Polyline = std::vector<Point>;

/// Neumaier compensated summation. Long polyline/measure sums must stay at
/// ~1 ulp so the mass/area constraints can be asserted at 1e-12.
class KahanSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double polyline_length(const Polyline& pts) {
    KahanSum s;
    for (std::size_t i = 1; i < pts.size(); ++i) s.add(dist(pts[i - 1], pts[i]));
    return s.value();
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundingBox {
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    void absorb(const Point& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    void absorb(const BoundingBox& o) {
        xmin = std::min(xmin, o.xmin);
        xmax = std::max(xmax, o.xmax);
        ymin = std::min(ymin, o.ymin);
        ymax = std::max(ymax, o.ymax);
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diag() const { return std::hypot(width(), height()); }
};

}  // namespace epirelax

#include "uwe/color.hpp"

#include <algorithm>
#include <cmath>

namespace uwe {

namespace {

double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta3 = 216.0 / 24389.0; // (6/29)^3
    constexpr double factor = 841.0 / 108.0;   // 1/(3*(6/29)^2)
    return t > delta3 ? std::cbrt(t) : factor * t + 4.0 / 29.0;
}

} // namespace

Lab srgb_to_lab(double r, double g, double b) {
    const double rl = srgb_linearize(r);
    const double gl = srgb_linearize(g);
    const double bl = srgb_linearize(b);

    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;

    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.0);
    const double fz = lab_f(z / 1.08883);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double hsv_saturation(double r, double g, double b) {
    const double v = std::max({r, g, b});
    if (v <= 0.0) {
        return 0.0;
    }
    const double mn = std::min({r, g, b});
    return (v - mn) / v;
}

} // namespace uwe

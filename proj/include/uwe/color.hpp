#pragma once

namespace uwe {

struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// sRGB in [0,1] -> CIELab under D65. Uses the standard sRGB transfer
/// (linear below 0.04045, gamma 2.4 above) and the sRGB->XYZ matrix with
/// white point (0.95047, 1.0, 1.08883).
Lab srgb_to_lab(double r, double g, double b);

/// Rec.709 luminance: 0.2126 R + 0.7152 G + 0.0722 B.
inline float rec709_luminance(float r, float g, float b) {
    return 0.2126f * r + 0.7152f * g + 0.0722f * b;
}

/// HSV saturation: (max - min)/max, 0 for black pixels.
double hsv_saturation(double r, double g, double b);

} // namespace uwe

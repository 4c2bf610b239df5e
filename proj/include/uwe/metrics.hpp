#pragma once

#include "uwe/color.hpp"
#include "uwe/tensor.hpp"

namespace uwe {

/// Eq-20-style no-reference score: 0.4680*sigma_c + 0.2745*con_l + 0.2576*mu_s.
struct UciqeComponents {
    double sigma_c = 0.0; // population std of CIELab chroma / 100
    double con_l = 0.0;   // (mean top-1% L - mean bottom-1% L) / 100
    double mu_s = 0.0;    // mean HSV saturation
    double uciqe = 0.0;
};

double uciqe_from_components(double sigma_c, double con_l, double mu_s);

/// 10*log10(1/MSE) over all elements, capped at 99 dB (zero MSE reports the cap).
double psnr(const Tensor& ref, const Tensor& test);

/// Single-scale SSIM on Rec.709 luminance: 11x11 Gaussian window sigma=1.5,
/// K1=0.01, K2=0.03, L=1, averaged over valid window positions only.
/// Throws ShapeError when the image is smaller than the window.
double ssim(const Tensor& ref, const Tensor& test);

UciqeComponents uciqe(const Tensor& image);

/// UIQM = 0.0282*UICM + 0.2953*UISM + 3.5753*UIConM with the cited-standard
/// conventions: alpha-trimmed (0.1) RG/YB colorfulness, Sobel-weighted EME
/// sharpness and logAMEE contrast on 8x8 blocks (natural log, zero-guarded).
/// Throws ShapeError when the image is smaller than one block.
double uiqm(const Tensor& image);

struct UiqmComponents {
    double uicm = 0.0;
    double uism = 0.0;
    double uiconm = 0.0;
    double uiqm = 0.0;
};
UiqmComponents uiqm_components(const Tensor& image);

/// Full CIEDE2000 with kL=kC=kH=1, including the hue-rotation term.
double ciede2000(const Lab& lab1, const Lab& lab2);

/// Mean per-pixel CIEDE2000 after sRGB->Lab conversion of both images.
double ciede2000_image(const Tensor& ref, const Tensor& test);

} // namespace uwe

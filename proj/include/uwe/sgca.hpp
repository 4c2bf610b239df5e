#pragma once

#include <array>

#include "uwe/tensor.hpp"

namespace uwe {

/// 12 global image statistics in fixed order:
/// [mu_r, mu_g, mu_b, sigma_r, sigma_g, sigma_b,
///  vbright_r, vbright_g, vbright_b, vdark_r, vdark_g, vdark_b].
/// sigma is the population standard deviation; vbright/vdark are the means of
/// the top/bottom 5% of pixel values per channel.
struct StatVector {
    std::array<float, 12> values{};

    float mu(int c) const { return values[c]; }
    float sigma(int c) const { return values[3 + c]; }
    float bright(int c) const { return values[6 + c]; }
    float dark(int c) const { return values[9 + c]; }
};

/// Two-layer perceptron 12 -> hidden (ReLU) -> 3 plus the fixed scaling
/// hyperparameters of the adjustment heads.
struct SgcaParams {
    int hidden = 0;
    std::vector<float> w0; // [hidden][12]
    std::vector<float> b0; // [hidden]
    std::vector<float> w1; // [3][hidden]
    std::vector<float> b1; // [3]
    float lambda_t = 0.15f;
    float lambda_s = 0.5f;
};

SgcaParams make_zero_sgca(int hidden);

/// Global scalar correction. Bounds are structural: |delta_t|, |delta_tau| <=
/// lambda_t and s_gain in [1-lambda_s, 1+lambda_s] because both pass through tanh.
struct ColorAdjustment {
    float delta_t = 0.0f;
    float delta_tau = 0.0f;
    float s_gain = 1.0f;
};

/// Per-channel mean/std plus top-5% and bottom-5% means. The 5% bucket holds
/// k = max(1, floor(0.05*H*W)) values, selected with nth_element (value order
/// only, so the result is permutation invariant). Throws ShapeError when the
/// image has fewer than 20 pixels or is not 3-channel.
StatVector compute_stats(const Tensor& image);

/// raw = mlp(stats); delta_t = lambda_t*tanh(raw0), delta_tau = lambda_t*tanh(raw1),
/// s_gain = 1 + lambda_s*tanh(raw2).
ColorAdjustment predict_adjustment(const StatVector& stats, const SgcaParams& params);

/// Temperature/tint shift (R += dT, B -= dT, G -= dTau), then saturation about
/// the Rec.709 luminance of the shifted pixel: out = Y + s_gain*(X' - Y).
/// The unclamped form preserves luminance exactly when dT = dTau = 0.
Tensor apply_adjustment_unclamped(const Tensor& image, const ColorAdjustment& adj);
Tensor apply_adjustment(const Tensor& image, const ColorAdjustment& adj);

/// compute_stats -> predict_adjustment -> apply_adjustment.
Tensor sgca_forward(const Tensor& image, const SgcaParams& params);

std::int64_t sgca_param_count(int hidden);

} // namespace uwe

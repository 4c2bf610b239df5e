#pragma once

#include "uwe/tensor.hpp"

namespace uwe {

/// Scalar compensation weights pulling the red/blue channel means toward the
/// green mean. Values outside [0, 2] are legal but flagged at weight-load time.
struct AwccParams {
    float alpha_r = 1.0f;
    float alpha_b = 1.0f;
};

struct ChannelMeans {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

/// Arithmetic mean of each channel over all pixels (all batch items pooled).
/// Throws ShapeError unless the tensor has exactly 3 channels.
ChannelMeans channel_means(const Tensor& image);

/// red' = red + alpha_r*(mean_g - mean_r), blue' = blue + alpha_b*(mean_g - mean_b),
/// green passes through. The shift is one scalar per channel per image; no clamp.
Tensor compensate(const Tensor& image, const AwccParams& params);

/// Gray-world scaling: gain_c = mu_gray / (mean_c + 1e-6), applied per channel.
/// The unclamped form is the testable one: its channel means equal mu_gray.
Tensor gray_world_correct_unclamped(const Tensor& image);
Tensor gray_world_correct(const Tensor& image);

/// compensate -> gray-world -> clamp to [0,1].
Tensor awcc_forward(const Tensor& image, const AwccParams& params);

} // namespace uwe

#pragma once

#include <functional>

#include "uwe/tensor.hpp"

namespace uwe {

// Objective evaluators, no gradients. Used to score weight files against
// reference pairs and to regression-test ports of the training code.

using FeatureExtractor = std::function<Tensor(const Tensor&)>;

FeatureExtractor identity_extractor();

struct LossBreakdown {
    double charbonnier = 0.0;
    double psnr_loss = 0.0;
    double perceptual = 0.0;
    double color = 0.0;
    double total = 0.0; // charbonnier + 2*psnr_loss + 0.01*perceptual + color
};

/// mean sqrt(diff^2 + eps^2), eps = 1e-8.
double charbonnier(const Tensor& out, const Tensor& gt);

/// RMSE = sqrt(mean(diff^2) + 1e-8); loss = (50 - 20*log10(1/RMSE))/100.
double psnr_loss(const Tensor& out, const Tensor& gt);

/// Mean squared distance between extracted features. The extractor is
/// pluggable; the identity default makes this a plain MSE.
double perceptual(const Tensor& out, const Tensor& gt, const FeatureExtractor& extractor);

/// Mean per-pixel angle (radians) between RGB vectors:
/// arccos(clamp(dot/max(|a||b|, 1e-8), -1, 1)). The epsilon floors the
/// denominator, so zero-vector pixels land at pi/2 while identical pixels
/// report zero angle.
double color_loss(const Tensor& out, const Tensor& gt);

LossBreakdown total_loss(const Tensor& out, const Tensor& gt, const FeatureExtractor& extractor);

} // namespace uwe

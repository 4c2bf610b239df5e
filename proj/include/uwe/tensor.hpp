#pragma once

#include <cstdint>
#include <vector>

#include "uwe/errors.hpp"

namespace uwe {

/// Dense NCHW float32 tensor. All pixel and feature data in the library is
/// carried in this layout; stride-1 row-major, no views, no aliasing.
struct Tensor {
    int batch = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int n, int c, int h, int w, float fill = 0.0f);

    std::int64_t size() const {
        return static_cast<std::int64_t>(batch) * channels * height * width;
    }
    std::int64_t plane_size() const {
        return static_cast<std::int64_t>(height) * width;
    }

    float& at(int n, int c, int y, int x) {
        return data[((static_cast<std::int64_t>(n) * channels + c) * height + y) * width + x];
    }
    float at(int n, int c, int y, int x) const {
        return data[((static_cast<std::int64_t>(n) * channels + c) * height + y) * width + x];
    }

    float* plane(int n, int c) {
        return data.data() + (static_cast<std::int64_t>(n) * channels + c) * plane_size();
    }
    const float* plane(int n, int c) const {
        return data.data() + (static_cast<std::int64_t>(n) * channels + c) * plane_size();
    }

    bool same_shape(const Tensor& other) const {
        return batch == other.batch && channels == other.channels &&
               height == other.height && width == other.width;
    }
};

/// Stride-1 cross-correlation parameters. `bias` may be empty (treated as zero),
/// which is how the bias-free branch convolutions are represented.
struct Conv2dParams {
    int out_channels = 0;
    int in_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    std::vector<float> weight; // [out][in][kh][kw], row-major
    std::vector<float> bias;   // [out] or empty
    int dilation_h = 1;
    int dilation_w = 1;
    int pad_h = 0;
    int pad_w = 0;

    std::int64_t weight_count() const {
        return static_cast<std::int64_t>(out_channels) * in_channels * kernel_h * kernel_w;
    }
    float& w(int oc, int ic, int ky, int kx) {
        return weight[((static_cast<std::int64_t>(oc) * in_channels + ic) * kernel_h + ky) * kernel_w + kx];
    }
    float w(int oc, int ic, int ky, int kx) const {
        return weight[((static_cast<std::int64_t>(oc) * in_channels + ic) * kernel_h + ky) * kernel_w + kx];
    }
};

/// Inference-mode batch normalization statistics for one channel axis.
struct BatchNormParams {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> running_mean;
    std::vector<float> running_var;
    float epsilon = 1e-5f;

    int channels() const { return static_cast<int>(gamma.size()); }
};

/// Cross-correlation (no kernel flip), stride 1, zero padding.
/// Output spatial size: H + 2*pad_h - dilation_h*(kernel_h-1), same in width.
/// Throws ConfigError on channel mismatch, ShapeError on non-positive output.
Tensor conv2d(const Tensor& input, const Conv2dParams& params);

/// Per-channel affine normalization: gamma*(x - mean)/sqrt(var + eps) + beta,
/// evaluated as a precomputed scale/shift per channel.
Tensor batchnorm_infer(const Tensor& input, const BatchNormParams& params);

Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);
Tensor clamp01(const Tensor& a);

} // namespace uwe

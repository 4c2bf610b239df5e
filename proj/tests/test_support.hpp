#pragma once

// Shared helpers for the test binaries. The oracle implementations here are
// deliberately written as direct, unoptimized loops so they stay independent
// of the library's computation order.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "uwe/mrdconv.hpp"
#include "uwe/tensor.hpp"

namespace testsup {

inline uwe::Tensor random_tensor(std::mt19937& rng, int n, int c, int h, int w, float lo = 0.0f,
                                 float hi = 1.0f) {
    std::uniform_real_distribution<float> dist(lo, hi);
    uwe::Tensor t(n, c, h, w);
    for (float& v : t.data) {
        v = dist(rng);
    }
    return t;
}

inline float max_abs_diff(const uwe::Tensor& a, const uwe::Tensor& b) {
    if (!a.same_shape(b)) {
        return std::numeric_limits<float>::infinity();
    }
    float worst = 0.0f;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        worst = std::max(worst, std::fabs(a.data[i] - b.data[i]));
    }
    return worst;
}

// Sliding-window convolution oracle: one output element at a time, explicit
// bounds checks standing in for zero padding.
inline uwe::Tensor naive_conv2d(const uwe::Tensor& input, const uwe::Conv2dParams& p) {
    const int h_out = input.height + 2 * p.pad_h - p.dilation_h * (p.kernel_h - 1);
    const int w_out = input.width + 2 * p.pad_w - p.dilation_w * (p.kernel_w - 1);
    uwe::Tensor out(input.batch, p.out_channels, h_out, w_out);
    for (int n = 0; n < input.batch; ++n) {
        for (int oc = 0; oc < p.out_channels; ++oc) {
            for (int y = 0; y < h_out; ++y) {
                for (int x = 0; x < w_out; ++x) {
                    float acc = p.bias.empty() ? 0.0f : p.bias[oc];
                    for (int ic = 0; ic < p.in_channels; ++ic) {
                        for (int ky = 0; ky < p.kernel_h; ++ky) {
                            for (int kx = 0; kx < p.kernel_w; ++kx) {
                                const int iy = y + ky * p.dilation_h - p.pad_h;
                                const int ix = x + kx * p.dilation_w - p.pad_w;
                                if (iy >= 0 && iy < input.height && ix >= 0 && ix < input.width) {
                                    acc += p.w(oc, ic, ky, kx) * input.at(n, ic, iy, ix);
                                }
                            }
                        }
                    }
                    out.at(n, oc, y, x) = acc;
                }
            }
        }
    }
    return out;
}

// Per-element batch norm oracle straight from the defining formula.
inline uwe::Tensor naive_batchnorm(const uwe::Tensor& input, const uwe::BatchNormParams& p) {
    uwe::Tensor out = input;
    for (int n = 0; n < input.batch; ++n) {
        for (int c = 0; c < input.channels; ++c) {
            for (int y = 0; y < input.height; ++y) {
                for (int x = 0; x < input.width; ++x) {
                    const float v = input.at(n, c, y, x);
                    out.at(n, c, y, x) =
                        p.gamma[c] * (v - p.running_mean[c]) / std::sqrt(p.running_var[c] + p.epsilon) +
                        p.beta[c];
                }
            }
        }
    }
    return out;
}

inline void randomize_conv(std::mt19937& rng, uwe::Conv2dParams& conv, float lo = -1.0f,
                           float hi = 1.0f) {
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& v : conv.weight) {
        v = dist(rng);
    }
    for (float& v : conv.bias) {
        v = dist(rng);
    }
}

inline void randomize_bn(std::mt19937& rng, uwe::BatchNormParams& bn) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::uniform_real_distribution<float> var_dist(0.1f, 2.0f);
    for (std::size_t i = 0; i < bn.gamma.size(); ++i) {
        bn.gamma[i] = dist(rng);
        bn.beta[i] = dist(rng);
        bn.running_mean[i] = dist(rng);
        bn.running_var[i] = var_dist(rng);
    }
}

inline uwe::MrdConvTrainWeights random_train_weights(std::mt19937& rng, int in_channels,
                                                     int out_channels, int rep_scale) {
    uwe::MrdConvTrainWeights w = uwe::make_zero_train_weights(in_channels, out_channels, rep_scale);
    for (uwe::BranchKind kind : uwe::kBranchKinds) {
        randomize_conv(rng, w.branch(kind).conv);
        randomize_bn(rng, w.branch(kind).bn);
    }
    randomize_conv(rng, w.fusion);
    return w;
}

} // namespace testsup

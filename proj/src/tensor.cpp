#include "uwe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uwe {

Tensor::Tensor(int n, int c, int h, int w, float fill) : batch(n), channels(c), height(h), width(w) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
        throw ShapeError("tensor dimensions must all be >= 1, got " + std::to_string(n) + "x" +
                         std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w));
    }
    data.assign(static_cast<std::size_t>(size()), fill);
}

static void check_conv_params(const Conv2dParams& p) {
    if (p.kernel_h < 1 || p.kernel_w < 1) {
        throw ShapeError("conv2d: kernel dimensions must be >= 1");
    }
    if (p.dilation_h < 1 || p.dilation_w < 1) {
        throw ShapeError("conv2d: dilation components must be >= 1");
    }
    if (p.pad_h < 0 || p.pad_w < 0) {
        throw ShapeError("conv2d: padding components must be >= 0");
    }
    if (static_cast<std::int64_t>(p.weight.size()) != p.weight_count()) {
        throw ConfigError("conv2d: weight array size does not match declared geometry");
    }
    if (!p.bias.empty() && static_cast<int>(p.bias.size()) != p.out_channels) {
        throw ConfigError("conv2d: bias array size does not match out_channels");
    }
}

Tensor conv2d(const Tensor& input, const Conv2dParams& params) {
    check_conv_params(params);
    if (input.channels != params.in_channels) {
        throw ConfigError("conv2d: input has " + std::to_string(input.channels) +
                          " channels, kernel expects " + std::to_string(params.in_channels));
    }

    const int h_out = input.height + 2 * params.pad_h - params.dilation_h * (params.kernel_h - 1);
    const int w_out = input.width + 2 * params.pad_w - params.dilation_w * (params.kernel_w - 1);
    if (h_out < 1 || w_out < 1) {
        throw ShapeError("conv2d: non-positive output size " + std::to_string(h_out) + "x" +
                         std::to_string(w_out));
    }

    Tensor out(input.batch, params.out_channels, h_out, w_out);

    // Tap-scatter order: for each kernel tap, stream the valid span of the
    // input plane into the output plane. Zero padding never materializes; the
    // y/x ranges below exclude out-of-bounds reads instead. 32-bit accumulation.
    for (int n = 0; n < input.batch; ++n) {
        for (int oc = 0; oc < params.out_channels; ++oc) {
            float* out_plane = out.plane(n, oc);
            const float b = params.bias.empty() ? 0.0f : params.bias[oc];
            std::fill(out_plane, out_plane + out.plane_size(), b);

            for (int ic = 0; ic < params.in_channels; ++ic) {
                const float* in_plane = input.plane(n, ic);
                for (int ky = 0; ky < params.kernel_h; ++ky) {
                    const int dy = ky * params.dilation_h - params.pad_h;
                    const int y_begin = std::max(0, -dy);
                    const int y_end = std::min(h_out, input.height - dy);
                    for (int kx = 0; kx < params.kernel_w; ++kx) {
                        const float wv = params.w(oc, ic, ky, kx);
                        const int dx = kx * params.dilation_w - params.pad_w;
                        const int x_begin = std::max(0, -dx);
                        const int x_end = std::min(w_out, input.width - dx);
                        for (int y = y_begin; y < y_end; ++y) {
                            float* orow = out_plane + static_cast<std::int64_t>(y) * w_out;
                            const float* irow =
                                in_plane + static_cast<std::int64_t>(y + dy) * input.width + dx;
                            for (int x = x_begin; x < x_end; ++x) {
                                orow[x] += wv * irow[x];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor batchnorm_infer(const Tensor& input, const BatchNormParams& params) {
    const int c = params.channels();
    if (input.channels != c) {
        throw ConfigError("batchnorm_infer: input has " + std::to_string(input.channels) +
                          " channels, params have " + std::to_string(c));
    }
    if (static_cast<int>(params.beta.size()) != c || static_cast<int>(params.running_mean.size()) != c ||
        static_cast<int>(params.running_var.size()) != c) {
        throw ConfigError("batchnorm_infer: parameter arrays disagree on channel count");
    }

    Tensor out(input.batch, input.channels, input.height, input.width);
    for (int n = 0; n < input.batch; ++n) {
        for (int ch = 0; ch < c; ++ch) {
            const float s = params.gamma[ch] / std::sqrt(params.running_var[ch] + params.epsilon);
            const float shift = params.beta[ch] - params.running_mean[ch] * s;
            const float* in_plane = input.plane(n, ch);
            float* out_plane = out.plane(n, ch);
            const std::int64_t count = input.plane_size();
            for (std::int64_t i = 0; i < count; ++i) {
                out_plane[i] = in_plane[i] * s + shift;
            }
        }
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("add: tensor shapes differ");
    }
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += b.data[i];
    }
    return out;
}

Tensor scale(const Tensor& a, float s) {
    Tensor out = a;
    for (float& v : out.data) {
        v *= s;
    }
    return out;
}

Tensor clamp01(const Tensor& a) {
    Tensor out = a;
    for (float& v : out.data) {
        v = std::min(1.0f, std::max(0.0f, v));
    }
    return out;
}

} // namespace uwe

#include "uwe/mrdconv.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace uwe {

const char* branch_name(BranchKind kind) {
    switch (kind) {
    case BranchKind::S3: return "s3";
    case BranchKind::S2: return "s2";
    case BranchKind::S1: return "s1";
    case BranchKind::V: return "v";
    case BranchKind::H: return "h";
    }
    throw ConfigError("branch_name: unknown branch kind");
}

BranchGeometry branch_geometry(BranchKind kind) {
    switch (kind) {
    case BranchKind::S3: return {3, 3, 2, 2, 2, 2};
    case BranchKind::S2: return {2, 2, 2, 2, 1, 1};
    case BranchKind::S1: return {1, 1, 1, 1, 0, 0};
    case BranchKind::V: return {3, 2, 2, 2, 2, 1};
    case BranchKind::H: return {2, 3, 2, 2, 1, 2};
    }
    throw ConfigError("branch_geometry: unknown branch kind");
}

MrdConvTrainWeights make_zero_train_weights(int in_channels, int out_channels, int rep_scale) {
    if (in_channels < 1 || out_channels < 1 || rep_scale < 1) {
        throw ConfigError("make_zero_train_weights: channels and rep_scale must be >= 1");
    }
    MrdConvTrainWeights w;
    w.in_channels = in_channels;
    w.out_channels = out_channels;
    w.mid_channels = out_channels * rep_scale;

    for (BranchKind kind : kBranchKinds) {
        const BranchGeometry g = branch_geometry(kind);
        MrdConvBranch& br = w.branch(kind);
        br.conv.out_channels = w.mid_channels;
        br.conv.in_channels = in_channels;
        br.conv.kernel_h = g.kernel_h;
        br.conv.kernel_w = g.kernel_w;
        br.conv.dilation_h = g.dilation_h;
        br.conv.dilation_w = g.dilation_w;
        br.conv.pad_h = g.pad_h;
        br.conv.pad_w = g.pad_w;
        br.conv.weight.assign(static_cast<std::size_t>(br.conv.weight_count()), 0.0f);
        br.bn.gamma.assign(w.mid_channels, 0.0f);
        br.bn.beta.assign(w.mid_channels, 0.0f);
        br.bn.running_mean.assign(w.mid_channels, 0.0f);
        br.bn.running_var.assign(w.mid_channels, 1.0f);
    }

    w.fusion.out_channels = out_channels;
    w.fusion.in_channels = w.mid_channels;
    w.fusion.kernel_h = 1;
    w.fusion.kernel_w = 1;
    w.fusion.weight.assign(static_cast<std::size_t>(w.fusion.weight_count()), 0.0f);
    w.fusion.bias.assign(out_channels, 0.0f);
    return w;
}

Tensor forward_train(const Tensor& x, const MrdConvTrainWeights& w) {
    if (x.channels != w.in_channels) {
        throw ConfigError("forward_train: input has " + std::to_string(x.channels) +
                          " channels, layer expects " + std::to_string(w.in_channels));
    }

    Tensor sum;
    bool first = true;
    for (BranchKind kind : kBranchKinds) {
        const MrdConvBranch& br = w.branch(kind);
        Tensor bout = batchnorm_infer(conv2d(x, br.conv), br.bn);
        if (bout.height != x.height || bout.width != x.width) {
            throw ConfigError(std::string("forward_train: branch ") + branch_name(kind) +
                              " does not preserve the spatial size");
        }
        if (first) {
            sum = std::move(bout);
            first = false;
        } else {
            sum = add(sum, bout);
        }
    }
    return conv2d(sum, w.fusion);
}

Conv2dParams fuse_conv_bn(const Conv2dParams& conv, const BatchNormParams& bn) {
    if (conv.out_channels != bn.channels()) {
        throw ConfigError("fuse_conv_bn: conv out_channels != bn channels");
    }
    Conv2dParams fused = conv;
    fused.bias.assign(conv.out_channels, 0.0f);
    const int per_out = conv.in_channels * conv.kernel_h * conv.kernel_w;
    for (int oc = 0; oc < conv.out_channels; ++oc) {
        const float s = bn.gamma[oc] / std::sqrt(bn.running_var[oc] + bn.epsilon);
        for (int i = 0; i < per_out; ++i) {
            fused.weight[static_cast<std::size_t>(oc) * per_out + i] *= s;
        }
        const float b0 = conv.bias.empty() ? 0.0f : conv.bias[oc];
        fused.bias[oc] = bn.beta[oc] + (b0 - bn.running_mean[oc]) * s;
    }
    return fused;
}

Conv2dParams embed_to_5x5(const Conv2dParams& fused, BranchKind kind) {
    const BranchGeometry g = branch_geometry(kind);
    if (fused.kernel_h != g.kernel_h || fused.kernel_w != g.kernel_w ||
        fused.dilation_h != g.dilation_h || fused.dilation_w != g.dilation_w ||
        fused.pad_h != g.pad_h || fused.pad_w != g.pad_w) {
        throw ConfigError(std::string("embed_to_5x5: conv geometry does not match branch ") +
                          branch_name(kind));
    }

    Conv2dParams out;
    out.out_channels = fused.out_channels;
    out.in_channels = fused.in_channels;
    out.kernel_h = 5;
    out.kernel_w = 5;
    out.dilation_h = 1;
    out.dilation_w = 1;
    out.pad_h = 2;
    out.pad_w = 2;
    out.weight.assign(static_cast<std::size_t>(out.weight_count()), 0.0f);
    out.bias = fused.bias;

    // A branch tap (ky,kx) reads input offset (d*ky - p); under the dense
    // 5x5/pad-2 grid the same offset is (u-2, v-2), so u = d*ky + 2 - p.
    for (int oc = 0; oc < fused.out_channels; ++oc) {
        for (int ic = 0; ic < fused.in_channels; ++ic) {
            for (int ky = 0; ky < g.kernel_h; ++ky) {
                const int u = g.dilation_h * ky + 2 - g.pad_h;
                for (int kx = 0; kx < g.kernel_w; ++kx) {
                    const int v = g.dilation_w * kx + 2 - g.pad_w;
                    if (u < 0 || u > 4 || v < 0 || v > 4) {
                        throw ConfigError(std::string("embed_to_5x5: branch ") + branch_name(kind) +
                                          " tap falls outside the 5x5 grid");
                    }
                    out.w(oc, ic, u, v) = fused.w(oc, ic, ky, kx);
                }
            }
        }
    }
    return out;
}

MrdConvInferWeights reparameterize(const MrdConvTrainWeights& w) {
    // Sum of embedded kernels over branches, still mid x in x 5 x 5.
    Conv2dParams k_sum;
    std::vector<float> b_sum(w.mid_channels, 0.0f);
    bool first = true;
    for (BranchKind kind : kBranchKinds) {
        const Conv2dParams embedded = embed_to_5x5(fuse_conv_bn(w.branch(kind).conv, w.branch(kind).bn), kind);
        if (first) {
            k_sum = embedded;
            first = false;
        } else {
            for (std::size_t i = 0; i < k_sum.weight.size(); ++i) {
                k_sum.weight[i] += embedded.weight[i];
            }
        }
        for (int m = 0; m < w.mid_channels; ++m) {
            b_sum[m] += embedded.bias[m];
        }
    }

    // Absorb the 1x1 fusion by mixing the mid-channel axis.
    MrdConvInferWeights out;
    out.conv.out_channels = w.out_channels;
    out.conv.in_channels = w.in_channels;
    out.conv.kernel_h = 5;
    out.conv.kernel_w = 5;
    out.conv.dilation_h = 1;
    out.conv.dilation_w = 1;
    out.conv.pad_h = 2;
    out.conv.pad_w = 2;
    out.conv.weight.assign(static_cast<std::size_t>(out.conv.weight_count()), 0.0f);
    out.conv.bias.assign(w.out_channels, 0.0f);

    for (int o = 0; o < w.out_channels; ++o) {
        float bias = w.fusion.bias.empty() ? 0.0f : w.fusion.bias[o];
        for (int m = 0; m < w.mid_channels; ++m) {
            const float wf = w.fusion.w(o, m, 0, 0);
            bias += wf * b_sum[m];
            for (int ic = 0; ic < w.in_channels; ++ic) {
                for (int t = 0; t < 25; ++t) {
                    out.conv.weight[((static_cast<std::int64_t>(o) * w.in_channels + ic) * 25) + t] +=
                        wf * k_sum.weight[((static_cast<std::int64_t>(m) * w.in_channels + ic) * 25) + t];
                }
            }
        }
        out.conv.bias[o] = bias;
    }
    return out;
}

Tensor forward_infer(const Tensor& x, const MrdConvInferWeights& w) {
    if (w.conv.kernel_h != 5 || w.conv.kernel_w != 5 || w.conv.pad_h != 2 || w.conv.pad_w != 2 ||
        w.conv.dilation_h != 1 || w.conv.dilation_w != 1) {
        throw ConfigError("forward_infer: weights are not a dense 5x5/pad-2 convolution");
    }
    return conv2d(x, w.conv);
}

std::int64_t train_layer_param_count(int in_channels, int out_channels, int rep_scale) {
    const std::int64_t mid = static_cast<std::int64_t>(out_channels) * rep_scale;
    std::int64_t taps = 0;
    for (BranchKind kind : kBranchKinds) {
        const BranchGeometry g = branch_geometry(kind);
        taps += g.kernel_h * g.kernel_w; // 9 + 4 + 1 + 6 + 6 = 26
    }
    return mid * in_channels * taps + 5 * 4 * mid + mid * out_channels + out_channels;
}

std::int64_t infer_layer_param_count(int in_channels, int out_channels) {
    return static_cast<std::int64_t>(out_channels) * (25 * in_channels + 1);
}

} // namespace uwe

#pragma once

#include <array>

#include "uwe/tensor.hpp"

namespace uwe {

// Multi-branch re-parameterized dilated convolution.
//
// Training form: five parallel dilated conv+BN branches (in_channels ->
// mid_channels each), summed elementwise and projected to out_channels by a
// 1x1 fusion conv with bias. Every branch preserves the spatial size at
// stride 1, so the whole stack can be collapsed exactly into one dense 5x5
// convolution (padding 2) for inference:
//   1. fold each branch's BN into its conv weights,
//   2. scatter each folded kernel into a zero 5x5 grid at the offsets its
//      dilation/padding implies,
//   3. absorb the 1x1 fusion by mixing the mid-channel axis.

enum class BranchKind { S3, S2, S1, V, H };

inline constexpr std::array<BranchKind, 5> kBranchKinds = {
    BranchKind::S3, BranchKind::S2, BranchKind::S1, BranchKind::V, BranchKind::H};

const char* branch_name(BranchKind kind);

struct BranchGeometry {
    int kernel_h;
    int kernel_w;
    int dilation_h;
    int dilation_w;
    int pad_h;
    int pad_w;
};

/// Fixed geometry of the five branches:
///   S3: 3x3 d=2 p=2,  S2: 2x2 d=2 p=1,  S1: 1x1 d=1 p=0,
///   V: 3x2 d=2 p=(2,1),  H: 2x3 d=2 p=(1,2).
BranchGeometry branch_geometry(BranchKind kind);

struct MrdConvBranch {
    Conv2dParams conv; // bias-free
    BatchNormParams bn;
};

struct MrdConvTrainWeights {
    int in_channels = 0;
    int mid_channels = 0; // out_channels * rep_scale
    int out_channels = 0;
    std::array<MrdConvBranch, 5> branches; // indexed in kBranchKinds order
    Conv2dParams fusion;                   // 1x1, mid -> out, with bias

    MrdConvBranch& branch(BranchKind kind) { return branches[static_cast<int>(kind)]; }
    const MrdConvBranch& branch(BranchKind kind) const { return branches[static_cast<int>(kind)]; }
};

struct MrdConvInferWeights {
    Conv2dParams conv; // dense 5x5, dilation 1, padding 2, with bias
};

/// Zero-initialized training weights (BN var = 1 so the zero layer is well posed).
MrdConvTrainWeights make_zero_train_weights(int in_channels, int out_channels, int rep_scale);

/// Y = fusion( sum_i BN_i(Conv_i(x)) ). Throws ConfigError on channel mismatch
/// and if a branch fails to preserve the spatial size.
Tensor forward_train(const Tensor& x, const MrdConvTrainWeights& w);

/// Fold BN into the conv: W' = W * gamma/sqrt(var+eps) per output channel,
/// b' = beta - mean*gamma/sqrt(var+eps) (+ scaled original bias when present).
Conv2dParams fuse_conv_bn(const Conv2dParams& conv, const BatchNormParams& bn);

/// Scatter a fused branch kernel into a dense 5x5 grid (dilation 1, padding 2).
/// Tap (i,j) of the branch lands at (d_h*i + 2 - p_h, d_w*j + 2 - p_w).
/// The fused bias is carried through unchanged. Throws ConfigError when the
/// conv's geometry does not match `kind`.
Conv2dParams embed_to_5x5(const Conv2dParams& fused, BranchKind kind);

/// Full collapse: fuse+embed all branches, sum kernels and biases, then absorb
/// the 1x1 fusion: W_final[o,i] = sum_m Wf[o,m]*K_sum[m,i], b_final = Wf*b_sum + bf.
MrdConvInferWeights reparameterize(const MrdConvTrainWeights& w);

/// Single dense 5x5 convolution, padding 2, stride 1.
Tensor forward_infer(const Tensor& x, const MrdConvInferWeights& w);

/// Stored float count of each form (train counts BN statistics as stored tensors).
std::int64_t train_layer_param_count(int in_channels, int out_channels, int rep_scale);
std::int64_t infer_layer_param_count(int in_channels, int out_channels);

} // namespace uwe

#include "uwe/losses.hpp"

#include <algorithm>
#include <cmath>

namespace uwe {

namespace {

constexpr float kEps = 1e-8f;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": tensor shapes differ");
    }
}

} // namespace

FeatureExtractor identity_extractor() {
    return [](const Tensor& t) { return t; };
}

double charbonnier(const Tensor& out, const Tensor& gt) {
    require_same_shape(out, gt, "charbonnier");
    double acc = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const float d = out.data[i] - gt.data[i];
        acc += std::sqrt(static_cast<double>(d) * d + static_cast<double>(kEps) * kEps);
    }
    return acc / static_cast<double>(out.data.size());
}

double psnr_loss(const Tensor& out, const Tensor& gt) {
    require_same_shape(out, gt, "psnr_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const float d = out.data[i] - gt.data[i];
        acc += static_cast<double>(d) * d;
    }
    const double rmse = std::sqrt(acc / static_cast<double>(out.data.size()) + kEps);
    return (50.0 - 20.0 * std::log10(1.0 / rmse)) / 100.0;
}

double perceptual(const Tensor& out, const Tensor& gt, const FeatureExtractor& extractor) {
    require_same_shape(out, gt, "perceptual");
    const Tensor f1 = extractor(out);
    const Tensor f2 = extractor(gt);
    if (!f1.same_shape(f2)) {
        throw ShapeError("perceptual: extractor produced mismatched feature shapes");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < f1.data.size(); ++i) {
        const double d = static_cast<double>(f1.data[i]) - f2.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(f1.data.size());
}

double color_loss(const Tensor& out, const Tensor& gt) {
    require_same_shape(out, gt, "color_loss");
    if (out.channels != 3) {
        throw ShapeError("color_loss: expected 3-channel images");
    }
    double acc = 0.0;
    for (int n = 0; n < out.batch; ++n) {
        const float* r1 = out.plane(n, 0);
        const float* g1 = out.plane(n, 1);
        const float* b1 = out.plane(n, 2);
        const float* r2 = gt.plane(n, 0);
        const float* g2 = gt.plane(n, 1);
        const float* b2 = gt.plane(n, 2);
        for (std::int64_t i = 0; i < out.plane_size(); ++i) {
            const double dot = static_cast<double>(r1[i]) * r2[i] +
                               static_cast<double>(g1[i]) * g2[i] +
                               static_cast<double>(b1[i]) * b2[i];
            const double n1 = std::sqrt(static_cast<double>(r1[i]) * r1[i] +
                                        static_cast<double>(g1[i]) * g1[i] +
                                        static_cast<double>(b1[i]) * b1[i]);
            const double n2 = std::sqrt(static_cast<double>(r2[i]) * r2[i] +
                                        static_cast<double>(g2[i]) * g2[i] +
                                        static_cast<double>(b2[i]) * b2[i]);
            // The epsilon only floors the denominator; zero-vector pixels give
            // ratio 0 -> pi/2, while identical pixels stay at ratio 1 -> 0.
            const double ratio =
                std::clamp(dot / std::max(n1 * n2, static_cast<double>(kEps)), -1.0, 1.0);
            acc += std::acos(ratio);
        }
    }
    return acc / (static_cast<double>(out.batch) * out.plane_size());
}

LossBreakdown total_loss(const Tensor& out, const Tensor& gt, const FeatureExtractor& extractor) {
    LossBreakdown b;
    b.charbonnier = charbonnier(out, gt);
    b.psnr_loss = psnr_loss(out, gt);
    b.perceptual = perceptual(out, gt, extractor);
    b.color = color_loss(out, gt);
    b.total = b.charbonnier + 2.0 * b.psnr_loss + 0.01 * b.perceptual + b.color;
    return b;
}

} // namespace uwe

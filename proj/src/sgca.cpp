#include "uwe/sgca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uwe/color.hpp"

namespace uwe {

namespace {

void require_rgb(const Tensor& image, const char* op) {
    if (image.channels != 3) {
        throw ShapeError(std::string(op) + ": expected a 3-channel image, got " +
                         std::to_string(image.channels) + " channels");
    }
}

void check_params(const SgcaParams& p) {
    if (p.hidden < 1) {
        throw ConfigError("sgca: hidden width must be >= 1");
    }
    if (static_cast<int>(p.w0.size()) != p.hidden * 12 || static_cast<int>(p.b0.size()) != p.hidden ||
        static_cast<int>(p.w1.size()) != 3 * p.hidden || static_cast<int>(p.b1.size()) != 3) {
        throw ConfigError("sgca: mlp array sizes do not match the hidden width");
    }
}

} // namespace

SgcaParams make_zero_sgca(int hidden) {
    if (hidden < 1) {
        throw ConfigError("make_zero_sgca: hidden width must be >= 1");
    }
    SgcaParams p;
    p.hidden = hidden;
    p.w0.assign(static_cast<std::size_t>(hidden) * 12, 0.0f);
    p.b0.assign(hidden, 0.0f);
    p.w1.assign(static_cast<std::size_t>(3) * hidden, 0.0f);
    p.b1.assign(3, 0.0f);
    return p;
}

StatVector compute_stats(const Tensor& image) {
    require_rgb(image, "compute_stats");
    const std::int64_t n = static_cast<std::int64_t>(image.batch) * image.plane_size();
    if (n < 20) {
        throw ShapeError("compute_stats: image has " + std::to_string(n) +
                         " pixels; need at least 20 for the 5% buckets");
    }
    const std::int64_t k = std::max<std::int64_t>(1, n / 20);

    StatVector stats;
    std::vector<float> scratch(static_cast<std::size_t>(n));
    for (int c = 0; c < 3; ++c) {
        float* dst = scratch.data();
        for (int b = 0; b < image.batch; ++b) {
            const float* p = image.plane(b, c);
            std::copy(p, p + image.plane_size(), dst);
            dst += image.plane_size();
        }

        double sum = std::accumulate(scratch.begin(), scratch.end(), 0.0);
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (float v : scratch) {
            const double d = v - mean;
            sq += d * d;
        }

        // Partial selection keeps this O(n): the k extremes are unordered but
        // their mean is order independent.
        std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end());
        const double dark =
            std::accumulate(scratch.begin(), scratch.begin() + k, 0.0) / static_cast<double>(k);
        std::nth_element(scratch.begin(), scratch.end() - k, scratch.end());
        const double bright =
            std::accumulate(scratch.end() - k, scratch.end(), 0.0) / static_cast<double>(k);

        stats.values[c] = static_cast<float>(mean);
        stats.values[3 + c] = static_cast<float>(std::sqrt(sq / static_cast<double>(n)));
        stats.values[6 + c] = static_cast<float>(bright);
        stats.values[9 + c] = static_cast<float>(dark);
    }
    return stats;
}

ColorAdjustment predict_adjustment(const StatVector& stats, const SgcaParams& params) {
    check_params(params);

    std::vector<float> hidden(params.hidden);
    for (int j = 0; j < params.hidden; ++j) {
        float acc = params.b0[j];
        for (int i = 0; i < 12; ++i) {
            acc += params.w0[static_cast<std::size_t>(j) * 12 + i] * stats.values[i];
        }
        hidden[j] = std::max(0.0f, acc);
    }

    float raw[3];
    for (int o = 0; o < 3; ++o) {
        float acc = params.b1[o];
        for (int j = 0; j < params.hidden; ++j) {
            acc += params.w1[static_cast<std::size_t>(o) * params.hidden + j] * hidden[j];
        }
        raw[o] = acc;
    }

    ColorAdjustment adj;
    adj.delta_t = params.lambda_t * std::tanh(raw[0]);
    adj.delta_tau = params.lambda_t * std::tanh(raw[1]);
    adj.s_gain = 1.0f + params.lambda_s * std::tanh(raw[2]);
    return adj;
}

Tensor apply_adjustment_unclamped(const Tensor& image, const ColorAdjustment& adj) {
    require_rgb(image, "apply_adjustment");
    if (adj.delta_t == 0.0f && adj.delta_tau == 0.0f && adj.s_gain == 1.0f) {
        return image; // exact no-op, no float round-trip through the pivot
    }
    Tensor out(image.batch, 3, image.height, image.width);
    for (int n = 0; n < image.batch; ++n) {
        const float* r = image.plane(n, 0);
        const float* g = image.plane(n, 1);
        const float* b = image.plane(n, 2);
        float* ro = out.plane(n, 0);
        float* go = out.plane(n, 1);
        float* bo = out.plane(n, 2);
        const std::int64_t count = image.plane_size();
        for (std::int64_t i = 0; i < count; ++i) {
            const float rs = r[i] + adj.delta_t;
            const float gs = g[i] - adj.delta_tau;
            const float bs = b[i] - adj.delta_t;
            const float y = rec709_luminance(rs, gs, bs);
            ro[i] = y + adj.s_gain * (rs - y);
            go[i] = y + adj.s_gain * (gs - y);
            bo[i] = y + adj.s_gain * (bs - y);
        }
    }
    return out;
}

Tensor apply_adjustment(const Tensor& image, const ColorAdjustment& adj) {
    return clamp01(apply_adjustment_unclamped(image, adj));
}

Tensor sgca_forward(const Tensor& image, const SgcaParams& params) {
    return apply_adjustment(image, predict_adjustment(compute_stats(image), params));
}

std::int64_t sgca_param_count(int hidden) {
    return static_cast<std::int64_t>(hidden) * 12 + hidden + 3 * hidden + 3;
}

} // namespace uwe

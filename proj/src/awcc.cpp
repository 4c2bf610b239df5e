#include "uwe/awcc.hpp"

namespace uwe {

namespace {

constexpr double kGainEpsilon = 1e-6;

void require_rgb(const Tensor& image, const char* op) {
    if (image.channels != 3) {
        throw ShapeError(std::string(op) + ": expected a 3-channel image, got " +
                         std::to_string(image.channels) + " channels");
    }
}

double plane_sum(const Tensor& t, int channel) {
    double sum = 0.0;
    for (int n = 0; n < t.batch; ++n) {
        const float* p = t.plane(n, channel);
        const std::int64_t count = t.plane_size();
        for (std::int64_t i = 0; i < count; ++i) {
            sum += p[i];
        }
    }
    return sum;
}

void shift_channel(Tensor& t, int channel, float offset) {
    for (int n = 0; n < t.batch; ++n) {
        float* p = t.plane(n, channel);
        const std::int64_t count = t.plane_size();
        for (std::int64_t i = 0; i < count; ++i) {
            p[i] += offset;
        }
    }
}

void scale_channel(Tensor& t, int channel, float gain) {
    for (int n = 0; n < t.batch; ++n) {
        float* p = t.plane(n, channel);
        const std::int64_t count = t.plane_size();
        for (std::int64_t i = 0; i < count; ++i) {
            p[i] *= gain;
        }
    }
}

} // namespace

ChannelMeans channel_means(const Tensor& image) {
    require_rgb(image, "channel_means");
    const double count = static_cast<double>(image.batch) * image.plane_size();
    return {plane_sum(image, 0) / count, plane_sum(image, 1) / count, plane_sum(image, 2) / count};
}

Tensor compensate(const Tensor& image, const AwccParams& params) {
    const ChannelMeans m = channel_means(image);
    Tensor out = image;
    shift_channel(out, 0, params.alpha_r * static_cast<float>(m.g - m.r));
    shift_channel(out, 2, params.alpha_b * static_cast<float>(m.g - m.b));
    return out;
}

Tensor gray_world_correct_unclamped(const Tensor& image) {
    const ChannelMeans m = channel_means(image);
    const double mu_gray = (m.r + m.g + m.b) / 3.0;
    Tensor out = image;
    scale_channel(out, 0, static_cast<float>(mu_gray / (m.r + kGainEpsilon)));
    scale_channel(out, 1, static_cast<float>(mu_gray / (m.g + kGainEpsilon)));
    scale_channel(out, 2, static_cast<float>(mu_gray / (m.b + kGainEpsilon)));
    return out;
}

Tensor gray_world_correct(const Tensor& image) {
    return clamp01(gray_world_correct_unclamped(image));
}

Tensor awcc_forward(const Tensor& image, const AwccParams& params) {
    return gray_world_correct(compensate(image, params));
}

} // namespace uwe

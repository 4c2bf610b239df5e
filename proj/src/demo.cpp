#include "uwe/demo.hpp"

namespace uwe {

namespace {

// splitmix64: tiny, stateless-friendly, identical output on every platform.
// std::uniform_real_distribution is not pinned by the standard, so demo files
// and benchmark inputs avoid it to stay reproducible byte for byte.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 24 bits of mantissa.
    float unit() { return static_cast<float>(next_u64() >> 40) * (1.0f / 16777216.0f); }

    float uniform(float lo, float hi) { return lo + (hi - lo) * unit(); }

    void fill(std::vector<float>& v, float lo, float hi) {
        for (float& x : v) {
            x = uniform(lo, hi);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace

Model make_demo_model(DemoPreset preset, std::uint64_t seed) {
    Model model;
    model.config = default_config();
    model.weights.mode = WeightMode::Train;
    for (const auto& [in, out] : model.config.layers) {
        model.weights.train_layers.push_back(make_zero_train_weights(in, out, model.config.rep_scale));
    }
    model.weights.sgca = make_zero_sgca(model.config.sgca_hidden);
    model.weights.awcc = AwccParams{0.0f, 0.0f};

    if (preset == DemoPreset::Passthrough) {
        return model;
    }

    PortableRng rng(seed);
    model.weights.awcc.alpha_r = rng.uniform(0.5f, 1.5f);
    model.weights.awcc.alpha_b = rng.uniform(0.5f, 1.5f);
    for (MrdConvTrainWeights& layer : model.weights.train_layers) {
        for (BranchKind kind : kBranchKinds) {
            MrdConvBranch& br = layer.branch(kind);
            rng.fill(br.conv.weight, -0.3f, 0.3f);
            rng.fill(br.bn.gamma, 0.5f, 1.5f);
            rng.fill(br.bn.beta, -0.2f, 0.2f);
            rng.fill(br.bn.running_mean, -0.2f, 0.2f);
            rng.fill(br.bn.running_var, 0.1f, 2.0f);
        }
        rng.fill(layer.fusion.weight, -0.3f, 0.3f);
        rng.fill(layer.fusion.bias, -0.1f, 0.1f);
    }
    rng.fill(model.weights.sgca.w0, -0.5f, 0.5f);
    rng.fill(model.weights.sgca.b0, -0.1f, 0.1f);
    rng.fill(model.weights.sgca.w1, -0.5f, 0.5f);
    rng.fill(model.weights.sgca.b1, -0.1f, 0.1f);
    return model;
}

Tensor random_image(int height, int width, std::uint64_t seed) {
    Tensor t(1, 3, height, width);
    PortableRng rng(seed);
    rng.fill(t.data, 0.0f, 1.0f);
    return t;
}

} // namespace uwe

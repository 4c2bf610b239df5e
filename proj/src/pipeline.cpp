#include "uwe/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <utility>

#include <json.hpp>

namespace uwe {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'U', 'I', 'E', 'W'};
constexpr std::uint32_t kVersion = 1;

void apply_activation(Tensor& t, Activation a, float slope) {
    switch (a) {
    case Activation::None:
        return;
    case Activation::Relu:
        for (float& v : t.data) {
            v = std::max(0.0f, v);
        }
        return;
    case Activation::LeakyRelu:
        for (float& v : t.data) {
            v = v >= 0.0f ? v : slope * v;
        }
        return;
    }
}

MrdConvInferWeights make_zero_infer_weights(int in_channels, int out_channels) {
    MrdConvInferWeights w;
    w.conv.out_channels = out_channels;
    w.conv.in_channels = in_channels;
    w.conv.kernel_h = 5;
    w.conv.kernel_w = 5;
    w.conv.dilation_h = 1;
    w.conv.dilation_w = 1;
    w.conv.pad_h = 2;
    w.conv.pad_w = 2;
    w.conv.weight.assign(static_cast<std::size_t>(w.conv.weight_count()), 0.0f);
    w.conv.bias.assign(out_channels, 0.0f);
    return w;
}

ModelWeights make_zero_weights(const ModelConfig& config, WeightMode mode) {
    ModelWeights w;
    w.mode = mode;
    w.awcc = AwccParams{0.0f, 0.0f};
    for (const auto& [in, out] : config.layers) {
        if (mode == WeightMode::Train) {
            w.train_layers.push_back(make_zero_train_weights(in, out, config.rep_scale));
        } else {
            w.infer_layers.push_back(make_zero_infer_weights(in, out));
        }
    }
    w.sgca = make_zero_sgca(config.sgca_hidden);
    return w;
}

void check_consistent(const ModelWeights& weights, const ModelConfig& config) {
    config.validate();
    const std::size_t n_layers = config.layers.size();
    const bool train = weights.mode == WeightMode::Train;
    if (train && (weights.train_layers.size() != n_layers || !weights.infer_layers.empty())) {
        throw ConfigError("model: train-mode weights do not match the configured layer count");
    }
    if (!train && (weights.infer_layers.size() != n_layers || !weights.train_layers.empty())) {
        throw ConfigError("model: inference-mode weights do not match the configured layer count");
    }
    for (std::size_t i = 0; i < n_layers; ++i) {
        const auto [in, out] = config.layers[i];
        if (train) {
            const MrdConvTrainWeights& l = weights.train_layers[i];
            if (l.in_channels != in || l.out_channels != out ||
                l.mid_channels != out * config.rep_scale) {
                throw ConfigError("model: layer " + std::to_string(i) + " channels disagree with config");
            }
        } else {
            const MrdConvInferWeights& l = weights.infer_layers[i];
            if (l.conv.in_channels != in || l.conv.out_channels != out) {
                throw ConfigError("model: layer " + std::to_string(i) + " channels disagree with config");
            }
        }
    }
    if (weights.sgca.hidden != config.sgca_hidden) {
        throw ConfigError("model: sgca hidden width disagrees with config");
    }
}

// ---- serialization ------------------------------------------------------

struct TensorSlot {
    std::string name;
    std::vector<std::int64_t> shape;
    float* data;

    std::int64_t count() const {
        std::int64_t n = 1;
        for (std::int64_t d : shape) {
            n *= d;
        }
        return n;
    }
};

std::vector<TensorSlot> enumerate_slots(ModelWeights& w) {
    std::vector<TensorSlot> slots;
    slots.push_back({"awcc.alpha_r", {1}, &w.awcc.alpha_r});
    slots.push_back({"awcc.alpha_b", {1}, &w.awcc.alpha_b});

    if (w.mode == WeightMode::Train) {
        for (std::size_t i = 0; i < w.train_layers.size(); ++i) {
            MrdConvTrainWeights& l = w.train_layers[i];
            const std::string prefix = "backbone." + std::to_string(i) + ".";
            for (BranchKind kind : kBranchKinds) {
                MrdConvBranch& br = l.branch(kind);
                const std::string bp = prefix + branch_name(kind) + ".";
                slots.push_back({bp + "conv.weight",
                                 {br.conv.out_channels, br.conv.in_channels, br.conv.kernel_h,
                                  br.conv.kernel_w},
                                 br.conv.weight.data()});
                slots.push_back({bp + "bn.gamma", {l.mid_channels}, br.bn.gamma.data()});
                slots.push_back({bp + "bn.beta", {l.mid_channels}, br.bn.beta.data()});
                slots.push_back({bp + "bn.running_mean", {l.mid_channels}, br.bn.running_mean.data()});
                slots.push_back({bp + "bn.running_var", {l.mid_channels}, br.bn.running_var.data()});
            }
            slots.push_back({prefix + "fusion.weight",
                             {l.out_channels, l.mid_channels, 1, 1},
                             l.fusion.weight.data()});
            slots.push_back({prefix + "fusion.bias", {l.out_channels}, l.fusion.bias.data()});
        }
    } else {
        for (std::size_t i = 0; i < w.infer_layers.size(); ++i) {
            MrdConvInferWeights& l = w.infer_layers[i];
            const std::string prefix = "backbone." + std::to_string(i) + ".";
            slots.push_back({prefix + "conv.weight",
                             {l.conv.out_channels, l.conv.in_channels, 5, 5},
                             l.conv.weight.data()});
            slots.push_back({prefix + "conv.bias", {l.conv.out_channels}, l.conv.bias.data()});
        }
    }

    slots.push_back({"sgca.mlp.0.weight", {w.sgca.hidden, 12}, w.sgca.w0.data()});
    slots.push_back({"sgca.mlp.0.bias", {w.sgca.hidden}, w.sgca.b0.data()});
    slots.push_back({"sgca.mlp.1.weight", {3, w.sgca.hidden}, w.sgca.w1.data()});
    slots.push_back({"sgca.mlp.1.bias", {3}, w.sgca.b1.data()});
    return slots;
}

json config_to_json(const ModelConfig& c) {
    json layers = json::array();
    for (const auto& [in, out] : c.layers) {
        layers.push_back(json::array({in, out}));
    }
    return json{{"layers", layers},
                {"rep_scale", c.rep_scale},
                {"activation", activation_name(c.activation)},
                {"leaky_slope", c.leaky_slope},
                {"residual", c.residual},
                {"sgca_hidden", c.sgca_hidden}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    try {
        c.layers.clear();
        for (const auto& pair : j.at("layers")) {
            c.layers.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        }
        c.rep_scale = j.at("rep_scale").get<int>();
        c.activation = activation_from_name(j.at("activation").get<std::string>());
        c.leaky_slope = j.at("leaky_slope").get<double>();
        c.residual = j.at("residual").get<bool>();
        c.sgca_hidden = j.at("sgca_hidden").get<int>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("weight manifest: bad config: ") + e.what());
    }
    c.validate();
    return c;
}

template <typename T>
void append_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

} // namespace

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::None: return "none";
    case Activation::Relu: return "relu";
    case Activation::LeakyRelu: return "leaky_relu";
    }
    throw ConfigError("activation_name: unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "none") {
        return Activation::None;
    }
    if (name == "relu") {
        return Activation::Relu;
    }
    if (name == "leaky_relu") {
        return Activation::LeakyRelu;
    }
    throw FormatError("unknown activation '" + name + "'");
}

void ModelConfig::validate() const {
    if (rep_scale < 1) {
        throw ConfigError("config: rep_scale must be >= 1");
    }
    if (sgca_hidden < 1) {
        throw ConfigError("config: sgca_hidden must be >= 1");
    }
    if (layers.empty()) {
        return; // legal degenerate backbone; enhance treats it as identity
    }
    if (layers.front().first != 3) {
        throw ConfigError("config: first backbone layer must take 3 channels");
    }
    if (layers.back().second != 3) {
        throw ConfigError("config: last backbone layer must emit 3 channels");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto [in, out] = layers[i];
        if (in < 1 || out < 1) {
            throw ConfigError("config: layer channel counts must be >= 1");
        }
        if (i > 0 && layers[i - 1].second != in) {
            throw ConfigError("config: layer " + std::to_string(i) + " does not chain");
        }
    }
}

ModelConfig default_config() {
    ModelConfig c;
    c.layers = {{3, 8}, {8, 3}};
    c.rep_scale = 4;
    c.activation = Activation::LeakyRelu;
    c.leaky_slope = 0.05;
    c.residual = true;
    c.sgca_hidden = 166;
    return c;
}

Tensor enhance(const Tensor& image, const ModelWeights& weights, const ModelConfig& config) {
    check_consistent(weights, config);
    if (image.channels != 3) {
        throw ShapeError("enhance: expected a 3-channel image");
    }

    const Tensor x0 = awcc_forward(image, weights.awcc);
    Tensor h = x0;
    const std::size_t n_layers = config.layers.size();
    for (std::size_t i = 0; i < n_layers; ++i) {
        h = weights.mode == WeightMode::Train ? forward_train(h, weights.train_layers[i])
                                              : forward_infer(h, weights.infer_layers[i]);
        if (i + 1 < n_layers) {
            apply_activation(h, config.activation, static_cast<float>(config.leaky_slope));
        }
    }
    if (config.residual) {
        h = add(h, x0);
    }
    return sgca_forward(clamp01(h), weights.sgca);
}

ModelWeights convert_to_inference(const ModelWeights& weights) {
    if (weights.mode != WeightMode::Train) {
        throw ModeError("convert_to_inference: weights are already in inference mode");
    }
    ModelWeights out;
    out.mode = WeightMode::Inference;
    out.awcc = weights.awcc;
    out.sgca = weights.sgca;
    out.infer_layers.reserve(weights.train_layers.size());
    for (const MrdConvTrainWeights& l : weights.train_layers) {
        out.infer_layers.push_back(reparameterize(l));
    }
    return out;
}

std::int64_t count_params(const ModelWeights& weights) {
    // Stored floats, BN statistics included; matches the UIEW payload size / 4.
    ModelWeights w = weights;
    std::int64_t total = 0;
    for (const TensorSlot& slot : enumerate_slots(w)) {
        total += slot.count();
    }
    return total;
}

std::int64_t inference_param_count(const ModelConfig& config) {
    std::int64_t total = 2 + sgca_param_count(config.sgca_hidden);
    for (const auto& [in, out] : config.layers) {
        total += infer_layer_param_count(in, out);
    }
    return total;
}

std::int64_t train_param_count(const ModelConfig& config) {
    std::int64_t total = 2 + sgca_param_count(config.sgca_hidden);
    for (const auto& [in, out] : config.layers) {
        total += train_layer_param_count(in, out, config.rep_scale);
    }
    return total;
}

std::int64_t count_flops(const ModelConfig& config, int height, int width) {
    config.validate();
    if (height < 1 || width < 1) {
        throw ShapeError("count_flops: image dimensions must be >= 1");
    }
    const std::int64_t p = static_cast<std::int64_t>(height) * width;

    // Collapsed-form accounting, 2 FLOPs per MAC; the itemized elementwise
    // terms are documented in the README.
    std::int64_t total = 14 * p; // AWCC: means, shifts, gray-world gains, clamp
    const std::size_t n_layers = config.layers.size();
    for (std::size_t i = 0; i < n_layers; ++i) {
        const auto [in, out] = config.layers[i];
        total += p * out * (2 * 25 * static_cast<std::int64_t>(in) + 1);
        if (i + 1 < n_layers && config.activation != Activation::None) {
            total += p * out;
        }
    }
    if (config.residual) {
        total += 3 * p;
    }
    total += 3 * p;                           // clamp after the backbone
    total += 18 * p;                          // SGCA statistics
    total += 31LL * config.sgca_hidden + 9;   // SGCA MLP + heads
    total += 20 * p;                          // SGCA shift/saturate/clamp
    return total;
}

EfficiencyReport efficiency_report(const ModelConfig& config, int height, int width) {
    EfficiencyReport report;
    report.train_params = train_param_count(config);
    report.inference_params = inference_param_count(config);
    report.flops = count_flops(config, height, width);
    report.flops_height = height;
    report.flops_width = width;
    return report;
}

void save_weights(const Model& model, const std::string& path) {
    check_consistent(model.weights, model.config);
    ModelWeights w = model.weights;
    std::vector<TensorSlot> slots = enumerate_slots(w);

    json tensors = json::array();
    std::int64_t offset = 0;
    for (const TensorSlot& slot : slots) {
        tensors.push_back(json{{"name", slot.name}, {"shape", slot.shape}, {"byte_offset", offset}});
        offset += slot.count() * 4;
    }
    const json manifest{{"mode", model.weights.mode == WeightMode::Train ? "train" : "inference"},
                        {"config", config_to_json(model.config)},
                        {"tensors", tensors}};
    const std::string manifest_text = manifest.dump();

    std::string header;
    header.append(kMagic, 4);
    append_le<std::uint32_t>(header, kVersion);
    append_le<std::uint64_t>(header, static_cast<std::uint64_t>(manifest_text.size()));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    f.write(manifest_text.data(), static_cast<std::streamsize>(manifest_text.size()));
    for (const TensorSlot& slot : slots) {
        f.write(reinterpret_cast<const char*>(slot.data),
                static_cast<std::streamsize>(slot.count() * 4));
    }
    if (!f) {
        throw IoError("failed while writing '" + path + "'");
    }
}

Model load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (bytes.size() < 16) {
        throw FormatError("'" + path + "': truncated header");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("'" + path + "': bad magic (not a UIEW weight file)");
    }
    std::uint32_t version = 0;
    std::uint64_t manifest_len = 0;
    std::memcpy(&version, bytes.data() + 4, 4);
    std::memcpy(&manifest_len, bytes.data() + 8, 8);
    if (version != kVersion) {
        throw FormatError("'" + path + "': unsupported version " + std::to_string(version));
    }
    if (manifest_len > bytes.size() - 16) {
        throw FormatError("'" + path + "': truncated manifest");
    }

    json manifest;
    try {
        manifest = json::parse(bytes.substr(16, manifest_len));
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': manifest is not valid JSON: " + e.what());
    }

    Model model;
    WeightMode mode = WeightMode::Train;
    try {
        const std::string mode_text = manifest.at("mode").get<std::string>();
        if (mode_text == "train") {
            mode = WeightMode::Train;
        } else if (mode_text == "inference") {
            mode = WeightMode::Inference;
        } else {
            throw FormatError("'" + path + "': unknown mode '" + mode_text + "'");
        }
        model.config = config_from_json(manifest.at("config"));
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': bad manifest: " + e.what());
    }

    model.weights = make_zero_weights(model.config, mode);
    std::vector<TensorSlot> slots = enumerate_slots(model.weights);

    if (!manifest.contains("tensors")) {
        throw FormatError("'" + path + "': manifest has no tensor list");
    }
    const json& tensors = manifest["tensors"];
    if (!tensors.is_array() || tensors.size() != slots.size()) {
        throw FormatError("'" + path + "': manifest lists " + std::to_string(tensors.size()) +
                          " tensors, model needs " + std::to_string(slots.size()));
    }

    const char* payload = bytes.data() + 16 + manifest_len;
    const std::int64_t payload_size = static_cast<std::int64_t>(bytes.size()) - 16 -
                                      static_cast<std::int64_t>(manifest_len);
    std::int64_t expected_offset = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const TensorSlot& slot = slots[i];
        const json& entry = tensors[i];
        std::string name;
        std::vector<std::int64_t> shape;
        std::int64_t offset = 0;
        try {
            name = entry.at("name").get<std::string>();
            shape = entry.at("shape").get<std::vector<std::int64_t>>();
            offset = entry.at("byte_offset").get<std::int64_t>();
        } catch (const json::exception& e) {
            throw FormatError("'" + path + "': bad tensor entry " + std::to_string(i) + ": " + e.what());
        }
        if (name != slot.name) {
            throw FormatError("'" + path + "': tensor " + std::to_string(i) + " is '" + name +
                              "', expected '" + slot.name + "'");
        }
        if (shape != slot.shape) {
            throw FormatError("'" + path + "': tensor '" + name + "' has a mismatched shape");
        }
        if (offset != expected_offset) {
            throw FormatError("'" + path + "': tensor '" + name + "' has byte_offset " +
                              std::to_string(offset) + ", expected " + std::to_string(expected_offset));
        }
        const std::int64_t nbytes = slot.count() * 4;
        if (offset + nbytes > payload_size) {
            throw FormatError("'" + path + "': truncated payload at tensor '" + name + "'");
        }
        std::memcpy(slot.data, payload + offset, static_cast<std::size_t>(nbytes));
        expected_offset += nbytes;
    }
    if (expected_offset != payload_size) {
        throw FormatError("'" + path + "': payload has " + std::to_string(payload_size) +
                          " bytes, manifest accounts for " + std::to_string(expected_offset));
    }

    const AwccParams& a = model.weights.awcc;
    if (a.alpha_r < 0.0f || a.alpha_r > 2.0f || a.alpha_b < 0.0f || a.alpha_b > 2.0f) {
        std::cerr << "warning: '" << path << "': awcc alpha (" << a.alpha_r << ", " << a.alpha_b
                  << ") outside the recommended [0, 2] operating range\n";
    }
    return model;
}

} // namespace uwe

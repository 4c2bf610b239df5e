#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uwe/awcc.hpp"
#include "uwe/mrdconv.hpp"
#include "uwe/sgca.hpp"

namespace uwe {

enum class Activation { None, Relu, LeakyRelu };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct ModelConfig {
    std::vector<std::pair<int, int>> layers; // (in_channels, out_channels) per backbone layer
    int rep_scale = 4;
    Activation activation = Activation::LeakyRelu;
    double leaky_slope = 0.05;
    bool residual = true;
    int sgca_hidden = 166;

    /// Throws ConfigError unless the plan starts at 3 channels, ends at 3, and chains.
    void validate() const;
};

/// The shipped default: two MRDConv layers 3->8->3, rep-scale 4, leaky ReLU
/// between layers, global residual, SGCA hidden width 166. Collapsed form
/// counts 3,872 parameters.
ModelConfig default_config();

enum class WeightMode { Train, Inference };

struct ModelWeights {
    WeightMode mode = WeightMode::Train;
    AwccParams awcc;
    std::vector<MrdConvTrainWeights> train_layers; // populated when mode == Train
    std::vector<MrdConvInferWeights> infer_layers; // populated when mode == Inference
    SgcaParams sgca;
};

struct Model {
    ModelConfig config;
    ModelWeights weights;
};

struct EfficiencyReport {
    std::int64_t train_params = 0;
    std::int64_t inference_params = 0;
    std::int64_t flops = 0; // per image at (flops_height, flops_width)
    int flops_height = 0;
    int flops_width = 0;
    double fps = 0.0; // measured; 0 when not benchmarked
};

/// AWCC -> backbone (per-layer MRDConv with the configured activation between
/// layers, optional global residual of the AWCC output, clamp) -> SGCA.
/// Works with either weight mode. Throws ConfigError on weight/config mismatch.
Tensor enhance(const Tensor& image, const ModelWeights& weights, const ModelConfig& config);

/// Reparameterize every backbone layer; AWCC and SGCA copy through unchanged.
/// Throws ModeError when the input is already in inference mode.
ModelWeights convert_to_inference(const ModelWeights& weights);

/// Total stored float count of the weights (BN statistics included).
std::int64_t count_params(const ModelWeights& weights);

/// Closed forms per config, matching count_params on freshly built weights.
std::int64_t inference_param_count(const ModelConfig& config);
std::int64_t train_param_count(const ModelConfig& config);

/// Forward cost of one collapsed-form enhance at HxW. Convolutions count
/// 2 FLOPs per multiply-accumulate plus 1 per bias add; elementwise stages are
/// itemized in the README. Throws ConfigError for invalid configs.
std::int64_t count_flops(const ModelConfig& config, int height, int width);

/// Closed-form counts for a config at the given resolution; fps stays 0 until
/// a benchmark fills it in.
EfficiencyReport efficiency_report(const ModelConfig& config, int height, int width);

// Weight file format "UIEW" (bit-exact, little-endian):
//   bytes 0-3   ASCII magic "UIEW"
//   bytes 4-7   version = 1, uint32
//   bytes 8-15  manifest byte length L, uint64
//   bytes 16..  UTF-8 JSON manifest {mode, config, tensors:[{name,shape,byte_offset}]}
//   remainder   raw float32 payloads; byte_offset is relative to payload start.
void save_weights(const Model& model, const std::string& path);
Model load_weights(const std::string& path);

} // namespace uwe

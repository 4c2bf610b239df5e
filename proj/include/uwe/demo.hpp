#pragma once

#include <cstdint>

#include "uwe/pipeline.hpp"

namespace uwe {

enum class DemoPreset { Passthrough, Random };

/// Train-mode demo weights for the default config. The passthrough preset
/// (zero backbone, zero SGCA, alpha = 0) makes the whole pipeline reduce to
/// gray-world correction; the random preset draws every tensor from a seeded
/// generator that is identical across platforms, so files are reproducible
/// byte for byte.
Model make_demo_model(DemoPreset preset, std::uint64_t seed);

/// Deterministic uniform [0,1) image from the same portable generator.
Tensor random_image(int height, int width, std::uint64_t seed);

} // namespace uwe

// uwe -- underwater image enhancement CLI.
//
// Exit codes: 0 success, 2 I/O, 3 weight-mode misuse, 4 shape/config, 5 format.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uwe/demo.hpp"
#include "uwe/image_io.hpp"
#include "uwe/losses.hpp"
#include "uwe/metrics.hpp"
#include "uwe/pipeline.hpp"

namespace {

using nlohmann::json;

constexpr int kExitIo = 2;
constexpr int kExitMode = 3;
constexpr int kExitShape = 4;
constexpr int kExitFormat = 5;

namespace fs = std::filesystem;

int thread_budget() {
    if (const char* env = std::getenv("UWE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

uwe::Model load_model_checked(const std::string& path, const std::string& mode) {
    uwe::Model model = uwe::load_weights(path);
    if (mode == "train" && model.weights.mode != uwe::WeightMode::Train) {
        throw uwe::ModeError("'" + path + "' holds inference weights but --mode train was requested");
    }
    if (mode == "inference" && model.weights.mode != uwe::WeightMode::Inference) {
        throw uwe::ModeError("'" + path + "' holds train weights but --mode inference was requested");
    }
    return model;
}

json uciqe_json(const uwe::UciqeComponents& c) {
    return json{{"sigma_c", c.sigma_c}, {"con_l", c.con_l}, {"mu_s", c.mu_s}, {"uciqe", c.uciqe}};
}

json loss_json(const uwe::LossBreakdown& b) {
    return json{{"charbonnier", b.charbonnier},
                {"psnr_loss", b.psnr_loss},
                {"perceptual", b.perceptual},
                {"color", b.color},
                {"total", b.total}};
}

void run_enhance(const std::string& weights_path, const std::string& input,
                 const std::string& output, const std::string& mode) {
    const uwe::Model model = load_model_checked(weights_path, mode);

    if (fs::is_directory(input)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(input)) {
            if (!entry.is_regular_file()) {
                continue;
            }
            const std::string ext = entry.path().extension().string();
            if (ext == ".ppm" || ext == ".png") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw uwe::IoError("'" + input + "' contains no .ppm or .png files");
        }
        fs::create_directories(output);

        const int workers = std::min<int>(thread_budget(), static_cast<int>(files.size()));
        std::atomic<std::size_t> cursor{0};
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= files.size() || failed.load()) {
                    return;
                }
                try {
                    const uwe::Tensor img = uwe::load_image(files[i].string());
                    const uwe::Tensor result = uwe::enhance(img, model.weights, model.config);
                    uwe::save_image(result, (fs::path(output) / files[i].filename()).string());
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) {
                        first_error = std::current_exception();
                    }
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
        if (first_error) {
            std::rethrow_exception(first_error); // keeps the original exit-code class
        }
        return;
    }

    const uwe::Tensor img = uwe::load_image(input);
    const uwe::Tensor result = uwe::enhance(img, model.weights, model.config);
    uwe::save_image(result, output);
}

void run_rep(const std::string& weights_path, const std::string& output) {
    const uwe::Model model = uwe::load_weights(weights_path);
    if (model.weights.mode != uwe::WeightMode::Train) {
        throw uwe::ModeError("'" + weights_path + "' is already in inference mode");
    }
    uwe::Model converted{model.config, uwe::convert_to_inference(model.weights)};
    uwe::save_weights(converted, output);

    const uwe::EfficiencyReport eff = uwe::efficiency_report(model.config, 480, 640);
    std::cout << "params: train=" << eff.train_params << " (" << eff.train_params / 1000.0
              << "K) -> inference=" << eff.inference_params << " ("
              << eff.inference_params / 1000.0 << "K)\n";
}

void run_metrics(const std::string& ref_path, const std::string& test_path) {
    const uwe::Tensor ref = uwe::load_image(ref_path);
    const uwe::Tensor test = uwe::load_image(test_path);
    json report{{"psnr", uwe::psnr(ref, test)},
                {"ssim", uwe::ssim(ref, test)},
                {"ciede2000", uwe::ciede2000_image(ref, test)},
                {"uiqm", uwe::uiqm(test)},
                {"uciqe", uciqe_json(uwe::uciqe(test))},
                {"loss", loss_json(uwe::total_loss(test, ref, uwe::identity_extractor()))}};
    std::cout << report.dump(2) << "\n";
}

void run_nr_metrics(const std::string& input) {
    const uwe::Tensor img = uwe::load_image(input);
    json report{{"uiqm", uwe::uiqm(img)}, {"uciqe", uciqe_json(uwe::uciqe(img))}};
    std::cout << report.dump(2) << "\n";
}

void run_loss(const std::string& ref_path, const std::string& test_path) {
    const uwe::Tensor ref = uwe::load_image(ref_path);
    const uwe::Tensor test = uwe::load_image(test_path);
    std::cout << loss_json(uwe::total_loss(test, ref, uwe::identity_extractor())).dump(2) << "\n";
}

void run_bench(const std::string& weights_path, int width, int height, int iters, int warmup,
               std::uint64_t seed) {
    const uwe::Model model = uwe::load_weights(weights_path);
    if (model.weights.mode != uwe::WeightMode::Inference) {
        throw uwe::ModeError("'" + weights_path +
                             "' holds train weights; bench measures the deployed inference form "
                             "(run `uwe rep` first)");
    }

    const uwe::Tensor input = uwe::random_image(height, width, seed);
    for (int i = 0; i < warmup; ++i) {
        uwe::enhance(input, model.weights, model.config);
    }
    std::vector<double> latencies_ms;
    latencies_ms.reserve(static_cast<std::size_t>(iters));
    for (int i = 0; i < iters; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        uwe::enhance(input, model.weights, model.config);
        const auto t1 = std::chrono::steady_clock::now();
        latencies_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    std::vector<double> sorted = latencies_ms;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : sorted) {
        mean += v;
    }
    mean /= static_cast<double>(sorted.size());
    const double median = sorted[sorted.size() / 2];
    const std::size_t p95_idx =
        std::min(sorted.size() - 1,
                 static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1);

    uwe::EfficiencyReport eff = uwe::efficiency_report(model.config, height, width);
    eff.fps = 1000.0 / mean;
    json report{{"width", width},
                {"height", height},
                {"iters", iters},
                {"warmup", warmup},
                {"mean_ms", mean},
                {"median_ms", median},
                {"p95_ms", sorted[p95_idx]},
                {"fps", eff.fps},
                {"flops", eff.flops},
                {"params", eff.inference_params}};
    std::cout << report.dump(2) << "\n";
}

void run_init_demo(const std::string& output, const std::string& preset, std::uint64_t seed) {
    const uwe::DemoPreset p =
        preset == "random" ? uwe::DemoPreset::Random : uwe::DemoPreset::Passthrough;
    uwe::save_weights(uwe::make_demo_model(p, seed), output);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uwe -- lightweight underwater image enhancement"};
    app.require_subcommand(1);

    std::string weights, input, output, ref, test;
    std::string mode = "auto";
    std::string preset = "passthrough";
    int width = 640;
    int height = 480;
    int iters = 10;
    int warmup = 3;
    std::uint64_t seed = 0;

    CLI::App* enhance = app.add_subcommand("enhance", "Enhance an image (or a directory of images)");
    enhance->add_option("--weights", weights, "UIEW weight file")->required();
    enhance->add_option("--input", input, "Input image (PPM/PNG) or directory")->required();
    enhance->add_option("--output", output, "Output image or directory")->required();
    enhance->add_option("--mode", mode, "Required weight mode: auto|train|inference")
        ->check(CLI::IsMember({"auto", "train", "inference"}));

    CLI::App* rep = app.add_subcommand("rep", "Collapse train-mode weights for inference");
    rep->add_option("--weights", weights, "Train-mode UIEW weight file")->required();
    rep->add_option("--output", output, "Destination UIEW file")->required();

    CLI::App* metrics = app.add_subcommand("metrics", "Full-reference quality report (JSON)");
    metrics->add_option("--ref", ref, "Reference image")->required();
    metrics->add_option("--test", test, "Image under test")->required();

    CLI::App* nr = app.add_subcommand("nr-metrics", "No-reference quality report (JSON)");
    nr->add_option("--input", input, "Image to score")->required();

    CLI::App* loss = app.add_subcommand("loss", "Objective breakdown against a reference (JSON)");
    loss->add_option("--ref", ref, "Reference image")->required();
    loss->add_option("--test", test, "Image under test")->required();

    CLI::App* bench = app.add_subcommand("bench", "Measure enhance throughput (JSON)");
    bench->add_option("--weights", weights, "Inference-mode UIEW weight file")->required();
    bench->add_option("--width", width, "Image width");
    bench->add_option("--height", height, "Image height");
    bench->add_option("--iters", iters, "Timed iterations")->check(CLI::PositiveNumber);
    bench->add_option("--warmup", warmup, "Untimed warmup iterations")->check(CLI::NonNegativeNumber);
    bench->add_option("--seed", seed, "Seed for the generated input image");

    CLI::App* init = app.add_subcommand("init-demo", "Write train-mode demo weights");
    init->add_option("--output", output, "Destination UIEW file")->required();
    init->add_option("--seed", seed, "Seed for the random preset");
    init->add_option("--preset", preset, "passthrough|random")
        ->check(CLI::IsMember({"passthrough", "random"}));

    try {
        app.parse(argc, argv);
        if (enhance->parsed()) {
            run_enhance(weights, input, output, mode);
        } else if (rep->parsed()) {
            run_rep(weights, output);
        } else if (metrics->parsed()) {
            run_metrics(ref, test);
        } else if (nr->parsed()) {
            run_nr_metrics(input);
        } else if (loss->parsed()) {
            run_loss(ref, test);
        } else if (bench->parsed()) {
            run_bench(weights, width, height, iters, warmup, seed);
        } else if (init->parsed()) {
            run_init_demo(output, preset, seed);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const uwe::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const uwe::ModeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMode;
    } catch (const uwe::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const uwe::Error& e) {
        // ShapeError, ConfigError and anything else structural.
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    }
    return 0;
}

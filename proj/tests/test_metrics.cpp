#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>

#include "test_support.hpp"
#include "uwe/color.hpp"
#include "uwe/metrics.hpp"

using namespace uwe;

namespace {

Tensor constant_rgb(float r, float g, float b, int h = 16, int w = 16) {
    Tensor t(1, 3, h, w);
    std::fill(t.plane(0, 0), t.plane(0, 0) + t.plane_size(), r);
    std::fill(t.plane(0, 1), t.plane(0, 1) + t.plane_size(), g);
    std::fill(t.plane(0, 2), t.plane(0, 2) + t.plane_size(), b);
    return t;
}

// Naive SSIM oracle: per-window double loops, no separable shortcut.
double oracle_ssim(const Tensor& ref, const Tensor& test) {
    constexpr int win = 11;
    constexpr double sigma = 1.5;
    constexpr double c1 = 1e-4;
    constexpr double c2 = 9e-4;
    const int h = ref.height;
    const int w = ref.width;

    std::array<std::array<double, win>, win> kernel{};
    double ksum = 0.0;
    for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
            const double dy = i - 5.0;
            const double dx = j - 5.0;
            kernel[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            ksum += kernel[i][j];
        }
    }
    for (auto& row : kernel) {
        for (double& v : row) {
            v /= ksum;
        }
    }

    auto luma = [](const Tensor& t, int y, int x) {
        return 0.2126 * t.at(0, 0, y, x) + 0.7152 * t.at(0, 1, y, x) + 0.0722 * t.at(0, 2, y, x);
    };

    double total = 0.0;
    int count = 0;
    for (int y = 0; y + win <= h; ++y) {
        for (int x = 0; x + win <= w; ++x) {
            double ma = 0.0, mb = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int i = 0; i < win; ++i) {
                for (int j = 0; j < win; ++j) {
                    const double a = luma(ref, y + i, x + j);
                    const double b = luma(test, y + i, x + j);
                    ma += kernel[i][j] * a;
                    mb += kernel[i][j] * b;
                    aa += kernel[i][j] * a * a;
                    bb += kernel[i][j] * b * b;
                    ab += kernel[i][j] * a * b;
                }
            }
            const double va = aa - ma * ma;
            const double vb = bb - mb * mb;
            const double cov = ab - ma * mb;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / count;
}

// Brute-force UIQM oracle: plain block loops, full sort for the trimming.
double oracle_uiqm(const Tensor& img) {
    const int h = img.height;
    const int w = img.width;
    const std::int64_t n = img.plane_size();

    std::vector<double> rg, yb;
    for (std::int64_t i = 0; i < n; ++i) {
        rg.push_back(img.plane(0, 0)[i] - img.plane(0, 1)[i]);
        yb.push_back(0.5 * (img.plane(0, 0)[i] + img.plane(0, 1)[i]) - img.plane(0, 2)[i]);
    }
    auto trimmed = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::int64_t t = static_cast<std::int64_t>(std::floor(0.1 * v.size()));
        double s = 0.0;
        for (std::int64_t i = t; i < static_cast<std::int64_t>(v.size()) - t; ++i) {
            s += v[static_cast<std::size_t>(i)];
        }
        return s / static_cast<double>(v.size() - 2 * t);
    };
    auto var_about = [](const std::vector<double>& v, double mu) {
        double s = 0.0;
        for (double x : v) {
            s += (x - mu) * (x - mu);
        }
        return s / static_cast<double>(v.size());
    };
    const double mu_rg = trimmed(rg);
    const double mu_yb = trimmed(yb);
    const double uicm = -0.0268 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb) +
                        0.1586 * std::sqrt(var_about(rg, mu_rg) + var_about(yb, mu_yb));

    auto at = [&](int c, int y, int x) -> double {
        if (y < 0 || y >= h || x < 0 || x >= w) {
            return 0.0;
        }
        return img.at(0, c, y, x);
    };
    const int k2 = h / 8;
    const int k1 = w / 8;
    double uism = 0.0;
    const double lambda[3] = {0.299, 0.587, 0.114};
    for (int c = 0; c < 3; ++c) {
        std::vector<double> edge(static_cast<std::size_t>(h) * w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double gx = -at(c, y - 1, x - 1) + at(c, y - 1, x + 1) - 2 * at(c, y, x - 1) +
                                  2 * at(c, y, x + 1) - at(c, y + 1, x - 1) + at(c, y + 1, x + 1);
                const double gy = -at(c, y - 1, x - 1) - 2 * at(c, y - 1, x) - at(c, y - 1, x + 1) +
                                  at(c, y + 1, x - 1) + 2 * at(c, y + 1, x) + at(c, y + 1, x + 1);
                edge[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy) * img.at(0, c, y, x);
            }
        }
        double acc = 0.0;
        for (int by = 0; by < k2; ++by) {
            for (int bx = 0; bx < k1; ++bx) {
                double mx = edge[static_cast<std::size_t>(by * 8) * w + bx * 8];
                double mn = mx;
                for (int y = by * 8; y < by * 8 + 8; ++y) {
                    for (int x = bx * 8; x < bx * 8 + 8; ++x) {
                        mx = std::max(mx, edge[static_cast<std::size_t>(y) * w + x]);
                        mn = std::min(mn, edge[static_cast<std::size_t>(y) * w + x]);
                    }
                }
                if (mn > 0.0 && mx > 0.0) {
                    acc += std::log(mx / mn);
                }
            }
        }
        uism += lambda[c] * (2.0 / (k1 * k2)) * acc;
    }

    double conm_acc = 0.0;
    for (int by = 0; by < k2; ++by) {
        for (int bx = 0; bx < k1; ++bx) {
            double mx = img.at(0, 0, by * 8, bx * 8);
            double mn = mx;
            for (int c = 0; c < 3; ++c) {
                for (int y = by * 8; y < by * 8 + 8; ++y) {
                    for (int x = bx * 8; x < bx * 8 + 8; ++x) {
                        mx = std::max(mx, static_cast<double>(img.at(0, c, y, x)));
                        mn = std::min(mn, static_cast<double>(img.at(0, c, y, x)));
                    }
                }
            }
            const double top = mx - mn;
            const double bot = mx + mn;
            if (top > 0.0 && bot > 0.0) {
                conm_acc += (top / bot) * std::log(top / bot);
            }
        }
    }
    const double uiconm = -conm_acc / (k1 * k2);

    return 0.0282 * uicm + 0.2953 * uism + 3.5753 * uiconm;
}

// Separable 5-tap Gaussian-ish blur used only to build a softer pattern.
Tensor blur(const Tensor& img) {
    const float k[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};
    Tensor tmp = img;
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                float acc = 0.0f;
                for (int i = -2; i <= 2; ++i) {
                    const int xx = std::clamp(x + i, 0, img.width - 1);
                    acc += k[i + 2] * img.at(0, c, y, xx);
                }
                tmp.at(0, c, y, x) = acc;
            }
        }
    }
    Tensor out = tmp;
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                float acc = 0.0f;
                for (int i = -2; i <= 2; ++i) {
                    const int yy = std::clamp(y + i, 0, img.height - 1);
                    acc += k[i + 2] * tmp.at(0, c, yy, x);
                }
                out.at(0, c, y, x) = acc;
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("psnr basics") {
    const Tensor a = constant_rgb(0.3f, 0.5f, 0.7f);
    CHECK(psnr(a, a) == doctest::Approx(99.0));

    Tensor b = a;
    for (float& v : b.data) {
        v += 0.1f;
    }
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));

    const Tensor zeros = constant_rgb(0.0f, 0.0f, 0.0f);
    const Tensor ones = constant_rgb(1.0f, 1.0f, 1.0f);
    CHECK(psnr(zeros, ones) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(psnr(a, Tensor(1, 3, 4, 4)), ShapeError);
}

TEST_CASE("psnr decreases strictly with noise amplitude") {
    std::mt19937 rng(3);
    const Tensor base = testsup::random_tensor(rng, 1, 3, 16, 16);
    double prev = psnr(base, base);
    for (float amp : {0.01f, 0.03f, 0.1f, 0.3f}) {
        Tensor noisy = base;
        for (std::size_t i = 0; i < noisy.data.size(); ++i) {
            noisy.data[i] += (i % 2 == 0 ? amp : -amp);
        }
        const double value = psnr(base, noisy);
        CHECK(value < prev);
        prev = value;
    }
}

TEST_CASE("ssim of identical images is 1") {
    std::mt19937 rng(5);
    const Tensor a = testsup::random_tensor(rng, 1, 3, 16, 16);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim is symmetric") {
    std::mt19937 rng(7);
    const Tensor a = testsup::random_tensor(rng, 1, 3, 14, 14);
    const Tensor b = testsup::random_tensor(rng, 1, 3, 14, 14);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-9));
}

TEST_CASE("ssim closed form for two constant images") {
    const Tensor a = constant_rgb(0.5f, 0.5f, 0.5f);
    const Tensor b = constant_rgb(0.6f, 0.6f, 0.6f);
    CHECK(ssim(a, b) == doctest::Approx(0.98361).epsilon(1e-4));
}

TEST_CASE("ssim on an inverted high-contrast pattern is low and matches the oracle") {
    Tensor pattern(1, 3, 32, 32);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                pattern.at(0, c, y, x) = ((x / 4 + y / 4) % 2 == 0) ? 0.9f : 0.1f;
            }
        }
    }
    Tensor inverted = pattern;
    for (float& v : inverted.data) {
        v = 1.0f - v;
    }
    const double got = ssim(pattern, inverted);
    CHECK(got < 0.3);
    CHECK(got == doctest::Approx(oracle_ssim(pattern, inverted)).epsilon(1e-6));

    std::mt19937 rng(11);
    const Tensor a = testsup::random_tensor(rng, 1, 3, 18, 15);
    const Tensor b = testsup::random_tensor(rng, 1, 3, 18, 15);
    CHECK(ssim(a, b) == doctest::Approx(oracle_ssim(a, b)).epsilon(1e-6));
}

TEST_CASE("ssim rejects images smaller than the window") {
    const Tensor small(1, 3, 8, 8);
    CHECK_THROWS_AS(ssim(small, small), ShapeError);
}

TEST_CASE("uciqe follows the fixed linear combination") {
    CHECK(uciqe_from_components(0.197, 0.490, 0.787) == doctest::Approx(0.429).epsilon(0.005));
    CHECK(uciqe_from_components(0.271, 0.781, 0.839) == doctest::Approx(0.5573).epsilon(0.002));

    std::mt19937 rng(13);
    const UciqeComponents c = uciqe(testsup::random_tensor(rng, 1, 3, 32, 32));
    CHECK(c.uciqe ==
          doctest::Approx(0.4680 * c.sigma_c + 0.2745 * c.con_l + 0.2576 * c.mu_s).epsilon(1e-12));
}

TEST_CASE("uciqe of a constant gray image is zero") {
    const UciqeComponents c = uciqe(constant_rgb(0.5f, 0.5f, 0.5f));
    CHECK(c.sigma_c == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.con_l == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.mu_s == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.uciqe == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("uciqe components land in their conventional ranges on a varied image") {
    std::mt19937 rng(17);
    const UciqeComponents c = uciqe(testsup::random_tensor(rng, 1, 3, 64, 64));
    CHECK(c.sigma_c >= 0.0);
    CHECK(c.sigma_c <= 1.0);
    CHECK(c.con_l >= 0.0);
    CHECK(c.con_l <= 1.0);
    CHECK(c.mu_s >= 0.0);
    CHECK(c.mu_s <= 1.0);
}

TEST_CASE("uiqm of a constant gray image is zero") {
    CHECK(uiqm(constant_rgb(0.4f, 0.4f, 0.4f)) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("uiqm components of a constant color image") {
    // Featureless image: no edges, no contrast. The colorfulness term reduces
    // to -0.0268*sqrt(mu_RG^2 + mu_YB^2) with mu_RG = r-g and mu_YB = (r+g)/2-b.
    const UiqmComponents c = uiqm_components(constant_rgb(0.2f, 0.6f, 0.9f));
    const double mu_rg = 0.2 - 0.6;
    const double mu_yb = 0.5 * (0.2 + 0.6) - 0.9;
    CHECK(c.uicm ==
          doctest::Approx(-0.0268 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb)).epsilon(1e-5));
    CHECK(c.uism == doctest::Approx(0.0).epsilon(1e-9));
    // Contrast blocks span the channels jointly, so every block sees the same
    // spread: top/bot = (0.9-0.2)/(0.9+0.2).
    const double ratio = 0.7 / 1.1;
    CHECK(c.uiconm == doctest::Approx(-ratio * std::log(ratio)).epsilon(1e-5));
}

TEST_CASE("sharp high-frequency lattice scores higher UISM than its blurred version") {
    // Sum of period-3 sinusoids: the discrete gradient never vanishes, so the
    // blockwise max/min ratios are well conditioned on both sides of the blur.
    Tensor pattern(1, 3, 64, 64);
    constexpr double kTau = 6.28318530717958647692;
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                pattern.at(0, c, y, x) = static_cast<float>(
                    0.5 + 0.3 * std::sin(kTau * x / 3.0) + 0.15 * std::sin(kTau * y / 3.0));
            }
        }
    }
    const UiqmComponents sharp = uiqm_components(pattern);
    const UiqmComponents soft = uiqm_components(blur(pattern));
    CHECK(sharp.uism > soft.uism);
}

TEST_CASE("uiqm matches the brute-force oracle on random images") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 3; ++trial) {
        const Tensor img = testsup::random_tensor(rng, 1, 3, 64, 64);
        CHECK(uiqm(img) == doctest::Approx(oracle_uiqm(img)).epsilon(1e-5));
    }
    // Non-multiple-of-8 sizes drop the partial blocks.
    const Tensor odd = testsup::random_tensor(rng, 1, 3, 37, 29);
    CHECK(uiqm(odd) == doctest::Approx(oracle_uiqm(odd)).epsilon(1e-5));
}

TEST_CASE("uiqm rejects images smaller than one block") {
    CHECK_THROWS_AS(uiqm(Tensor(1, 3, 4, 4)), ShapeError);
}

TEST_CASE("ciede2000 basics") {
    const Lab p{50.0, 2.6772, -79.7751};
    const Lab q{50.0, 0.0, -82.7485};
    CHECK(ciede2000(p, p) == doctest::Approx(0.0));
    CHECK(ciede2000(p, q) == doctest::Approx(2.0425).epsilon(1e-4));
    CHECK(ciede2000(p, q) == doctest::Approx(ciede2000(q, p)).epsilon(1e-12));

    std::mt19937 rng(29);
    std::uniform_real_distribution<double> l_dist(0.0, 100.0);
    std::uniform_real_distribution<double> ab_dist(-80.0, 80.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Lab a{l_dist(rng), ab_dist(rng), ab_dist(rng)};
        const Lab b{l_dist(rng), ab_dist(rng), ab_dist(rng)};
        const double d = ciede2000(a, b);
        CHECK(d >= 0.0);
        CHECK(d == doctest::Approx(ciede2000(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("ciede2000_image reduces to the scalar op on constant images") {
    const Tensor a = constant_rgb(0.5f, 0.5f, 0.5f);
    const Tensor b = constant_rgb(0.6f, 0.5f, 0.4f);
    CHECK(ciede2000_image(a, a) == doctest::Approx(0.0));
    const double expected =
        ciede2000(srgb_to_lab(0.5, 0.5, 0.5), srgb_to_lab(0.6f, 0.5f, 0.4f));
    CHECK(ciede2000_image(a, b) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ciede2000_image is the mean of per-pixel values") {
    Tensor a(1, 3, 1, 2);
    Tensor b(1, 3, 1, 2);
    a.data = {0.2f, 0.8f, 0.4f, 0.4f, 0.6f, 0.6f}; // planes: r={0.2,0.8} g={0.4,0.4} b={0.6,0.6}
    b.data = {0.3f, 0.7f, 0.5f, 0.3f, 0.5f, 0.7f};
    const double d0 = ciede2000(srgb_to_lab(0.2f, 0.4f, 0.6f), srgb_to_lab(0.3f, 0.5f, 0.5f));
    const double d1 = ciede2000(srgb_to_lab(0.8f, 0.4f, 0.6f), srgb_to_lab(0.7f, 0.3f, 0.7f));
    CHECK(ciede2000_image(a, b) == doctest::Approx(0.5 * (d0 + d1)).epsilon(1e-9));
}

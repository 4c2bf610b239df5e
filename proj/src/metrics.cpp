#include "uwe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace uwe {

namespace {

constexpr double kPsnrCap = 99.0;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": image shapes differ");
    }
}

void require_rgb(const Tensor& image, const char* op) {
    if (image.channels != 3) {
        throw ShapeError(std::string(op) + ": expected a 3-channel image");
    }
}

std::vector<float> to_luminance(const Tensor& t, int n) {
    std::vector<float> y(static_cast<std::size_t>(t.plane_size()));
    if (t.channels == 1) {
        const float* p = t.plane(n, 0);
        std::copy(p, p + t.plane_size(), y.begin());
    } else {
        const float* r = t.plane(n, 0);
        const float* g = t.plane(n, 1);
        const float* b = t.plane(n, 2);
        for (std::int64_t i = 0; i < t.plane_size(); ++i) {
            y[static_cast<std::size_t>(i)] = rec709_luminance(r[i], g[i], b[i]);
        }
    }
    return y;
}

// Separable blur of a plane with an arbitrary 1-D kernel, valid region only.
std::vector<double> valid_filter(const std::vector<double>& img, int h, int w,
                                 const std::vector<double>& k) {
    const int r = static_cast<int>(k.size());
    const int wv = w - r + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * wv, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < wv; ++x) {
            double acc = 0.0;
            for (int i = 0; i < r; ++i) {
                acc += k[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(y) * w + x + i];
            }
            tmp[static_cast<std::size_t>(y) * wv + x] = acc;
        }
    }
    const int hv = h - r + 1;
    std::vector<double> out(static_cast<std::size_t>(hv) * wv, 0.0);
    for (int y = 0; y < hv; ++y) {
        for (int x = 0; x < wv; ++x) {
            double acc = 0.0;
            for (int i = 0; i < r; ++i) {
                acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * wv + x];
            }
            out[static_cast<std::size_t>(y) * wv + x] = acc;
        }
    }
    return out;
}

double mean_of_extremes(std::vector<float>& values, std::int64_t k, bool top) {
    if (top) {
        std::nth_element(values.begin(), values.end() - k, values.end());
        return std::accumulate(values.end() - k, values.end(), 0.0) / static_cast<double>(k);
    }
    std::nth_element(values.begin(), values.begin() + k, values.end());
    return std::accumulate(values.begin(), values.begin() + k, 0.0) / static_cast<double>(k);
}

// ---- UIQM helpers -------------------------------------------------------

constexpr int kUiqmBlock = 8;

double trimmed_mean(std::vector<float> values, double alpha) {
    std::sort(values.begin(), values.end());
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    const std::int64_t t = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(n)));
    double sum = 0.0;
    for (std::int64_t i = t; i < n - t; ++i) {
        sum += values[static_cast<std::size_t>(i)];
    }
    return sum / static_cast<double>(n - 2 * t);
}

double variance_about(const std::vector<float>& values, double mu) {
    double acc = 0.0;
    for (float v : values) {
        const double d = v - mu;
        acc += d * d;
    }
    return acc / static_cast<double>(values.size());
}

std::vector<float> sobel_magnitude(const float* plane, int h, int w) {
    std::vector<float> mag(static_cast<std::size_t>(h) * w, 0.0f);
    auto px = [&](int y, int x) -> double {
        if (y < 0 || y >= h || x < 0 || x >= w) {
            return 0.0; // zero padding at the border
        }
        return plane[static_cast<std::int64_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = -px(y - 1, x - 1) + px(y - 1, x + 1) - 2.0 * px(y, x - 1) +
                              2.0 * px(y, x + 1) - px(y + 1, x - 1) + px(y + 1, x + 1);
            const double gy = -px(y - 1, x - 1) - 2.0 * px(y - 1, x) - px(y - 1, x + 1) +
                              px(y + 1, x - 1) + 2.0 * px(y + 1, x) + px(y + 1, x + 1);
            mag[static_cast<std::size_t>(y) * w + x] = static_cast<float>(std::sqrt(gx * gx + gy * gy));
        }
    }
    return mag;
}

// EME over full blocks: (2/blocks) * sum ln(max/min), zero-valued blocks skipped.
double eme(const std::vector<float>& plane, int h, int w) {
    const int k2 = h / kUiqmBlock;
    const int k1 = w / kUiqmBlock;
    double acc = 0.0;
    for (int by = 0; by < k2; ++by) {
        for (int bx = 0; bx < k1; ++bx) {
            float mx = plane[static_cast<std::size_t>(by * kUiqmBlock) * w + bx * kUiqmBlock];
            float mn = mx;
            for (int y = by * kUiqmBlock; y < (by + 1) * kUiqmBlock; ++y) {
                for (int x = bx * kUiqmBlock; x < (bx + 1) * kUiqmBlock; ++x) {
                    const float v = plane[static_cast<std::size_t>(y) * w + x];
                    mx = std::max(mx, v);
                    mn = std::min(mn, v);
                }
            }
            if (mn > 0.0f && mx > 0.0f) {
                acc += std::log(static_cast<double>(mx) / static_cast<double>(mn));
            }
        }
    }
    return 2.0 / (static_cast<double>(k1) * k2) * acc;
}

} // namespace

double uciqe_from_components(double sigma_c, double con_l, double mu_s) {
    return 0.4680 * sigma_c + 0.2745 * con_l + 0.2576 * mu_s;
}

double psnr(const Tensor& ref, const Tensor& test) {
    require_same_shape(ref, test, "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        const double d = static_cast<double>(ref.data[i]) - test.data[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(ref.data.size());
    if (mse <= 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Tensor& ref, const Tensor& test) {
    require_same_shape(ref, test, "ssim");
    constexpr int kWindow = 11;
    constexpr double kSigma = 1.5;
    constexpr double c1 = 0.01 * 0.01; // (K1*L)^2, L = 1
    constexpr double c2 = 0.03 * 0.03;
    if (ref.height < kWindow || ref.width < kWindow) {
        throw ShapeError("ssim: image smaller than the 11x11 window");
    }

    std::vector<double> kernel(kWindow);
    double ksum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - (kWindow - 1) / 2.0;
        kernel[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        ksum += kernel[static_cast<std::size_t>(i)];
    }
    for (double& v : kernel) {
        v /= ksum;
    }

    const int h = ref.height;
    const int w = ref.width;
    double total = 0.0;
    std::int64_t windows = 0;
    for (int n = 0; n < ref.batch; ++n) {
        const std::vector<float> ya = to_luminance(ref, n);
        const std::vector<float> yb = to_luminance(test, n);
        std::vector<double> a(ya.begin(), ya.end());
        std::vector<double> b(yb.begin(), yb.end());
        std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            aa[i] = a[i] * a[i];
            bb[i] = b[i] * b[i];
            ab[i] = a[i] * b[i];
        }
        const std::vector<double> mu_a = valid_filter(a, h, w, kernel);
        const std::vector<double> mu_b = valid_filter(b, h, w, kernel);
        const std::vector<double> e_aa = valid_filter(aa, h, w, kernel);
        const std::vector<double> e_bb = valid_filter(bb, h, w, kernel);
        const std::vector<double> e_ab = valid_filter(ab, h, w, kernel);

        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            const double va = e_aa[i] - mu_a[i] * mu_a[i];
            const double vb = e_bb[i] - mu_b[i] * mu_b[i];
            const double cov = e_ab[i] - mu_a[i] * mu_b[i];
            total += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
                     ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
        }
        windows += static_cast<std::int64_t>(mu_a.size());
    }
    return total / static_cast<double>(windows);
}

UciqeComponents uciqe(const Tensor& image) {
    require_rgb(image, "uciqe");
    const std::int64_t n = static_cast<std::int64_t>(image.batch) * image.plane_size();

    std::vector<float> lum(static_cast<std::size_t>(n));
    double chroma_sum = 0.0;
    double chroma_sq = 0.0;
    double sat_sum = 0.0;
    std::int64_t idx = 0;
    for (int bi = 0; bi < image.batch; ++bi) {
        const float* r = image.plane(bi, 0);
        const float* g = image.plane(bi, 1);
        const float* b = image.plane(bi, 2);
        for (std::int64_t i = 0; i < image.plane_size(); ++i) {
            const Lab lab = srgb_to_lab(r[i], g[i], b[i]);
            const double chroma = std::sqrt(lab.a * lab.a + lab.b * lab.b) / 100.0;
            chroma_sum += chroma;
            chroma_sq += chroma * chroma;
            lum[static_cast<std::size_t>(idx++)] = static_cast<float>(lab.l);
            sat_sum += hsv_saturation(r[i], g[i], b[i]);
        }
    }

    const double chroma_mean = chroma_sum / static_cast<double>(n);
    const double chroma_var = std::max(0.0, chroma_sq / static_cast<double>(n) - chroma_mean * chroma_mean);

    const std::int64_t k = std::max<std::int64_t>(1, n / 100);
    const double l_top = mean_of_extremes(lum, k, true);
    const double l_bottom = mean_of_extremes(lum, k, false);

    UciqeComponents out;
    out.sigma_c = std::sqrt(chroma_var);
    out.con_l = (l_top - l_bottom) / 100.0;
    out.mu_s = sat_sum / static_cast<double>(n);
    out.uciqe = uciqe_from_components(out.sigma_c, out.con_l, out.mu_s);
    return out;
}

UiqmComponents uiqm_components(const Tensor& image) {
    require_rgb(image, "uiqm");
    if (image.height < kUiqmBlock || image.width < kUiqmBlock) {
        throw ShapeError("uiqm: image smaller than one 8x8 block");
    }
    const int h = image.height;
    const int w = image.width;
    const std::int64_t n = static_cast<std::int64_t>(image.batch) * image.plane_size();

    // UICM: alpha-trimmed means of the opponent channels, variance about them.
    std::vector<float> rg(static_cast<std::size_t>(n));
    std::vector<float> yb(static_cast<std::size_t>(n));
    std::int64_t idx = 0;
    for (int bi = 0; bi < image.batch; ++bi) {
        const float* r = image.plane(bi, 0);
        const float* g = image.plane(bi, 1);
        const float* b = image.plane(bi, 2);
        for (std::int64_t i = 0; i < image.plane_size(); ++i) {
            rg[static_cast<std::size_t>(idx)] = r[i] - g[i];
            yb[static_cast<std::size_t>(idx)] = 0.5f * (r[i] + g[i]) - b[i];
            ++idx;
        }
    }
    const double mu_rg = trimmed_mean(rg, 0.1);
    const double mu_yb = trimmed_mean(yb, 0.1);
    const double var_rg = variance_about(rg, mu_rg);
    const double var_yb = variance_about(yb, mu_yb);
    const double uicm =
        -0.0268 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb) + 0.1586 * std::sqrt(var_rg + var_yb);

    // UISM: Sobel-weighted EME per channel, Rec.601-style channel weights.
    double uism = 0.0;
    const double lambda[3] = {0.299, 0.587, 0.114};
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int bi = 0; bi < image.batch; ++bi) {
            const float* plane = image.plane(bi, c);
            std::vector<float> edge = sobel_magnitude(plane, h, w);
            for (std::size_t i = 0; i < edge.size(); ++i) {
                edge[i] *= plane[i];
            }
            acc += eme(edge, h, w);
        }
        uism += lambda[c] * acc / static_cast<double>(image.batch);
    }

    // UIConM: logAMEE over joint-channel blocks.
    double conm = 0.0;
    const int k2 = h / kUiqmBlock;
    const int k1 = w / kUiqmBlock;
    for (int bi = 0; bi < image.batch; ++bi) {
        double acc = 0.0;
        for (int by = 0; by < k2; ++by) {
            for (int bx = 0; bx < k1; ++bx) {
                float mx = image.at(bi, 0, by * kUiqmBlock, bx * kUiqmBlock);
                float mn = mx;
                for (int c = 0; c < 3; ++c) {
                    const float* plane = image.plane(bi, c);
                    for (int y = by * kUiqmBlock; y < (by + 1) * kUiqmBlock; ++y) {
                        for (int x = bx * kUiqmBlock; x < (bx + 1) * kUiqmBlock; ++x) {
                            const float v = plane[static_cast<std::int64_t>(y) * w + x];
                            mx = std::max(mx, v);
                            mn = std::min(mn, v);
                        }
                    }
                }
                const double top = static_cast<double>(mx) - mn;
                const double bot = static_cast<double>(mx) + mn;
                if (top > 0.0 && bot > 0.0) {
                    acc += (top / bot) * std::log(top / bot);
                }
            }
        }
        conm += -acc / (static_cast<double>(k1) * k2);
    }
    conm /= static_cast<double>(image.batch);

    UiqmComponents out;
    out.uicm = uicm;
    out.uism = uism;
    out.uiconm = conm;
    out.uiqm = 0.0282 * uicm + 0.2953 * uism + 3.5753 * conm;
    return out;
}

double uiqm(const Tensor& image) {
    return uiqm_components(image).uiqm;
}

double ciede2000(const Lab& lab1, const Lab& lab2) {
    constexpr double kPi = 3.14159265358979323846;
    const double c1 = std::sqrt(lab1.a * lab1.a + lab1.b * lab1.b);
    const double c2 = std::sqrt(lab2.a * lab2.a + lab2.b * lab2.b);
    const double c_bar = 0.5 * (c1 + c2);

    const double c_bar7 = std::pow(c_bar, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));

    const double a1p = (1.0 + g) * lab1.a;
    const double a2p = (1.0 + g) * lab2.a;
    const double c1p = std::sqrt(a1p * a1p + lab1.b * lab1.b);
    const double c2p = std::sqrt(a2p * a2p + lab2.b * lab2.b);

    auto hue = [&](double ap, double b) {
        if (ap == 0.0 && b == 0.0) {
            return 0.0;
        }
        double hp = std::atan2(b, ap);
        if (hp < 0.0) {
            hp += 2.0 * kPi;
        }
        return hp;
    };
    const double h1p = hue(a1p, lab1.b);
    const double h2p = hue(a2p, lab2.b);

    const double dl = lab2.l - lab1.l;
    const double dc = c2p - c1p;

    double dhp = 0.0;
    if (c1p * c2p != 0.0) {
        dhp = h2p - h1p;
        if (dhp > kPi) {
            dhp -= 2.0 * kPi;
        } else if (dhp < -kPi) {
            dhp += 2.0 * kPi;
        }
    }
    const double dh = 2.0 * std::sqrt(c1p * c2p) * std::sin(0.5 * dhp);

    const double l_bar = 0.5 * (lab1.l + lab2.l);
    const double cp_bar = 0.5 * (c1p + c2p);

    double hp_bar = h1p + h2p;
    if (c1p * c2p != 0.0) {
        hp_bar *= 0.5;
        if (std::fabs(h1p - h2p) > kPi) {
            hp_bar += (hp_bar < kPi) ? kPi : -kPi;
        }
    }

    const double t = 1.0 - 0.17 * std::cos(hp_bar - kPi / 6.0) + 0.24 * std::cos(2.0 * hp_bar) +
                     0.32 * std::cos(3.0 * hp_bar + kPi / 30.0) -
                     0.20 * std::cos(4.0 * hp_bar - 63.0 * kPi / 180.0);

    const double l50 = (l_bar - 50.0) * (l_bar - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * cp_bar;
    const double sh = 1.0 + 0.015 * cp_bar * t;

    const double hp_deg = hp_bar * 180.0 / kPi;
    const double dtheta = 30.0 * std::exp(-((hp_deg - 275.0) / 25.0) * ((hp_deg - 275.0) / 25.0));
    const double cp_bar7 = std::pow(cp_bar, 7.0);
    const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
    const double rt = -std::sin(2.0 * dtheta * kPi / 180.0) * rc;

    const double tl = dl / sl;
    const double tc = dc / sc;
    const double th = dh / sh;
    return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

double ciede2000_image(const Tensor& ref, const Tensor& test) {
    require_same_shape(ref, test, "ciede2000_image");
    require_rgb(ref, "ciede2000_image");
    double acc = 0.0;
    for (int n = 0; n < ref.batch; ++n) {
        const float* r1 = ref.plane(n, 0);
        const float* g1 = ref.plane(n, 1);
        const float* b1 = ref.plane(n, 2);
        const float* r2 = test.plane(n, 0);
        const float* g2 = test.plane(n, 1);
        const float* b2 = test.plane(n, 2);
        for (std::int64_t i = 0; i < ref.plane_size(); ++i) {
            acc += ciede2000(srgb_to_lab(r1[i], g1[i], b1[i]), srgb_to_lab(r2[i], g2[i], b2[i]));
        }
    }
    return acc / (static_cast<double>(ref.batch) * ref.plane_size());
}

} // namespace uwe

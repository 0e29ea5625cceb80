#include "csdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "csdr/edt.hpp"

namespace csdr {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_image(const Tensor& t, const char* who) {
    if (t.channels != 1 || t.height < 1 || t.width < 1)
        throw std::invalid_argument(std::string(who) + ": expected a 1xHxW image");
}

void check_pair(const Tensor& a, const Tensor& b, const char* who) {
    check_image(a, who);
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

void check_maps(const BinaryFeatureMap& a, const BinaryFeatureMap& b, const char* who) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument(std::string(who) + ": feature map shape mismatch");
}

// symmetric reflection: index -1 maps to 0, index n maps to n-1
int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

std::vector<double> gauss_kernel(double sigma) {
    const int radius = int(std::ceil(3.0 * sigma));
    std::vector<double> k(std::size_t(2 * radius) + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        k[std::size_t(t + radius)] = std::exp(-0.5 * t * t / (sigma * sigma));
        sum += k[std::size_t(t + radius)];
    }
    for (double& v : k) v /= sum;
    return k;
}

std::vector<double> blur2d(const std::vector<double>& img, int h, int w, double sigma) {
    const std::vector<double> k = gauss_kernel(sigma);
    const int radius = int(k.size() / 2);
    std::vector<double> tmp(img.size()), out(img.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += k[std::size_t(t + radius)] * img[std::size_t(i) * w + reflect(j + t, w)];
            tmp[std::size_t(i) * w + j] = acc;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += k[std::size_t(t + radius)] * tmp[std::size_t(reflect(i + t, h)) * w + j];
            out[std::size_t(i) * w + j] = acc;
        }
    return out;
}

std::vector<double> to_double(const Tensor& t) {
    return std::vector<double>(t.data.begin(), t.data.end());
}

} // namespace

const char* to_string(FeatureSource source) {
    switch (source) {
    case FeatureSource::canny: return "canny";
    case FeatureSource::frangi: return "frangi";
    case FeatureSource::synthetic_truth: return "synthetic_truth";
    }
    return "unknown";
}

std::size_t BinaryFeatureMap::count() const {
    return std::size_t(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

double rnmse(const Tensor& recon, const Tensor& reference) {
    check_pair(recon, reference, "rnmse");
    const std::size_t n = reference.data.size();
    double mean = 0.0;
    for (const float v : reference.data) mean += double(v);
    mean /= double(n);
    double var = 0.0, se = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double dev = double(reference.data[p]) - mean;
        var += dev * dev;
        const double diff = double(recon.data[p]) - double(reference.data[p]);
        se += diff * diff;
    }
    if (var == 0.0) throw std::invalid_argument("rnmse: reference image is constant");
    return std::sqrt(se / double(n)) / std::sqrt(var / double(n));
}

double psnr(const Tensor& recon, const Tensor& reference) {
    check_pair(recon, reference, "psnr");
    double se = 0.0;
    for (std::size_t p = 0; p < recon.data.size(); ++p) {
        const double diff = double(recon.data[p]) - double(reference.data[p]);
        se += diff * diff;
    }
    const double mse = se / double(recon.data.size());
    if (mse == 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Tensor& recon, const Tensor& reference) {
    check_pair(recon, reference, "ssim");
    const int h = recon.height, w = recon.width, win = 11, radius = 5;
    if (h < win || w < win) throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    const std::vector<double> k = gauss_kernel(1.5); // radius ceil(4.5) = 5 -> 11 taps
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    std::size_t windows = 0;
    for (int i0 = radius; i0 < h - radius; ++i0) {
        for (int j0 = radius; j0 < w - radius; ++j0) {
            double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int di = -radius; di <= radius; ++di) {
                const double wi = k[std::size_t(di + radius)];
                const std::size_t row = std::size_t(i0 + di) * w + j0;
                for (int dj = -radius; dj <= radius; ++dj) {
                    const double wgt = wi * k[std::size_t(dj + radius)];
                    const double x = double(recon.data[row + dj]);
                    const double y = double(reference.data[row + dj]);
                    mx += wgt * x;
                    my += wgt * y;
                    sxx += wgt * x * x;
                    syy += wgt * y * y;
                    sxy += wgt * x * y;
                }
            }
            const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return total / double(windows);
}

Tensor gaussian_blur(const Tensor& image, double sigma) {
    check_image(image, "gaussian_blur");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
    const std::vector<double> out = blur2d(to_double(image), image.height, image.width, sigma);
    Tensor t(1, image.height, image.width);
    for (std::size_t p = 0; p < out.size(); ++p) t.data[p] = float(out[p]);
    return t;
}

BinaryFeatureMap canny_edges(const Tensor& image) {
    check_image(image, "canny_edges");
    const int h = image.height, w = image.width;
    const std::size_t n = std::size_t(h) * w;
    const std::vector<double> smooth = blur2d(to_double(image), h, w, 1.5);

    std::vector<double> gx(n), gy(n), mag(n);
    auto at = [&](int i, int j) { return smooth[std::size_t(reflect(i, h)) * w + reflect(j, w)]; };
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            gx[p] = (at(i - 1, j + 1) + 2.0 * at(i, j + 1) + at(i + 1, j + 1)) -
                    (at(i - 1, j - 1) + 2.0 * at(i, j - 1) + at(i + 1, j - 1));
            gy[p] = (at(i + 1, j - 1) + 2.0 * at(i + 1, j) + at(i + 1, j + 1)) -
                    (at(i - 1, j - 1) + 2.0 * at(i - 1, j) + at(i - 1, j + 1));
            mag[p] = std::hypot(gx[p], gy[p]);
        }

    BinaryFeatureMap map;
    map.height = h;
    map.width = w;
    map.bits.assign(n, 0);
    map.source = FeatureSource::canny;

    std::vector<double> nonzero;
    nonzero.reserve(n);
    for (const double m : mag)
        if (m > 0.0) nonzero.push_back(m);
    if (nonzero.empty()) return map; // flat image: no edges
    std::sort(nonzero.begin(), nonzero.end());
    auto nearest_rank = [&](double q) {
        const int idx = int(std::ceil(q / 100.0 * double(nonzero.size()))) - 1;
        return nonzero[std::size_t(std::max(0, std::min(int(nonzero.size()) - 1, idx)))];
    };
    const double lo = nearest_rank(70.0), hi = nearest_rank(90.0);

    // non-maximum suppression along the gradient direction (4 bins);
    // neighbors outside the frame count as zero magnitude
    std::vector<std::uint8_t> keep(n, 0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            if (mag[p] < lo) continue;
            double theta = std::atan2(gy[p], gx[p]);
            if (theta < 0.0) theta += kPi;
            int di, dj;
            if (theta < kPi / 8.0 || theta >= 7.0 * kPi / 8.0) {
                di = 0;
                dj = 1;
            } else if (theta < 3.0 * kPi / 8.0) {
                di = 1;
                dj = 1;
            } else if (theta < 5.0 * kPi / 8.0) {
                di = 1;
                dj = 0;
            } else {
                di = 1;
                dj = -1;
            }
            auto mag_at = [&](int ii, int jj) {
                return (ii < 0 || ii >= h || jj < 0 || jj >= w) ? 0.0
                                                               : mag[std::size_t(ii) * w + jj];
            };
            if (mag[p] > mag_at(i + di, j + dj) && mag[p] >= mag_at(i - di, j - dj)) keep[p] = 1;
        }

    // hysteresis: grow 8-connected from strong pixels through weak ones
    std::vector<std::size_t> stack;
    for (std::size_t p = 0; p < n; ++p)
        if (keep[p] && mag[p] >= hi) {
            map.bits[p] = 1;
            stack.push_back(p);
        }
    while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const int i = int(p / w), j = int(p % w);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= h || jj < 0 || jj >= w) continue;
                const std::size_t q = std::size_t(ii) * w + jj;
                if (keep[q] && !map.bits[q]) {
                    map.bits[q] = 1;
                    stack.push_back(q);
                }
            }
    }
    return map;
}

Tensor frangi_response(const Tensor& image) {
    check_image(image, "frangi_response");
    const int h = image.height, w = image.width;
    const std::size_t n = std::size_t(h) * w;
    const std::vector<double> base = to_double(image);
    const double beta = 0.5;

    std::vector<double> response(n, 0.0);
    std::vector<double> l1(n), l2(n);
    for (const double sigma : {1.0, 1.5, 2.0}) {
        const std::vector<double> b = blur2d(base, h, w, sigma);
        auto at = [&](int i, int j) { return b[std::size_t(reflect(i, h)) * w + reflect(j, w)]; };
        double s_max = 0.0;
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                // scale-normalized Hessian (gamma = 2): second differences
                // times sigma^2
                const double s2 = sigma * sigma;
                const double hxx = s2 * (at(i, j - 1) - 2.0 * at(i, j) + at(i, j + 1));
                const double hyy = s2 * (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j));
                const double hxy = s2 * 0.25 *
                                   (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) +
                                    at(i - 1, j - 1));
                const double half_tr = 0.5 * (hxx + hyy);
                const double root = std::hypot(0.5 * (hxx - hyy), hxy);
                double la = half_tr - root, lb = half_tr + root;
                if (std::abs(la) > std::abs(lb)) std::swap(la, lb); // |l1| <= |l2|
                const std::size_t p = std::size_t(i) * w + j;
                l1[p] = la;
                l2[p] = lb;
                s_max = std::max(s_max, std::hypot(la, lb));
            }
        if (s_max == 0.0) continue;
        const double c = s_max / 2.0;
        for (std::size_t p = 0; p < n; ++p) {
            if (!(l2[p] < 0.0)) continue; // bright ridges only
            const double rb = l1[p] / l2[p];
            const double s = std::hypot(l1[p], l2[p]);
            const double v = std::exp(-0.5 * rb * rb / (beta * beta)) *
                             (1.0 - std::exp(-0.5 * s * s / (c * c)));
            response[p] = std::max(response[p], v);
        }
    }
    Tensor out(1, h, w);
    for (std::size_t p = 0; p < n; ++p) out.data[p] = float(response[p]);
    return out;
}

BinaryFeatureMap frangi_ridges(const Tensor& image) {
    const int h = image.height, w = image.width;
    const std::size_t n = std::size_t(h) * w;
    const Tensor resp = frangi_response(image);
    std::vector<double> response(n);
    for (std::size_t p = 0; p < n; ++p) response[p] = double(resp.data[p]);

    BinaryFeatureMap map;
    map.height = h;
    map.width = w;
    map.bits.assign(n, 0);
    map.source = FeatureSource::frangi;

    const double vmax = *std::max_element(response.begin(), response.end());
    if (vmax <= 0.0) return map;
    auto bin_of = [&](double v) { return std::min(255, int(v / vmax * 256.0)); };

    // Otsu's threshold over the nonzero responses
    std::vector<std::int64_t> hist(256, 0);
    std::int64_t total = 0;
    for (const double v : response)
        if (v > 0.0) {
            ++hist[std::size_t(bin_of(v))];
            ++total;
        }
    double total_sum = 0.0;
    for (int b = 0; b < 256; ++b) total_sum += double(b) * double(hist[std::size_t(b)]);
    int best_k = 0;
    double best_var = -1.0, w0 = 0.0, sum0 = 0.0;
    for (int k = 0; k < 256; ++k) {
        w0 += double(hist[std::size_t(k)]);
        sum0 += double(k) * double(hist[std::size_t(k)]);
        const double w1 = double(total) - w0;
        double var = 0.0;
        if (w0 > 0.0 && w1 > 0.0) {
            const double mu0 = sum0 / w0, mu1 = (total_sum - sum0) / w1;
            var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        }
        if (var > best_var) {
            best_var = var;
            best_k = k;
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (response[p] > 0.0 && bin_of(response[p]) > best_k) map.bits[p] = 1;
    return map;
}

BinaryFeatureMap dilate(const BinaryFeatureMap& map, double radius) {
    if (radius < 0.0) throw std::invalid_argument("dilate: radius must be >= 0");
    const std::vector<double> d2 = squared_edt(map.bits.data(), map.height, map.width);
    BinaryFeatureMap out = map;
    for (std::size_t p = 0; p < d2.size(); ++p) out.bits[p] = d2[p] <= radius * radius ? 1 : 0;
    return out;
}

double iou(const BinaryFeatureMap& a, const BinaryFeatureMap& b) {
    check_maps(a, b, "iou");
    std::int64_t inter = 0, uni = 0;
    for (std::size_t p = 0; p < a.bits.size(); ++p) {
        inter += a.bits[p] && b.bits[p];
        uni += a.bits[p] || b.bits[p];
    }
    if (uni == 0) return 1.0; // both empty: perfect agreement
    return double(inter) / double(uni);
}

double f1(const BinaryFeatureMap& prediction, const BinaryFeatureMap& reference, double radius) {
    check_maps(prediction, reference, "f1");
    const std::size_t np = prediction.count(), nr = reference.count();
    if (np == 0 && nr == 0) return 1.0;
    if (np == 0 || nr == 0) return 0.0;
    const BinaryFeatureMap ref_zone = dilate(reference, radius);
    const BinaryFeatureMap pred_zone = dilate(prediction, radius);
    std::int64_t tp_p = 0, tp_r = 0;
    for (std::size_t p = 0; p < prediction.bits.size(); ++p) {
        tp_p += prediction.bits[p] && ref_zone.bits[p];
        tp_r += reference.bits[p] && pred_zone.bits[p];
    }
    const double precision = double(tp_p) / double(np);
    const double recall = double(tp_r) / double(nr);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double hausdorff(const BinaryFeatureMap& a, const BinaryFeatureMap& b) {
    check_maps(a, b, "hausdorff");
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff: undefined for an empty feature map");
    const std::vector<double> da = squared_edt(a.bits.data(), a.height, a.width);
    const std::vector<double> db = squared_edt(b.bits.data(), b.height, b.width);
    double worst = 0.0;
    for (std::size_t p = 0; p < a.bits.size(); ++p) {
        if (a.bits[p]) worst = std::max(worst, db[p]);
        if (b.bits[p]) worst = std::max(worst, da[p]);
    }
    return std::sqrt(worst);
}

double coverage_within(const BinaryFeatureMap& detected,
                       const std::vector<std::uint8_t>& reference_bits, double radius) {
    if (reference_bits.size() != detected.bits.size())
        throw std::invalid_argument("coverage_within: size mismatch");
    std::int64_t n_ref = 0, covered = 0;
    const std::vector<double> d2 = squared_edt(detected.bits.data(), detected.height,
                                               detected.width);
    for (std::size_t p = 0; p < reference_bits.size(); ++p) {
        if (!reference_bits[p]) continue;
        ++n_ref;
        covered += d2[p] <= radius * radius;
    }
    if (n_ref == 0) return 1.0;
    return double(covered) / double(n_ref);
}

Tensor ridge_overlay(const BinaryFeatureMap& prediction, const BinaryFeatureMap& reference,
                     double radius) {
    check_maps(prediction, reference, "ridge_overlay");
    const BinaryFeatureMap ref_zone = dilate(reference, radius);
    const BinaryFeatureMap pred_zone = dilate(prediction, radius);
    Tensor out(1, prediction.height, prediction.width);
    for (std::size_t p = 0; p < prediction.bits.size(); ++p) {
        float v = 0.0f;
        if (prediction.bits[p])
            v = ref_zone.bits[p] ? 1.0f : float(2.0 / 3.0);
        else if (reference.bits[p] && !pred_zone.bits[p])
            v = float(1.0 / 3.0);
        out.data[p] = v;
    }
    return out;
}

} // namespace csdr

#include "csdr/edt.hpp"

#include <stdexcept>

namespace csdr {
namespace {

// 1-D squared distance transform under the lower envelope of the parabolas
// q -> (x - q)^2 + f[q]. v holds parabola apices, z the envelope breakpoints.
void dt1d(const double* f, double* d, int* v, double* z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -kEdtNoFeature;
    z[1] = kEdtNoFeature;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kEdtNoFeature;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = double(q) - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

std::vector<double> squared_edt(const std::uint8_t* bits, int height, int width) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("squared_edt: empty shape");
    std::vector<double> dist(std::size_t(height) * width);
    int n = std::max(height, width);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    // pass 1: per column, distance along the column
    for (int j = 0; j < width; ++j) {
        for (int i = 0; i < height; ++i)
            f[i] = bits[std::size_t(i) * width + j] ? 0.0 : kEdtNoFeature;
        dt1d(f.data(), d.data(), v.data(), z.data(), height);
        for (int i = 0; i < height; ++i) dist[std::size_t(i) * width + j] = d[i];
    }
    // pass 2: per row, combine with horizontal offsets
    for (int i = 0; i < height; ++i) {
        double* row = dist.data() + std::size_t(i) * width;
        for (int j = 0; j < width; ++j) f[j] = row[j];
        dt1d(f.data(), d.data(), v.data(), z.data(), width);
        for (int j = 0; j < width; ++j) row[j] = std::min(d[j], kEdtNoFeature);
    }
    return dist;
}

std::vector<double> squared_edt(const std::vector<std::uint8_t>& bits, int height,
                                int width) {
    if (bits.size() != std::size_t(height) * width)
        throw std::invalid_argument("squared_edt: size mismatch");
    return squared_edt(bits.data(), height, width);
}

std::vector<std::int32_t> nearest_feature(const std::uint8_t* bits, int height, int width) {
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("nearest_feature: empty shape");
    const std::size_t n_px = std::size_t(height) * width;
    // pass 1: nearest feature row within each column (two sweeps)
    std::vector<std::int32_t> near_row(n_px, -1);
    for (int j = 0; j < width; ++j) {
        std::int32_t last = -1;
        for (int i = 0; i < height; ++i) {
            if (bits[std::size_t(i) * width + j]) last = i;
            near_row[std::size_t(i) * width + j] = last;
        }
        last = -1;
        for (int i = height - 1; i >= 0; --i) {
            const std::size_t p = std::size_t(i) * width + j;
            if (bits[p]) last = i;
            if (last >= 0 && (near_row[p] < 0 || last - i < i - near_row[p])) near_row[p] = last;
        }
    }
    // pass 2: per row, lower envelope over columns; the winning parabola's
    // apex identifies the source column
    std::vector<std::int32_t> out(n_px, -1);
    std::vector<double> f(width), z(width + 1);
    std::vector<int> v(width);
    for (int i = 0; i < height; ++i) {
        const std::int32_t* nr = near_row.data() + std::size_t(i) * width;
        for (int j = 0; j < width; ++j) {
            const double d = nr[j] < 0 ? kEdtNoFeature : double(i - nr[j]) * (i - nr[j]);
            f[j] = std::min(d, kEdtNoFeature);
        }
        int k = 0;
        v[0] = 0;
        z[0] = -kEdtNoFeature;
        z[1] = kEdtNoFeature;
        for (int q = 1; q < width; ++q) {
            double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                       (2.0 * q - 2.0 * v[k]);
            while (s <= z[k]) {
                --k;
                s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                    (2.0 * q - 2.0 * v[k]);
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kEdtNoFeature;
        }
        k = 0;
        for (int q = 0; q < width; ++q) {
            while (z[k + 1] < q) ++k;
            const int src_col = v[k];
            const std::int32_t src_row = nr[src_col];
            if (src_row >= 0) out[std::size_t(i) * width + q] = src_row * width + src_col;
        }
    }
    return out;
}

} // namespace csdr

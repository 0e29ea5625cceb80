#include "csdr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "csdr/delaunay.hpp"
#include "csdr/edt.hpp"

namespace csdr {
namespace {

void check_shapes(const Tensor& y, const MeasurementMask& mask) {
    if (y.channels != 1 || y.height != mask.height || y.width != mask.width)
        throw std::invalid_argument("baseline: image/mask shape mismatch");
}

} // namespace

Tensor interp_linear(const Tensor& y, const MeasurementMask& mask) {
    check_shapes(y, mask);
    const int h = mask.height, w = mask.width;

    std::vector<LatticePoint> pts;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            if (mask.bits[std::size_t(i) * w + j]) pts.push_back({j, i});
    const Triangulation tri = triangulate(pts); // throws when < 3 non-collinear

    Tensor out = y;
    std::vector<std::uint8_t> claimed = mask.bits;
    auto value_at = [&](const LatticePoint& p) {
        return double(y.at(0, p.y, p.x));
    };
    for (const auto& t : tri.triangles) {
        const LatticePoint a = tri.points[t[0]], b = tri.points[t[1]], c = tri.points[t[2]];
        const double den = double(orient2d(a, b, c)); // > 0, CCW
        const double va = value_at(a), vb = value_at(b), vc = value_at(c);
        const int i_lo = std::min({a.y, b.y, c.y}), i_hi = std::max({a.y, b.y, c.y});
        const int j_lo = std::min({a.x, b.x, c.x}), j_hi = std::max({a.x, b.x, c.x});
        for (int i = i_lo; i <= i_hi; ++i) {
            for (int j = j_lo; j <= j_hi; ++j) {
                const std::size_t p = std::size_t(i) * w + j;
                if (claimed[p]) continue;
                const LatticePoint q{j, i};
                const std::int64_t wa = orient2d(b, c, q);
                const std::int64_t wb = orient2d(c, a, q);
                const std::int64_t wc = orient2d(a, b, q);
                if (wa < 0 || wb < 0 || wc < 0) continue;
                out.data[p] = float((double(wa) * va + double(wb) * vb + double(wc) * vc) / den);
                claimed[p] = 1;
            }
        }
    }
    // outside the hull: nearest measured value
    bool any_left = false;
    for (std::size_t p = 0; p < claimed.size(); ++p)
        if (!claimed[p]) {
            any_left = true;
            break;
        }
    if (any_left) {
        const std::vector<std::int32_t> src = nearest_feature(mask.bits.data(), h, w);
        for (std::size_t p = 0; p < claimed.size(); ++p)
            if (!claimed[p]) out.data[p] = y.data[std::size_t(src[p])];
    }
    return out;
}

Tensor interp_idw(const Tensor& y, const MeasurementMask& mask, const IdwConfig& config) {
    check_shapes(y, mask);
    if (config.k < 1) throw std::invalid_argument("idw: k must be >= 1");
    if (!(config.p > 0.0)) throw std::invalid_argument("idw: power must be > 0");
    const int h = mask.height, w = mask.width;

    struct Site {
        int i, j;
        std::size_t idx;
        float value;
    };
    std::vector<Site> sites;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            if (mask.bits[p]) sites.push_back({i, j, p, y.data[p]});
        }
    if (sites.empty()) throw std::invalid_argument("idw: empty mask");

    // bucket grid with cell width near the expected site spacing
    const double spacing = std::sqrt(double(h) * w / double(sites.size()));
    const int cell = std::max(1, int(spacing));
    const int gh = (h + cell - 1) / cell, gw = (w + cell - 1) / cell;
    std::vector<std::vector<int>> buckets(std::size_t(gh) * gw);
    for (int s = 0; s < int(sites.size()); ++s)
        buckets[std::size_t(sites[s].i / cell) * gw + sites[s].j / cell].push_back(s);

    const int k = std::min<int>(config.k, int(sites.size()));
    struct Cand {
        std::int64_t d2;
        std::size_t idx;
        float value;
        bool operator<(const Cand& o) const {
            return d2 != o.d2 ? d2 < o.d2 : idx < o.idx;
        }
    };
    std::vector<Cand> best;
    best.reserve(std::size_t(k) + 1);

    Tensor out = y;
    const int max_ring = std::max(gh, gw);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            if (mask.bits[p]) continue;
            best.clear();
            const int bi = i / cell, bj = j / cell;
            for (int r = 0; r <= max_ring; ++r) {
                // ring of buckets at Chebyshev distance r
                for (int di = -r; di <= r; ++di) {
                    const int ci = bi + di;
                    if (ci < 0 || ci >= gh) continue;
                    const int step = (di == -r || di == r) ? 1 : 2 * r;
                    for (int dj = -r; dj <= r; dj += step == 0 ? 1 : step) {
                        const int cj = bj + dj;
                        if (cj < 0 || cj >= gw) continue;
                        for (const int s : buckets[std::size_t(ci) * gw + cj]) {
                            const Site& site = sites[std::size_t(s)];
                            const std::int64_t di_px = site.i - i, dj_px = site.j - j;
                            const Cand cand{di_px * di_px + dj_px * dj_px, site.idx, site.value};
                            const auto pos = std::lower_bound(best.begin(), best.end(), cand);
                            if (pos - best.begin() < k) {
                                best.insert(pos, cand);
                                if (int(best.size()) > k) best.pop_back();
                            }
                        }
                    }
                }
                if (int(best.size()) >= k &&
                    best.back().d2 <= std::int64_t(r) * cell * std::int64_t(r) * cell)
                    break;
            }
            if (best.front().d2 == 0) {
                out.data[p] = best.front().value; // exact hit
                continue;
            }
            double wsum = 0.0, vsum = 0.0;
            for (const Cand& c : best) {
                const double wgt = 1.0 / std::pow(double(c.d2), config.p / 2.0);
                wsum += wgt;
                vsum += wgt * double(c.value);
            }
            out.data[p] = float(vsum / wsum);
        }
    }
    return out;
}

namespace {

// truncated 5-point Laplacian: second differences only where both neighbors
// are in frame
void apply_l(const std::vector<double>& u, std::vector<double>& lu, int h, int w) {
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            double acc = 0.0;
            if (i >= 1 && i + 1 < h) acc += u[p - w] + u[p + w] - 2.0 * u[p];
            if (j >= 1 && j + 1 < w) acc += u[p - 1] + u[p + 1] - 2.0 * u[p];
            lu[p] = acc;
        }
    }
}

// transpose of apply_l
void apply_lt(const std::vector<double>& v, std::vector<double>& ltv, int h, int w) {
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t p = std::size_t(i) * w + j;
            const int axes = int(i >= 1 && i + 1 < h) + int(j >= 1 && j + 1 < w);
            double acc = -2.0 * axes * v[p];
            if (i >= 2) acc += v[p - w];
            if (i + 2 < h) acc += v[p + w];
            if (j >= 2) acc += v[p - 1];
            if (j + 2 < w) acc += v[p + 1];
            ltv[p] = acc;
        }
    }
}

} // namespace

BiharmonicResult interp_biharmonic_full(const Tensor& y, const MeasurementMask& mask) {
    check_shapes(y, mask);
    const int h = mask.height, w = mask.width;
    if (h < 3 || w < 3) throw std::invalid_argument("biharmonic: image smaller than 3x3");
    if (mask.count() == 0) throw std::invalid_argument("biharmonic: empty mask");

    const std::size_t n_px = std::size_t(h) * w;
    std::vector<std::size_t> unknown;
    for (std::size_t p = 0; p < n_px; ++p)
        if (!mask.bits[p]) unknown.push_back(p);

    BiharmonicResult res;
    res.image = y;
    if (unknown.empty()) return res;

    std::vector<double> u(n_px), tmp_l(n_px), tmp_lt(n_px);
    // K v = L^T L v with the field v embedded at unknowns, zero elsewhere
    auto apply_k_restricted = [&](const std::vector<double>& x, std::vector<double>& out_v,
                                  std::vector<double>& field) {
        std::fill(field.begin(), field.end(), 0.0);
        for (std::size_t q = 0; q < unknown.size(); ++q) field[unknown[q]] = x[q];
        apply_l(field, tmp_l, h, w);
        apply_lt(tmp_l, tmp_lt, h, w);
        for (std::size_t q = 0; q < unknown.size(); ++q) out_v[q] = tmp_lt[unknown[q]];
    };

    // rhs: b = -K u_measured at the unknowns
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t p = 0; p < n_px; ++p)
        if (mask.bits[p]) u[p] = double(y.data[p]);
    apply_l(u, tmp_l, h, w);
    apply_lt(tmp_l, tmp_lt, h, w);
    const std::size_t n = unknown.size();
    std::vector<double> b(n);
    for (std::size_t q = 0; q < n; ++q) b[q] = -tmp_lt[unknown[q]];

    // Jacobi preconditioner: diag(K) = c_p^2 + number of neighbor rows whose
    // truncated stencil reaches p
    std::vector<double> inv_diag(n);
    for (std::size_t q = 0; q < n; ++q) {
        const int i = int(unknown[q] / w), j = int(unknown[q] % w);
        const int axes = int(i >= 1 && i + 1 < h) + int(j >= 1 && j + 1 < w);
        double d = 4.0 * axes * axes;
        if (i >= 2) d += 1.0;
        if (i + 2 < h) d += 1.0;
        if (j >= 2) d += 1.0;
        if (j + 2 < w) d += 1.0;
        inv_diag[q] = 1.0 / d;
    }

    // warm start from the nearest measured value
    std::vector<double> x(n);
    {
        const std::vector<std::int32_t> src = nearest_feature(mask.bits.data(), h, w);
        for (std::size_t q = 0; q < n; ++q) x[q] = double(y.data[std::size_t(src[unknown[q]])]);
    }

    const double b_norm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    const double solve_tol = 1e-8;  // iteration target
    const double accept_tol = 1e-6; // documented contract; miss -> degraded
    const int max_iters = 100000;
    std::vector<double> r(n), z(n), d(n), kd(n), field(n_px);

    apply_k_restricted(x, kd, field);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - kd[q];
    double rz = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        z[q] = inv_diag[q] * r[q];
        rz += r[q] * z[q];
    }
    d = z;
    int it = 0;
    auto norm = [](const std::vector<double>& v) {
        return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    };
    const double target = b_norm > 0.0 ? solve_tol * b_norm : 0.0;
    while (it < max_iters && norm(r) > target) {
        apply_k_restricted(d, kd, field);
        double dkd = 0.0;
        for (std::size_t q = 0; q < n; ++q) dkd += d[q] * kd[q];
        if (dkd <= 0.0) break; // K is PSD; a null direction means we are done
        const double alpha = rz / dkd;
        for (std::size_t q = 0; q < n; ++q) {
            x[q] += alpha * d[q];
            r[q] -= alpha * kd[q];
        }
        double rz_next = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            z[q] = inv_diag[q] * r[q];
            rz_next += r[q] * z[q];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t q = 0; q < n; ++q) d[q] = z[q] + beta * d[q];
        ++it;
    }

    // true residual, not the CG recurrence
    apply_k_restricted(x, kd, field);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - kd[q];
    const double final_norm = norm(r);
    res.iterations = it;
    res.residual = b_norm > 0.0 ? final_norm / b_norm : final_norm;
    res.converged = final_norm <= (b_norm > 0.0 ? accept_tol * b_norm : 1e-12);
    for (std::size_t q = 0; q < n; ++q) res.image.data[unknown[q]] = float(x[q]);
    return res;
}

Tensor interp_biharmonic(const Tensor& y, const MeasurementMask& mask) {
    return interp_biharmonic_full(y, mask).image;
}

} // namespace csdr

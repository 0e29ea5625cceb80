// Classical-reconstruction tests: exact distance transforms, the integer
// Delaunay triangulation with its geometric certificates, and the three
// interpolators (piecewise linear, inverse-distance, biharmonic).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "csdr/baselines.hpp"
#include "csdr/delaunay.hpp"
#include "csdr/edt.hpp"
#include "csdr/masking.hpp"
#include "csdr/rng.hpp"

using namespace csdr;

namespace {

std::vector<double> brute_force_edt(const std::vector<std::uint8_t>& bits, int h, int w) {
    std::vector<double> out(std::size_t(h) * w, kEdtNoFeature);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double best = kEdtNoFeature;
            for (int fi = 0; fi < h; ++fi)
                for (int fj = 0; fj < w; ++fj)
                    if (bits[std::size_t(fi) * w + fj]) {
                        const double d2 = double(i - fi) * (i - fi) + double(j - fj) * (j - fj);
                        best = std::min(best, d2);
                    }
            out[std::size_t(i) * w + j] = best;
        }
    return out;
}

// convex hull of lattice points (monotone chain, collinear points dropped)
std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
    std::sort(pts.begin(), pts.end(), [](LatticePoint a, LatticePoint b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](LatticePoint a, LatticePoint b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<LatticePoint> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient2d(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && orient2d(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::int64_t double_area(const std::vector<LatticePoint>& poly) {
    std::int64_t a = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const LatticePoint p = poly[i], q = poly[(i + 1) % poly.size()];
        a += std::int64_t(p.x) * q.y - std::int64_t(q.x) * p.y;
    }
    return a;
}

// certificate checks shared by all triangulation tests
void check_delaunay(const Triangulation& tri) {
    const auto& P = tri.points;
    REQUIRE(P.size() >= 3);
    REQUIRE(!tri.triangles.empty());

    std::int64_t tri_area2 = 0;
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : tri.triangles) {
        const LatticePoint a = P[std::size_t(t[0])], b = P[std::size_t(t[1])],
                           c = P[std::size_t(t[2])];
        CHECK(orient2d(a, b, c) > 0); // CCW, non-degenerate
        tri_area2 += orient2d(a, b, c);
        for (int e = 0; e < 3; ++e) {
            int u = t[std::size_t(e)], v = t[std::size_t((e + 1) % 3)];
            if (u > v) std::swap(u, v);
            ++edge_use[{u, v}];
        }
        // empty circumcircle: no input point strictly inside
        for (int p = 0; p < int(P.size()); ++p) {
            if (p == t[0] || p == t[1] || p == t[2]) continue;
            CHECK(incircle_sign(a, b, c, P[std::size_t(p)]) <= 0);
        }
    }

    const auto hull = convex_hull(P);
    CHECK(tri_area2 == double_area(hull)); // triangles tile the hull exactly

    // Euler's formula needs every point on the hull boundary, including
    // points collinear with (and between) strict hull vertices.
    int on_boundary = 0;
    for (const auto& p : P) {
        bool hit = false;
        for (std::size_t i = 0; i < hull.size() && !hit; ++i) {
            const LatticePoint u = hull[i], w = hull[(i + 1) % hull.size()];
            if (orient2d(u, w, p) != 0) continue;
            if (std::min(u.x, w.x) <= p.x && p.x <= std::max(u.x, w.x) &&
                std::min(u.y, w.y) <= p.y && p.y <= std::max(u.y, w.y))
                hit = true;
        }
        if (hit) ++on_boundary;
    }
    CHECK(int(tri.triangles.size()) == 2 * int(P.size()) - 2 - on_boundary);

    int boundary_edges = 0;
    for (const auto& [e, uses] : edge_use) {
        CHECK(uses <= 2);
        if (uses == 1) ++boundary_edges;
    }
    CHECK(boundary_edges == on_boundary);
}

MeasurementMask manual_mask(int h, int w, const std::vector<std::pair<int, int>>& on) {
    MeasurementMask m;
    m.height = h;
    m.width = w;
    m.bits.assign(std::size_t(h) * w, 0);
    for (auto [i, j] : on) m.bits[std::size_t(i) * w + j] = 1;
    return m;
}

Tensor ramp_image(int h, int w, float a, float b, float c) {
    Tensor t(1, h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) t.at(0, i, j) = a + b * float(i) + c * float(j);
    return t;
}

} // namespace

TEST_CASE("squared EDT matches brute force on random maps") {
    Rng rng(17);
    for (const auto& [h, w] : {std::pair{13, 21}, {1, 32}, {32, 1}, {7, 7}}) {
        for (double density : {0.02, 0.2, 0.7}) {
            std::vector<std::uint8_t> bits(std::size_t(h) * w, 0);
            for (auto& v : bits) v = rng.next_double() < density ? 1 : 0;
            const auto fast = squared_edt(bits, h, w);
            const auto slow = brute_force_edt(bits, h, w);
            REQUIRE(fast.size() == slow.size());
            for (std::size_t k = 0; k < fast.size(); ++k) CHECK(fast[k] == slow[k]);
        }
    }
}

TEST_CASE("squared EDT edge cases") {
    // single feature pixel: exact squared distances
    std::vector<std::uint8_t> one(25, 0);
    one[12] = 1; // (2,2) of 5x5
    const auto d = squared_edt(one, 5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(d[std::size_t(i) * 5 + j] == double((i - 2) * (i - 2) + (j - 2) * (j - 2)));

    // all features -> zero everywhere
    std::vector<std::uint8_t> full(12, 1);
    for (double v : squared_edt(full, 3, 4)) CHECK(v == 0.0);

    // no features -> sentinel everywhere
    std::vector<std::uint8_t> empty(12, 0);
    for (double v : squared_edt(empty, 3, 4)) CHECK(v == kEdtNoFeature);

    CHECK_THROWS_AS(squared_edt(empty, 0, 12), std::invalid_argument);
    CHECK_THROWS_AS(squared_edt(empty, 4, 4), std::invalid_argument); // size mismatch
}

TEST_CASE("nearest_feature returns the exact argmin with deterministic ties") {
    Rng rng(23);
    const int h = 11, w = 17;
    std::vector<std::uint8_t> bits(std::size_t(h) * w, 0);
    for (auto& v : bits) v = rng.next_double() < 0.1 ? 1 : 0;
    bits[0] = 1; // guarantee nonempty
    const auto nf = nearest_feature(bits.data(), h, w);
    const auto d2 = squared_edt(bits, h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const std::int32_t idx = nf[std::size_t(i) * w + j];
            REQUIRE(idx >= 0);
            REQUIRE(idx < h * w);
            CHECK(bits[std::size_t(idx)] == 1);
            const int fi = idx / w, fj = idx % w;
            const double dist = double(i - fi) * (i - fi) + double(j - fj) * (j - fj);
            CHECK(dist == d2[std::size_t(i) * w + j]); // it is an argmin
        }

    // tie resolution: cross-column ties keep the smaller source column,
    // within-column ties keep the smaller source row
    std::vector<std::uint8_t> tie(9, 0);
    tie[2] = 1; // (0,2)
    tie[6] = 1; // (2,0)
    const auto tnf = nearest_feature(tie.data(), 3, 3);
    CHECK(tnf[4] == 6); // (1,1) is distance^2 2 from both; column 0 wins

    std::vector<std::uint8_t> tie2(9, 0);
    tie2[0] = 1; // (0,0)
    tie2[2] = 1; // (0,2)
    const auto tnf2 = nearest_feature(tie2.data(), 3, 3);
    CHECK(tnf2[1] == 0); // (0,1) equidistant; smaller column wins

    std::vector<std::uint8_t> tie3(9, 0);
    tie3[1] = 1; // (0,1)
    tie3[7] = 1; // (2,1)
    const auto tnf3 = nearest_feature(tie3.data(), 3, 3);
    CHECK(tnf3[4] == 1); // same column; smaller row wins

    std::vector<std::uint8_t> none(9, 0);
    const auto nnf = nearest_feature(none.data(), 3, 3);
    for (auto v : nnf) CHECK(v == -1);
}

TEST_CASE("orientation and incircle predicates are exact") {
    CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) > 0);
    CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) < 0);
    CHECK(orient2d({0, 0}, {2, 2}, {5, 5}) == 0);
    CHECK(orient2d({0, 0}, {1 << 20, 0}, {0, 1 << 20}) > 0);

    const LatticePoint a{0, 0}, b{2, 0}, c{0, 2};
    CHECK(incircle_sign(a, b, c, {1, 1}) == 1);  // circumcenter itself
    CHECK(incircle_sign(a, b, c, {2, 2}) == 0);  // cocircular
    CHECK(incircle_sign(a, b, c, {3, 3}) == -1); // outside
    CHECK(incircle_sign(a, b, c, {1, 0}) == 1);  // on an edge, inside the circle
}

TEST_CASE("triangulation of random point sets satisfies the Delaunay certificates") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        Rng rng(seed);
        std::vector<LatticePoint> pts;
        for (int k = 0; k < 80; ++k)
            pts.push_back({std::int32_t(rng.below(200)), std::int32_t(rng.below(150))});
        Triangulation tri = triangulate(pts);
        check_delaunay(tri);

        // deterministic under input permutation (points are canonicalized)
        std::vector<LatticePoint> shuffled = pts;
        shuffle(shuffled, rng);
        Triangulation tri2 = triangulate(shuffled);
        CHECK(tri.points.size() == tri2.points.size());
        CHECK(tri.triangles == tri2.triangles);
    }
}

TEST_CASE("triangulation of a regular grid is deterministic despite cocircular ties") {
    std::vector<LatticePoint> pts;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) pts.push_back({j * 10, i * 10});
    Triangulation tri = triangulate(pts);
    check_delaunay(tri);
    CHECK(tri.points.size() == 16);
    CHECK(tri.triangles.size() == 18); // 2n - 2 - hull(12)

    Triangulation again = triangulate(pts);
    CHECK(tri.triangles == again.triangles);
}

TEST_CASE("triangulation handles duplicates and rejects degenerate inputs") {
    Triangulation tri =
        triangulate({{0, 0}, {0, 0}, {5, 0}, {0, 5}, {5, 0}});
    CHECK(tri.points.size() == 3);
    CHECK(tri.triangles.size() == 1);

    CHECK_THROWS_AS(triangulate({{0, 0}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(triangulate({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(triangulate({{0, 0}, {0, 0}, {0, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(triangulate({{(1 << 20) + 1, 0}, {1, 0}, {0, 1}}), std::invalid_argument);
    CHECK_NOTHROW(triangulate({{1 << 20, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("collinear-but-distinct inputs in general position still work") {
    // many points on two crossing lines: plenty of collinear triples
    std::vector<LatticePoint> pts;
    for (int k = 0; k < 12; ++k) {
        pts.push_back({k, k});
        pts.push_back({k, 11 - k});
    }
    Triangulation tri = triangulate(pts);
    check_delaunay(tri);
}

TEST_CASE("linear interpolation reproduces an affine ramp inside the hull") {
    // 46x46 with n=5: grid rows 0..45 span the whole frame
    const int n = 46;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{5});
    Tensor img = ramp_image(n, n, 0.05f, 0.013f, 0.007f);
    Tensor y = apply_mask(img, mask);
    Tensor out = interp_linear(y, mask);
    float max_err = 0.0f;
    for (std::size_t k = 0; k < out.size(); ++k)
        max_err = std::max(max_err, std::fabs(out.data[k] - img.data[k]));
    CHECK(max_err < 1e-5f);
    for (std::size_t k = 0; k < out.size(); ++k)
        if (mask.bits[k]) CHECK(out.data[k] == y.data[k]); // measured pass through
}

TEST_CASE("linear interpolation fills outside the hull with the nearest value") {
    // 48x48 with n=5: rows/cols 46,47 lie outside the hull of grid points
    const int n = 48;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{5});
    Tensor img = ramp_image(n, n, 0.0f, 0.01f, 0.0f); // varies along rows only
    Tensor y = apply_mask(img, mask);
    Tensor out = interp_linear(y, mask);
    // inside the hull the ramp is exact
    for (int i = 0; i <= 45; ++i)
        for (int j = 0; j <= 45; ++j)
            CHECK(out.at(0, i, j) == doctest::Approx(img.at(0, i, j)).epsilon(1e-5));
    // beyond the last grid row the nearest measured pixel sits on row 45
    for (int i = 46; i < 48; ++i)
        for (int j = 0; j <= 45; ++j)
            CHECK(out.at(0, i, j) == doctest::Approx(img.at(0, 45, 0)).epsilon(1e-5));
}

TEST_CASE("linear interpolation stays within the measured value range") {
    Rng rng(5);
    const int n = 32;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{4});
    Tensor img(1, n, n);
    for (auto& v : img.data) v = rng.next_float();
    Tensor y = apply_mask(img, mask);
    Tensor out = interp_linear(y, mask);
    float lo = 1.0f, hi = 0.0f;
    for (std::size_t k = 0; k < y.size(); ++k)
        if (mask.bits[k]) {
            lo = std::min(lo, y.data[k]);
            hi = std::max(hi, y.data[k]);
        }
    for (float v : out.data) {
        CHECK(v >= lo - 1e-6f);
        CHECK(v <= hi + 1e-6f);
    }
}

TEST_CASE("linear interpolation requires enough non-collinear measurements") {
    // a single measured row is collinear
    MeasurementMask row = manual_mask(8, 8, {{3, 1}, {3, 4}, {3, 6}});
    Tensor y(1, 8, 8);
    y.data[3 * 8 + 1] = 0.5f;
    CHECK_THROWS_AS(interp_linear(y, row), std::invalid_argument);
    MeasurementMask two = manual_mask(8, 8, {{1, 1}, {5, 5}});
    CHECK_THROWS_AS(interp_linear(y, two), std::invalid_argument);
    MeasurementMask none = manual_mask(8, 8, {});
    CHECK_THROWS_AS(interp_linear(y, none), std::invalid_argument);
    Tensor wrong(1, 4, 4);
    MeasurementMask ok = make_grid_mask(8, 8, GridMaskSpec{2});
    CHECK_THROWS_AS(interp_linear(wrong, ok), std::invalid_argument);
}

TEST_CASE("IDW recovers constants exactly and averages symmetric neighbors") {
    // constant image: every weighted average equals the constant bit-exactly
    const int n = 24;
    MeasurementMask mask = make_line_cut_mask(n, n, LineCutSpec{2, 2, 2, 2});
    Tensor img(1, n, n);
    img.fill(0.37f);
    Tensor y = apply_mask(img, mask);
    Tensor out = interp_idw(y, mask);
    for (float v : out.data) CHECK(v == 0.37f);

    // center of a 5x5 with 4 corner measurements at distance^2 8 each:
    // equal weights -> plain mean
    MeasurementMask corners = manual_mask(5, 5, {{0, 0}, {0, 4}, {4, 0}, {4, 4}});
    Tensor cy(1, 5, 5);
    cy.at(0, 0, 0) = 0.0f;
    cy.at(0, 0, 4) = 0.0f;
    cy.at(0, 4, 0) = 1.0f;
    cy.at(0, 4, 4) = 1.0f;
    IdwConfig cfg;
    cfg.k = 4;
    cfg.p = 2.0;
    Tensor cout = interp_idw(cy, corners, cfg);
    CHECK(cout.at(0, 2, 2) == 0.5f);
    // midpoints of the vertical edges: two near corners dominate equally
    CHECK(cout.at(0, 2, 0) == 0.5f);
    CHECK(cout.at(0, 2, 4) == 0.5f);
    // measured pixels pass through bit-exactly
    CHECK(cout.at(0, 0, 0) == 0.0f);
    CHECK(cout.at(0, 4, 4) == 1.0f);
}

TEST_CASE("IDW respects k and stays within the measured range") {
    Rng rng(6);
    const int n = 40;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{6});
    Tensor img(1, n, n);
    for (auto& v : img.data) v = rng.next_float();
    Tensor y = apply_mask(img, mask);
    for (int k : {1, 3, 8}) {
        IdwConfig cfg;
        cfg.k = k;
        Tensor out = interp_idw(y, mask, cfg);
        float lo = 1.0f, hi = 0.0f;
        for (std::size_t q = 0; q < y.size(); ++q)
            if (mask.bits[q]) {
                lo = std::min(lo, y.data[q]);
                hi = std::max(hi, y.data[q]);
            }
        for (float v : out.data) {
            CHECK(v >= lo - 1e-6f);
            CHECK(v <= hi + 1e-6f);
        }
    }

    // k = 1 equals the nearest measured value everywhere
    IdwConfig one;
    one.k = 1;
    Tensor nn = interp_idw(y, mask, one);
    const auto nf = nearest_feature(mask.bits.data(), n, n);
    for (std::size_t q = 0; q < nn.size(); ++q) CHECK(nn.data[q] == y.data[std::size_t(nf[q])]);

    MeasurementMask none = manual_mask(8, 8, {});
    Tensor z(1, 8, 8);
    CHECK_THROWS_AS(interp_idw(z, none), std::invalid_argument);
    IdwConfig bad;
    bad.k = 0;
    CHECK_THROWS_AS(interp_idw(y, mask, bad), std::invalid_argument);
    IdwConfig badp;
    badp.p = 0.0;
    CHECK_THROWS_AS(interp_idw(y, mask, badp), std::invalid_argument);
}

TEST_CASE("IDW distance ties break by row-major index deterministically") {
    // two measured pixels equidistant from the query with k=1: the smaller
    // row-major index must win
    MeasurementMask tie = manual_mask(3, 3, {{0, 1}, {2, 1}});
    Tensor y(1, 3, 3);
    y.at(0, 0, 1) = 0.2f;
    y.at(0, 2, 1) = 0.8f;
    IdwConfig cfg;
    cfg.k = 1;
    Tensor out = interp_idw(y, tie, cfg);
    CHECK(out.at(0, 1, 1) == 0.2f); // (0,1) has the smaller index
}

TEST_CASE("biharmonic interpolation is affine-exact on any mask") {
    const int n = 32;
    Tensor img = ramp_image(n, n, 0.1f, 0.009f, 0.014f);
    for (const MaskSpec& spec :
         {MaskSpec(GridMaskSpec{5}), MaskSpec(LineCutSpec{3, 3, 2, 2})}) {
        MeasurementMask mask = make_mask(n, n, spec);
        Tensor y = apply_mask(img, mask);
        BiharmonicResult res = interp_biharmonic_full(y, mask);
        CHECK(res.converged);
        CHECK(res.residual <= 1e-6);
        float max_err = 0.0f;
        for (std::size_t k = 0; k < img.size(); ++k)
            max_err = std::max(max_err, std::fabs(res.image.data[k] - img.data[k]));
        CHECK(max_err < 1e-4f);
        for (std::size_t k = 0; k < img.size(); ++k)
            if (mask.bits[k]) CHECK(res.image.data[k] == y.data[k]);
    }
}

TEST_CASE("biharmonic recovers constants through the warm start") {
    const int n = 20;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{7});
    Tensor img(1, n, n);
    img.fill(0.62f);
    Tensor y = apply_mask(img, mask);
    BiharmonicResult res = interp_biharmonic_full(y, mask);
    CHECK(res.converged);
    for (float v : res.image.data) CHECK(v == 0.62f);
}

TEST_CASE("biharmonic solution satisfies the interior stencil equation") {
    Rng rng(9);
    const int n = 28;
    MeasurementMask mask = make_grid_mask(n, n, GridMaskSpec{5});
    Tensor img(1, n, n);
    for (auto& v : img.data) v = rng.next_float();
    Tensor y = apply_mask(img, mask);
    BiharmonicResult res = interp_biharmonic_full(y, mask);
    REQUIRE(res.converged);
    CHECK(res.iterations > 0);
    CHECK(res.residual <= 1e-6);

    // the normal equations reduce to the 13-point biharmonic stencil at
    // unmeasured pixels at least two away from every border
    auto v = [&](int i, int j) { return double(res.image.at(0, i, j)); };
    for (int i = 2; i < n - 2; ++i)
        for (int j = 2; j < n - 2; ++j) {
            if (mask.bits[std::size_t(i) * n + j]) continue;
            const double lap4 = 20.0 * v(i, j) -
                                8.0 * (v(i - 1, j) + v(i + 1, j) + v(i, j - 1) + v(i, j + 1)) +
                                2.0 * (v(i - 1, j - 1) + v(i - 1, j + 1) + v(i + 1, j - 1) +
                                       v(i + 1, j + 1)) +
                                (v(i - 2, j) + v(i + 2, j) + v(i, j - 2) + v(i, j + 2));
            CHECK(std::fabs(lap4) < 1e-5);
        }
}

TEST_CASE("biharmonic rejects degenerate inputs") {
    Tensor y(1, 2, 8);
    MeasurementMask tiny = manual_mask(2, 8, {{0, 0}});
    CHECK_THROWS_AS(interp_biharmonic(y, tiny), std::invalid_argument);
    MeasurementMask none = manual_mask(8, 8, {});
    Tensor z(1, 8, 8);
    CHECK_THROWS_AS(interp_biharmonic(z, none), std::invalid_argument);
    Tensor wrong(1, 4, 4);
    MeasurementMask ok = make_grid_mask(8, 8, GridMaskSpec{2});
    CHECK_THROWS_AS(interp_biharmonic(wrong, ok), std::invalid_argument);
}

TEST_CASE("all baselines keep measured pixels bit-exactly on random data") {
    Rng rng(31);
    const int n = 36;
    Tensor img(1, n, n);
    for (auto& v : img.data) v = rng.next_float();
    for (const MaskSpec& spec :
         {MaskSpec(GridMaskSpec{4}), MaskSpec(LineCutSpec{3, 3, 3, 3})}) {
        MeasurementMask mask = make_mask(n, n, spec);
        Tensor y = apply_mask(img, mask);
        const Tensor lin = interp_linear(y, mask);
        const Tensor idw = interp_idw(y, mask);
        const Tensor bih = interp_biharmonic(y, mask);
        for (std::size_t k = 0; k < y.size(); ++k)
            if (mask.bits[k]) {
                CHECK(lin.data[k] == y.data[k]);
                CHECK(idw.data[k] == y.data[k]);
                CHECK(bih.data[k] == y.data[k]);
            }
        // sanity: every output is finite; the bending-energy surface has no
        // maximum principle so it may overshoot [0,1], but not blow up
        for (std::size_t k = 0; k < y.size(); ++k) {
            CHECK(std::isfinite(lin.data[k]));
            CHECK(std::isfinite(idw.data[k]));
            CHECK(std::isfinite(bih.data[k]));
            CHECK(std::fabs(bih.data[k]) < 25.0f);
        }
    }
}

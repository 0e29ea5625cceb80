#include "csdr/delaunay.hpp"

#include <algorithm>
#include <stdexcept>

namespace csdr {

std::int64_t orient2d(LatticePoint a, LatticePoint b, LatticePoint c) {
    const std::int64_t abx = std::int64_t(b.x) - a.x;
    const std::int64_t aby = std::int64_t(b.y) - a.y;
    const std::int64_t acx = std::int64_t(c.x) - a.x;
    const std::int64_t acy = std::int64_t(c.y) - a.y;
    return abx * acy - aby * acx;
}

int incircle_sign(LatticePoint a, LatticePoint b, LatticePoint c, LatticePoint d) {
    const std::int64_t adx = std::int64_t(a.x) - d.x, ady = std::int64_t(a.y) - d.y;
    const std::int64_t bdx = std::int64_t(b.x) - d.x, bdy = std::int64_t(b.y) - d.y;
    const std::int64_t cdx = std::int64_t(c.x) - d.x, cdy = std::int64_t(c.y) - d.y;
    const __int128 ad = __int128(adx) * adx + __int128(ady) * ady;
    const __int128 bd = __int128(bdx) * bdx + __int128(bdy) * bdy;
    const __int128 cd = __int128(cdx) * cdx + __int128(cdy) * cdy;
    const __int128 det = ad * (__int128(bdx) * cdy - __int128(bdy) * cdx) -
                         bd * (__int128(adx) * cdy - __int128(ady) * cdx) +
                         cd * (__int128(adx) * bdy - __int128(ady) * bdx);
    return det > 0 ? 1 : det < 0 ? -1 : 0;
}

namespace {

constexpr std::int32_t kCoordLimit = 1 << 20;

struct Builder {
    const std::vector<LatticePoint>& pts;
    std::vector<std::array<int, 3>> tv; // vertices, CCW
    std::vector<std::array<int, 3>> tn; // neighbor across edge opposite slot k
    std::vector<int> hull_next, hull_prev;
    std::vector<int> edge_tri; // triangle inside hull edge (v -> hull_next[v])
    std::vector<std::pair<int, int>> work; // (triangle, apex slot) to legalize

    explicit Builder(const std::vector<LatticePoint>& p)
        : pts(p),
          hull_next(p.size(), -1),
          hull_prev(p.size(), -1),
          edge_tri(p.size(), -1) {}

    std::int64_t orient(int a, int b, int c) const { return orient2d(pts[a], pts[b], pts[c]); }

    int add_tri(int a, int b, int c, int na, int nb, int nc) {
        tv.push_back({a, b, c});
        tn.push_back({na, nb, nc});
        return int(tv.size()) - 1;
    }

    int slot_of_neighbor(int t, int nb) const {
        for (int k = 0; k < 3; ++k)
            if (tn[t][k] == nb) return k;
        throw std::logic_error("delaunay: broken adjacency");
    }

    int slot_of_vertex(int t, int v) const {
        for (int k = 0; k < 3; ++k)
            if (tv[t][k] == v) return k;
        throw std::logic_error("delaunay: vertex not in triangle");
    }

    // slot whose opposite edge is {va, vb}
    int slot_of_edge(int t, int va, int vb) const {
        for (int k = 0; k < 3; ++k)
            if (tv[t][k] != va && tv[t][k] != vb) return k;
        throw std::logic_error("delaunay: edge not in triangle");
    }

    void redirect(int t, int old_nb, int new_nb) {
        if (t >= 0) tn[t][slot_of_neighbor(t, old_nb)] = new_nb;
    }

    // hull edge {a,b} got a new inner triangle
    void reassign_hull_edge(int a, int b, int t) {
        if (hull_next[a] == b)
            edge_tri[a] = t;
        else if (hull_next[b] == a)
            edge_tri[b] = t;
        else
            throw std::logic_error("delaunay: hull edge lost");
    }

    // Restore the Delaunay condition on the edge opposite slot k0 of triangle
    // t0; tv[t0][k0] is the point inserted last. Lawson flips, iterative;
    // cocircular ties do not flip.
    void legalize(int t0, int k0) {
        work.clear();
        work.emplace_back(t0, k0);
        while (!work.empty()) {
            const auto [t, k] = work.back();
            work.pop_back();
            const int o = tn[t][k];
            if (o < 0) continue;
            const int p = tv[t][k];
            const int a = tv[t][(k + 1) % 3];
            const int b = tv[t][(k + 2) % 3];
            const int ko = slot_of_neighbor(o, t);
            const int d = tv[o][ko];
            if (incircle_sign(pts[p], pts[a], pts[b], pts[d]) <= 0) continue;
            if (orient(p, a, d) <= 0 || orient(p, d, b) <= 0)
                throw std::logic_error("delaunay: non-convex flip");

            // flip shared edge (a,b) to (p,d): t := (p,a,d), o := (p,d,b)
            const int sa = slot_of_vertex(o, a);
            const int sb = slot_of_vertex(o, b);
            const int tA = tn[t][(k + 1) % 3]; // across (b,p)
            const int tB = tn[t][(k + 2) % 3]; // across (p,a)
            const int oA = tn[o][sa];          // across (d,b)
            const int oB = tn[o][sb];          // across (a,d)

            tv[t] = {p, a, d};
            tn[t] = {oB, o, tB};
            tv[o] = {p, d, b};
            tn[o] = {oA, tA, t};

            redirect(oB, o, t); // edge (a,d) moved o -> t
            redirect(tA, t, o); // edge (b,p) moved t -> o
            if (oB < 0) reassign_hull_edge(a, d, t);
            if (tA < 0) reassign_hull_edge(b, p, o);

            work.emplace_back(t, 0); // suspect edges opposite p again
            work.emplace_back(o, 0);
        }
    }

    // Initial triangulation: pts[0..k-1] lie on one line (lex order is order
    // along the line), pts[k] is the first point off it. Fan from pts[k].
    void bootstrap(int k) {
        const std::int64_t s = orient(0, 1, k);
        const int m = k - 1; // number of fan triangles
        for (int i = 0; i < m; ++i) {
            if (s > 0)
                add_tri(i, i + 1, k, i + 1 < m ? i + 1 : -1, i > 0 ? i - 1 : -1, -1);
            else
                add_tri(i + 1, i, k, i > 0 ? i - 1 : -1, i + 1 < m ? i + 1 : -1, -1);
        }
        std::vector<int> cycle;
        if (s > 0) {
            for (int i = 0; i <= k; ++i) cycle.push_back(i);
            for (int i = 0; i < m; ++i) edge_tri[i] = i;
            edge_tri[k - 1] = m - 1;
            edge_tri[k] = 0;
        } else {
            for (int i = k - 1; i >= 0; --i) cycle.push_back(i);
            cycle.push_back(k);
            for (int i = 0; i < m; ++i) edge_tri[i + 1] = i;
            edge_tri[0] = 0;
            edge_tri[k] = m - 1;
        }
        const int n = int(cycle.size());
        for (int i = 0; i < n; ++i) {
            hull_next[cycle[i]] = cycle[(i + 1) % n];
            hull_prev[cycle[(i + 1) % n]] = cycle[i];
        }
    }

    // Add point p (strictly outside the current hull); start_vertex is any
    // vertex currently on the hull, used as the scan origin.
    void insert(int p, int start_vertex) {
        int a = -1;
        int v = start_vertex;
        const int guard = int(pts.size()) + 2;
        for (int step = 0; step < guard; ++step) {
            if (orient(v, hull_next[v], p) < 0) {
                a = v;
                break;
            }
            v = hull_next[v];
            if (v == start_vertex) break;
        }
        if (a < 0) throw std::logic_error("delaunay: no visible hull edge");
        while (orient(hull_prev[a], a, p) < 0) a = hull_prev[a];
        int b = hull_next[a];
        while (orient(b, hull_next[b], p) < 0) b = hull_next[b];

        // fan CCW triangles (next, cur, p) over the strictly visible arc a..b
        int prev_tri = -1;
        int first_tri = -1;
        for (int cur = a; cur != b; cur = hull_next[cur]) {
            const int nxt = hull_next[cur];
            const int inner = edge_tri[cur];
            const int t = add_tri(nxt, cur, p, prev_tri, -1, inner);
            if (inner >= 0) tn[inner][slot_of_edge(inner, cur, nxt)] = t;
            if (prev_tri >= 0) tn[prev_tri][1] = t;
            if (first_tri < 0) first_tri = t;
            prev_tri = t;
        }
        if (first_tri < 0) throw std::logic_error("delaunay: empty fan");

        // hull: unlink interior arc vertices, splice a -> p -> b
        for (int cur = hull_next[a]; cur != b;) {
            const int nxt = hull_next[cur];
            hull_next[cur] = hull_prev[cur] = -1;
            edge_tri[cur] = -1;
            cur = nxt;
        }
        hull_next[a] = p;
        hull_prev[p] = a;
        hull_next[p] = b;
        hull_prev[b] = p;
        edge_tri[a] = first_tri;
        edge_tri[p] = prev_tri;

        for (int t = first_tri; t <= prev_tri; ++t) legalize(t, 2);
    }
};

} // namespace

Triangulation triangulate(std::vector<LatticePoint> input) {
    for (const LatticePoint& p : input)
        if (p.x < -kCoordLimit || p.x > kCoordLimit || p.y < -kCoordLimit || p.y > kCoordLimit)
            throw std::invalid_argument("triangulate: coordinate out of range");
    std::sort(input.begin(), input.end(), [](LatticePoint a, LatticePoint b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    input.erase(std::unique(input.begin(), input.end(),
                            [](LatticePoint a, LatticePoint b) {
                                return a.x == b.x && a.y == b.y;
                            }),
                input.end());
    if (input.size() < 3) throw std::invalid_argument("triangulate: need >= 3 distinct points");

    Builder bld(input);
    int k = 2;
    while (k < int(input.size()) && orient2d(input[0], input[1], input[k]) == 0) ++k;
    if (k == int(input.size()))
        throw std::invalid_argument("triangulate: all points collinear");
    bld.bootstrap(k);
    for (int p = k + 1; p < int(input.size()); ++p) bld.insert(p, p - 1);

    Triangulation out;
    out.points = std::move(input);
    out.triangles = std::move(bld.tv);
    return out;
}

} // namespace csdr

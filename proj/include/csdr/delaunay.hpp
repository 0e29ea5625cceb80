#pragma once
// Delaunay triangulation of integer lattice points. Points are inserted in
// lexicographic (row, column) order; each new point lies strictly outside the
// running hull, gets fanned onto the visible hull arc, and edges are restored
// Delaunay by Lawson flips. All predicates use exact integer arithmetic;
// cocircular ties keep the earlier-created triangle, so the construction is
// deterministic for any input order.

#include <array>
#include <cstdint>
#include <vector>

namespace csdr {

struct LatticePoint {
    std::int32_t x = 0; // column
    std::int32_t y = 0; // row
};

// sign of the cross product (b-a) x (c-a): > 0 when c is strictly left of a->b
std::int64_t orient2d(LatticePoint a, LatticePoint b, LatticePoint c);

// +1 when d is strictly inside the circumcircle of the CCW triangle (a,b,c),
// 0 when cocircular, -1 when outside; exact for |coords| <= 2^20
int incircle_sign(LatticePoint a, LatticePoint b, LatticePoint c, LatticePoint d);

struct Triangulation {
    std::vector<LatticePoint> points;          // deduplicated, lex-sorted
    std::vector<std::array<int, 3>> triangles; // CCW vertex index triples
};

// requires >= 3 distinct, not-all-collinear points with |coords| <= 2^20
Triangulation triangulate(std::vector<LatticePoint> input);

} // namespace csdr

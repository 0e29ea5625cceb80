#pragma once
// Classical reconstructions from masked measurements: piecewise-linear
// interpolation over a Delaunay triangulation, inverse-distance weighting,
// and a biharmonic (minimum bending energy) fill. All three return the
// measured pixels unchanged.

#include "csdr/masking.hpp"
#include "csdr/tensor.hpp"

namespace csdr {

struct IdwConfig {
    int k = 8;      // neighbor count, >= 1
    double p = 2.0; // distance power, > 0
};

// Barycentric interpolation inside the convex hull of measured pixels;
// outside it, the nearest measured value. Requires >= 3 non-collinear
// measured pixels.
Tensor interp_linear(const Tensor& y, const MeasurementMask& mask);

// Weighted average of the k nearest measured pixels, weights 1/d^p, distance
// ties broken by row-major pixel index. Requires >= 1 measured pixel.
Tensor interp_idw(const Tensor& y, const MeasurementMask& mask, const IdwConfig& config = {});

struct BiharmonicResult {
    Tensor image;
    bool converged = true;
    double residual = 0.0; // final ||b - A x|| / ||b||
    int iterations = 0;
};

// Minimizes the squared discrete Laplacian (truncated to in-frame second
// differences at the border) over unmeasured pixels; the normal equations
// give the 13-point biharmonic stencil in the interior. Solved by Jacobi-
// preconditioned conjugate gradients; non-convergence is reported, with the
// best iterate returned.
BiharmonicResult interp_biharmonic_full(const Tensor& y, const MeasurementMask& mask);
Tensor interp_biharmonic(const Tensor& y, const MeasurementMask& mask);

} // namespace csdr

#pragma once
// Reconstruction quality metrics. Pixel metrics (RNMSE, PSNR, SSIM) compare a
// reconstruction with the reference image directly; structure metrics first
// extract a binary feature map from each image (Canny edges or Frangi ridges)
// and then compare the maps (IoU, tolerant F1, Hausdorff distance).
//
// Conventions, fixed so results are reproducible bit for bit:
//  - images are 1xHxW tensors with values in [0, 1]; computations run in
//    double precision
//  - Gaussian blurs use radius ceil(3*sigma) and symmetric reflection at the
//    frame (the edge pixel is repeated: index -1 maps to 0)
//  - PSNR uses data range 1 and is capped at 100 dB (a perfect match would
//    otherwise be infinite)

#include <cstdint>
#include <vector>

#include "csdr/tensor.hpp"

namespace csdr {

enum class FeatureSource { canny, frangi, synthetic_truth };

const char* to_string(FeatureSource source);

struct BinaryFeatureMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits; // row-major, 1 = feature pixel
    FeatureSource source = FeatureSource::canny;

    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

// ---- pixel metrics -------------------------------------------------------

// RMSE normalized by the population standard deviation of the reference;
// throws std::invalid_argument when the reference is constant
double rnmse(const Tensor& recon, const Tensor& reference);

// 10*log10(1 / MSE) for data range [0, 1], capped at exactly 100.0
double psnr(const Tensor& recon, const Tensor& reference);

// mean SSIM over all fully-valid 11x11 windows (Gaussian weights, sigma 1.5,
// K1 = 0.01, K2 = 0.03, L = 1); requires height and width >= 11
double ssim(const Tensor& recon, const Tensor& reference);

// ---- feature extraction --------------------------------------------------

// separable Gaussian blur, radius ceil(3*sigma), symmetric reflection
Tensor gaussian_blur(const Tensor& image, double sigma);

// Canny edges: blur (sigma 1.5), Sobel, 4-direction non-maximum suppression,
// double thresholds at the 70th/90th percentiles (nearest-rank) of the
// nonzero gradient magnitudes, 8-connected hysteresis. A constant image
// yields an empty map.
BinaryFeatureMap canny_edges(const Tensor& image);

// Frangi vesselness for bright ridges at scales {1, 1.5, 2}: per-scale blur,
// central-difference Hessian scaled by sigma^2, beta = 0.5, c = half the
// maximum Frobenius norm at that scale, maximum response over scales
Tensor frangi_response(const Tensor& image);

// frangi_response binarized with Otsu's threshold over the nonzero
// responses (256 bins)
BinaryFeatureMap frangi_ridges(const Tensor& image);

// ---- structure metrics ---------------------------------------------------

// set bits where the squared distance to `map` is <= radius^2
BinaryFeatureMap dilate(const BinaryFeatureMap& map, double radius);

// intersection over union; two empty maps agree perfectly (1.0)
double iou(const BinaryFeatureMap& a, const BinaryFeatureMap& b);

// tolerant F1: precision counts predicted pixels within `radius` of the
// reference, recall counts reference pixels within `radius` of the
// prediction; both maps empty -> 1.0, exactly one empty -> 0.0
double f1(const BinaryFeatureMap& prediction, const BinaryFeatureMap& reference,
          double radius = 1.0);

// symmetric Hausdorff distance in pixels; throws std::invalid_argument when
// either map is empty
double hausdorff(const BinaryFeatureMap& a, const BinaryFeatureMap& b);

// fraction of reference pixels lying within `radius` of a detected pixel;
// an empty reference is trivially covered (1.0)
double coverage_within(const BinaryFeatureMap& detected,
                       const std::vector<std::uint8_t>& reference_bits,
                       double radius);

// qualitative comparison image with the same tolerance notion as f1:
// matched (prediction within `radius` of the reference) 1.0, spurious
// prediction 2/3, missed reference 1/3, background 0
Tensor ridge_overlay(const BinaryFeatureMap& prediction, const BinaryFeatureMap& reference,
                     double radius = 1.0);

} // namespace csdr

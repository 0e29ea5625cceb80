#pragma once
// Result tables. Every experiment writes one metrics CSV with a fixed column
// layout; per-image rows come first, followed by mean and population-standard-
// deviation rows per (method, mask, steps) group. Floating-point values are
// written as shortest round-trip decimals so identical runs produce identical
// bytes; undefined values are written as "nan" with the reason in the note
// column.

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace csdr {

struct MetricRow {
    std::string method; // "diffusion", "linear", "idw", "biharmonic"
    std::string mask;   // formatted mask spec, e.g. "grid:5" or "lc:8-8-4-4"
    int steps = 0;      // diffusion steps; 0 for the classical baselines
    std::string image;  // image id, or "mean"/"std" for aggregate rows
    int n_measured = 0;

    double rnmse = std::numeric_limits<double>::quiet_NaN();
    double psnr = std::numeric_limits<double>::quiet_NaN();
    double ssim = std::numeric_limits<double>::quiet_NaN();
    double edge_iou = std::numeric_limits<double>::quiet_NaN();
    double edge_f1 = std::numeric_limits<double>::quiet_NaN();
    double edge_hausdorff = std::numeric_limits<double>::quiet_NaN();
    double ridge_iou = std::numeric_limits<double>::quiet_NaN();
    double ridge_f1 = std::numeric_limits<double>::quiet_NaN();
    double ridge_hausdorff = std::numeric_limits<double>::quiet_NaN();

    std::string note;
};

// "nan" for non-finite values, shortest round-trip decimal otherwise
std::string format_metric(double v);

// two aggregate rows (image = "mean", then "std") per (method, mask, steps)
// group, in first-appearance order; non-finite entries are excluded per
// column and the exclusions are listed in the note
std::vector<MetricRow> aggregate_rows(const std::vector<MetricRow>& rows);

// '#'-prefixed metadata lines, a header line, then one line per row
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<std::string>& metadata,
                       const std::vector<MetricRow>& rows);

// generic CSV with '#'-prefixed metadata, a header, and pre-joined lines
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& metadata,
               const std::string& header, const std::vector<std::string>& lines);

} // namespace csdr

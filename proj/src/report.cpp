#include "csdr/report.hpp"

#include <array>
#include <cmath>
#include <map>

#include "csdr/util.hpp"

namespace csdr {
namespace {

constexpr int kMetricCount = 9;

std::array<double, kMetricCount> metric_values(const MetricRow& r) {
    return {r.rnmse,    r.psnr,   r.ssim,     r.edge_iou,       r.edge_f1,
            r.edge_hausdorff, r.ridge_iou, r.ridge_f1, r.ridge_hausdorff};
}

constexpr const char* kMetricNames[kMetricCount] = {
    "rnmse",     "psnr",      "ssim",     "edge_iou",       "edge_f1",
    "edge_hausdorff", "ridge_iou", "ridge_f1", "ridge_hausdorff"};

void set_metric(MetricRow& r, int idx, double v) {
    switch (idx) {
    case 0: r.rnmse = v; break;
    case 1: r.psnr = v; break;
    case 2: r.ssim = v; break;
    case 3: r.edge_iou = v; break;
    case 4: r.edge_f1 = v; break;
    case 5: r.edge_hausdorff = v; break;
    case 6: r.ridge_iou = v; break;
    case 7: r.ridge_f1 = v; break;
    case 8: r.ridge_hausdorff = v; break;
    default: break;
    }
}

} // namespace

std::string format_metric(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

std::vector<MetricRow> aggregate_rows(const std::vector<MetricRow>& rows) {
    struct Key {
        std::string method, mask;
        int steps;
        bool operator<(const Key& o) const {
            if (method != o.method) return method < o.method;
            if (mask != o.mask) return mask < o.mask;
            return steps < o.steps;
        }
    };
    std::vector<Key> order;
    std::map<Key, std::vector<const MetricRow*>> groups;
    for (const MetricRow& r : rows) {
        if (r.image == "mean" || r.image == "std") continue;
        Key k{r.method, r.mask, r.steps};
        auto [it, inserted] = groups.try_emplace(k);
        if (inserted) order.push_back(k);
        it->second.push_back(&r);
    }

    std::vector<MetricRow> out;
    for (const Key& k : order) {
        const auto& members = groups[k];
        MetricRow mean_row, std_row;
        mean_row.method = std_row.method = k.method;
        mean_row.mask = std_row.mask = k.mask;
        mean_row.steps = std_row.steps = k.steps;
        mean_row.image = "mean";
        std_row.image = "std";

        double n_meas = 0.0;
        for (const MetricRow* r : members) n_meas += r->n_measured;
        mean_row.n_measured = int(std::llround(n_meas / double(members.size())));
        std_row.n_measured = mean_row.n_measured;

        std::string excluded;
        for (int m = 0; m < kMetricCount; ++m) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const MetricRow* r : members) {
                const double v = metric_values(*r)[std::size_t(m)];
                if (std::isfinite(v)) {
                    sum += v;
                    ++n;
                }
            }
            const std::size_t skipped = members.size() - n;
            if (skipped > 0) {
                if (!excluded.empty()) excluded += "; ";
                excluded += std::string(kMetricNames[m]) + " excluded " +
                            std::to_string(skipped);
            }
            if (n == 0) continue; // both stay NaN
            const double mu = sum / double(n);
            double var = 0.0;
            for (const MetricRow* r : members) {
                const double v = metric_values(*r)[std::size_t(m)];
                if (std::isfinite(v)) var += (v - mu) * (v - mu);
            }
            set_metric(mean_row, m, mu);
            set_metric(std_row, m, std::sqrt(var / double(n)));
        }
        mean_row.note = excluded;
        std_row.note = excluded;
        out.push_back(std::move(mean_row));
        out.push_back(std::move(std_row));
    }
    return out;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<std::string>& metadata,
                       const std::vector<MetricRow>& rows) {
    std::string text;
    for (const std::string& line : metadata) text += "# " + line + "\n";
    text += "method,mask,steps,image,n_measured";
    for (const char* name : kMetricNames) text += std::string(",") + name;
    text += ",note\n";
    for (const MetricRow& r : rows) {
        text += r.method + "," + r.mask + "," + std::to_string(r.steps) + "," + r.image + "," +
                std::to_string(r.n_measured);
        for (const double v : metric_values(r)) text += "," + format_metric(v);
        text += "," + r.note + "\n";
    }
    write_file_atomic(path, text);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& metadata,
               const std::string& header, const std::vector<std::string>& lines) {
    std::string text;
    for (const std::string& line : metadata) text += "# " + line + "\n";
    text += header + "\n";
    for (const std::string& line : lines) text += line + "\n";
    write_file_atomic(path, text);
}

} // namespace csdr

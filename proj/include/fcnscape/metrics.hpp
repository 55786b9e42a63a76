#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcnscape/tensor.hpp"

namespace fcnscape {

// 2-D map of segment labels, row-major. Label 0 is background/boundary.
struct LabelMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint32_t> labels;

    LabelMap() = default;
    LabelMap(std::size_t h, std::size_t w, std::uint32_t fill = 0);
    LabelMap(std::size_t h, std::size_t w, std::vector<std::uint32_t> values);

    std::uint32_t& at(std::size_t y, std::size_t x) { return labels[y * width + x]; }
    std::uint32_t at(std::size_t y, std::size_t x) const { return labels[y * width + x]; }
    std::size_t size() const { return labels.size(); }

    bool operator==(const LabelMap&) const = default;
};

// 1 where the single-plane image is >= threshold, else 0. Accepts [H,W],
// [1,H,W] or [1,1,H,W].
LabelMap binarize(const Tensor& image, double threshold = 0.5);

// 4-connected components of the non-zero pixels, labelled 1.. in order of the
// first pixel met in a raster scan.
LabelMap connected_components(const LabelMap& binary);
std::size_t component_count(const LabelMap& labels);

// Returns infinity for identical inputs.
double psnr(const Tensor& pred, const Tensor& target, double max_val = 1.0);

struct SsimOptions {
    std::size_t window = 11;
    double k1 = 0.01;
    double k2 = 0.03;
    double max_val = 1.0;
};

// Mean SSIM over every fully contained window position with uniform weights.
// Tensors of rank 3 or 4 are averaged over their planes.
double ssim(const Tensor& pred, const Tensor& target, const SsimOptions& options = {});

// F-score form of the Rand index. Empty when the restricted pixel set is empty.
std::optional<double> rand_score(const LabelMap& pred, const LabelMap& gt, bool foreground_restricted = true);

// F-score of the information-theoretic split score I/H(pred) and merge score
// I/H(gt), natural log.
std::optional<double> voi_score(const LabelMap& pred, const LabelMap& gt, bool foreground_restricted = true);

struct QualityReport {
    double psnr = 0.0;
    double ssim = 0.0;
    std::optional<double> rand;
    std::optional<double> voi;
    std::size_t images = 0;

    // Infinite PSNR is written as the string "inf"; absent scores as null.
    nlohmann::json to_json() const;
};

// Scores one prediction against its target. PSNR and SSIM use the prediction
// clamped to [0,1]; the segment scores compare connected components of the
// prediction thresholded at 0.5 with those of the target.
QualityReport evaluate_pair(const Tensor& pred, const Tensor& target, const SsimOptions& options = {});

// Per-image reports averaged over the dataset. PSNR averages finite values
// and is infinite only if every image is; absent segment scores are skipped.
QualityReport average(const std::vector<QualityReport>& reports);

// Fixed-column text table.
std::string format_table(const std::vector<std::pair<std::string, QualityReport>>& rows);

}  // namespace fcnscape

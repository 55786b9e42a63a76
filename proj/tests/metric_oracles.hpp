#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "fcnscape/metrics.hpp"

namespace fcnscape::testing {

// Rand F-score by enumerating every ordered pixel pair.
inline std::optional<double> rand_pair_oracle(const LabelMap& pred, const LabelMap& gt, bool restricted) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < gt.size(); ++i)
        if (!restricted || gt.labels[i] != 0) keep.push_back(i);
    if (keep.empty()) return std::nullopt;
    double both = 0, same_pred = 0, same_gt = 0;
    for (std::size_t a : keep)
        for (std::size_t b : keep) {
            const bool p = pred.labels[a] == pred.labels[b];
            const bool g = gt.labels[a] == gt.labels[b];
            both += p && g;
            same_pred += p;
            same_gt += g;
        }
    const double precision = both / same_pred;
    const double recall = both / same_gt;
    return 2.0 * precision * recall / (precision + recall);
}

// Information F-score from a dense joint probability table.
inline std::optional<double> voi_table_oracle(const LabelMap& pred, const LabelMap& gt, bool restricted) {
    std::uint32_t np = 0, ng = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        np = std::max(np, pred.labels[i] + 1);
        ng = std::max(ng, gt.labels[i] + 1);
    }
    std::vector<std::vector<double>> p(np, std::vector<double>(ng, 0.0));
    double n = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (restricted && gt.labels[i] == 0) continue;
        p[pred.labels[i]][gt.labels[i]] += 1.0;
        n += 1.0;
    }
    if (n == 0) return std::nullopt;
    std::vector<double> row(np, 0.0), col(ng, 0.0);
    for (std::uint32_t i = 0; i < np; ++i)
        for (std::uint32_t j = 0; j < ng; ++j) {
            p[i][j] /= n;
            row[i] += p[i][j];
            col[j] += p[i][j];
        }
    double hp = 0, hg = 0, mi = 0;
    for (double v : row)
        if (v > 0) hp -= v * std::log(v);
    for (double v : col)
        if (v > 0) hg -= v * std::log(v);
    for (std::uint32_t i = 0; i < np; ++i)
        for (std::uint32_t j = 0; j < ng; ++j)
            if (p[i][j] > 0) mi += p[i][j] * std::log(p[i][j] / (row[i] * col[j]));
    const double split = hp > 0 ? mi / hp : (hg == 0 ? 1.0 : 0.0);
    const double merge = hg > 0 ? mi / hg : (hp == 0 ? 1.0 : 0.0);
    if (split + merge == 0) return 0.0;
    return 2.0 * split * merge / (split + merge);
}

// Component count by recursive flood fill.
inline std::size_t flood_fill_count(const LabelMap& binary) {
    std::vector<bool> seen(binary.size(), false);
    std::function<void(long, long)> fill = [&](long y, long x) {
        if (y < 0 || x < 0 || y >= static_cast<long>(binary.height) || x >= static_cast<long>(binary.width)) return;
        const std::size_t i = static_cast<std::size_t>(y) * binary.width + static_cast<std::size_t>(x);
        if (seen[i] || binary.labels[i] == 0) return;
        seen[i] = true;
        fill(y + 1, x);
        fill(y - 1, x);
        fill(y, x + 1);
        fill(y, x - 1);
    };
    std::size_t count = 0;
    for (std::size_t y = 0; y < binary.height; ++y)
        for (std::size_t x = 0; x < binary.width; ++x)
            if (binary.at(y, x) != 0 && !seen[y * binary.width + x]) {
                ++count;
                fill(static_cast<long>(y), static_cast<long>(x));
            }
    return count;
}

inline LabelMap random_labels(std::size_t h, std::size_t w, std::uint32_t max_label, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> pick(0, max_label);
    LabelMap m(h, w);
    for (auto& v : m.labels) v = pick(rng);
    return m;
}

// Mean SSIM of one h x w plane by direct summation over every window.
inline double ssim_window_oracle(const Tensor& a, const Tensor& b, std::size_t h, std::size_t w, std::size_t win) {
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0;
    std::size_t positions = 0;
    for (std::size_t oy = 0; oy + win <= h; ++oy)
        for (std::size_t ox = 0; ox + win <= w; ++ox) {
            double ma = 0, mb = 0;
            for (std::size_t y = oy; y < oy + win; ++y)
                for (std::size_t x = ox; x < ox + win; ++x) ma += a[y * w + x], mb += b[y * w + x];
            const double n = static_cast<double>(win * win);
            ma /= n;
            mb /= n;
            double va = 0, vb = 0, cov = 0;
            for (std::size_t y = oy; y < oy + win; ++y)
                for (std::size_t x = ox; x < ox + win; ++x) {
                    const double da = a[y * w + x] - ma, db = b[y * w + x] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++positions;
        }
    return total / static_cast<double>(positions);
}

}  // namespace fcnscape::testing

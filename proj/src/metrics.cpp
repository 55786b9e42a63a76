#include "fcnscape/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace fcnscape {

LabelMap::LabelMap(std::size_t h, std::size_t w, std::uint32_t fill) : height(h), width(w), labels(h * w, fill) {}

LabelMap::LabelMap(std::size_t h, std::size_t w, std::vector<std::uint32_t> values)
    : height(h), width(w), labels(std::move(values)) {
    if (labels.size() != h * w)
        throw std::invalid_argument("LabelMap: " + std::to_string(labels.size()) + " labels for a " +
                                    std::to_string(h) + "x" + std::to_string(w) + " map");
}

namespace {

std::pair<std::size_t, std::size_t> plane_extent(const Tensor& image) {
    const auto& s = image.shape();
    const std::size_t rank = s.size();
    if (rank < 2) throw std::invalid_argument("expected an image, got shape " + to_string(s));
    for (std::size_t i = 0; i + 2 < rank; ++i)
        if (s[i] != 1) throw std::invalid_argument("expected a single-plane image, got shape " + to_string(s));
    return {s[rank - 2], s[rank - 1]};
}

void require_same_extent(const LabelMap& a, const LabelMap& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("label maps differ in extent: " + std::to_string(a.height) + "x" +
                                    std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                                    std::to_string(b.width));
}

struct Contingency {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
    std::map<std::uint32_t, double> pred, gt;
    double total = 0.0;
};

Contingency contingency(const LabelMap& pred, const LabelMap& gt, bool foreground_restricted) {
    require_same_extent(pred, gt);
    Contingency c;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (foreground_restricted && gt.labels[i] == 0) continue;
        c.joint[{pred.labels[i], gt.labels[i]}] += 1.0;
        c.pred[pred.labels[i]] += 1.0;
        c.gt[gt.labels[i]] += 1.0;
        c.total += 1.0;
    }
    return c;
}

double f_score(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

double entropy(const std::map<std::uint32_t, double>& counts, double total) {
    double h = 0.0;
    for (const auto& [label, n] : counts) {
        const double p = n / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace

LabelMap binarize(const Tensor& image, double threshold) {
    const auto [h, w] = plane_extent(image);
    LabelMap out(h, w);
    for (std::size_t i = 0; i < h * w; ++i) out.labels[i] = image[i] >= threshold ? 1 : 0;
    return out;
}

LabelMap connected_components(const LabelMap& binary) {
    LabelMap out(binary.height, binary.width);
    std::uint32_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < binary.size(); ++start) {
        if (binary.labels[start] == 0 || out.labels[start] != 0) continue;
        ++next;
        out.labels[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const std::size_t y = p / binary.width, x = p % binary.width;
            auto visit = [&](std::size_t q) {
                if (binary.labels[q] != 0 && out.labels[q] == 0) {
                    out.labels[q] = next;
                    stack.push_back(q);
                }
            };
            if (y > 0) visit(p - binary.width);
            if (y + 1 < binary.height) visit(p + binary.width);
            if (x > 0) visit(p - 1);
            if (x + 1 < binary.width) visit(p + 1);
        }
    }
    return out;
}

std::size_t component_count(const LabelMap& labels) {
    std::uint32_t m = 0;
    for (auto l : labels.labels) m = std::max(m, l);
    return m;
}

double psnr(const Tensor& pred, const Tensor& target, double max_val) {
    if (pred.shape() != target.shape())
        throw std::invalid_argument("psnr: shape mismatch " + to_string(pred.shape()) + " vs " +
                                    to_string(target.shape()));
    if (!(max_val > 0.0)) throw std::invalid_argument("psnr: max_val must be positive");
    if (pred.empty()) throw std::invalid_argument("psnr: empty input");
    double sq = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(pred.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_val * max_val / mse);
}

double ssim(const Tensor& pred, const Tensor& target, const SsimOptions& o) {
    if (pred.shape() != target.shape())
        throw std::invalid_argument("ssim: shape mismatch " + to_string(pred.shape()) + " vs " +
                                    to_string(target.shape()));
    const auto& s = pred.shape();
    if (s.size() < 2) throw std::invalid_argument("ssim: expected an image, got shape " + to_string(s));
    const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
    if (o.window % 2 == 0 || o.window == 0) throw std::invalid_argument("ssim: window must be odd");
    if (o.window > std::min(h, w))
        throw std::invalid_argument("ssim: window " + std::to_string(o.window) + " exceeds image extent " +
                                    std::to_string(h) + "x" + std::to_string(w));
    const std::size_t planes = pred.size() / (h * w);
    const double c1 = (o.k1 * o.max_val) * (o.k1 * o.max_val);
    const double c2 = (o.k2 * o.max_val) * (o.k2 * o.max_val);
    const double count = static_cast<double>(o.window * o.window);

    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t p = 0; p < planes; ++p) {
        const double* x = pred.data().data() + p * h * w;
        const double* y = target.data().data() + p * h * w;
        for (std::size_t i = 0; i + o.window <= h; ++i) {
            for (std::size_t j = 0; j + o.window <= w; ++j) {
                double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
                for (std::size_t a = 0; a < o.window; ++a) {
                    for (std::size_t b = 0; b < o.window; ++b) {
                        const double xv = x[(i + a) * w + j + b], yv = y[(i + a) * w + j + b];
                        sx += xv;
                        sy += yv;
                        sxx += xv * xv;
                        syy += yv * yv;
                        sxy += xv * yv;
                    }
                }
                const double mx = sx / count, my = sy / count;
                const double vx = sxx / count - mx * mx, vy = syy / count - my * my;
                const double cxy = sxy / count - mx * my;
                total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++windows;
            }
        }
    }
    return total / static_cast<double>(windows);
}

std::optional<double> rand_score(const LabelMap& pred, const LabelMap& gt, bool foreground_restricted) {
    const auto c = contingency(pred, gt, foreground_restricted);
    if (c.total == 0.0) return std::nullopt;
    double sum_joint = 0.0, sum_pred = 0.0, sum_gt = 0.0;
    for (const auto& [key, n] : c.joint) sum_joint += n * n;
    for (const auto& [key, n] : c.pred) sum_pred += n * n;
    for (const auto& [key, n] : c.gt) sum_gt += n * n;
    return f_score(sum_joint / sum_pred, sum_joint / sum_gt);
}

std::optional<double> voi_score(const LabelMap& pred, const LabelMap& gt, bool foreground_restricted) {
    const auto c = contingency(pred, gt, foreground_restricted);
    if (c.total == 0.0) return std::nullopt;
    const double h_pred = entropy(c.pred, c.total);
    const double h_gt = entropy(c.gt, c.total);
    double mutual = 0.0;
    for (const auto& [key, n] : c.joint) {
        const double p = n / c.total;
        const double pp = c.pred.at(key.first) / c.total;
        const double pg = c.gt.at(key.second) / c.total;
        mutual += p * std::log(p / (pp * pg));
    }
    mutual = std::max(0.0, mutual);
    const double split = h_pred > 0.0 ? std::min(1.0, mutual / h_pred) : (h_gt == 0.0 ? 1.0 : 0.0);
    const double merge = h_gt > 0.0 ? std::min(1.0, mutual / h_gt) : (h_pred == 0.0 ? 1.0 : 0.0);
    return f_score(split, merge);
}

nlohmann::json QualityReport::to_json() const {
    nlohmann::json j;
    j["psnr"] = std::isinf(psnr) ? nlohmann::json("inf") : nlohmann::json(psnr);
    j["ssim"] = ssim;
    j["rand"] = rand ? nlohmann::json(*rand) : nlohmann::json(nullptr);
    j["voi"] = voi ? nlohmann::json(*voi) : nlohmann::json(nullptr);
    j["images"] = images;
    return j;
}

QualityReport evaluate_pair(const Tensor& pred, const Tensor& target, const SsimOptions& options) {
    if (pred.shape() != target.shape())
        throw std::invalid_argument("evaluate: prediction shape " + to_string(pred.shape()) +
                                    " does not match target " + to_string(target.shape()));
    Tensor clamped = pred;
    for (double& v : clamped.data()) v = std::clamp(v, 0.0, 1.0);
    QualityReport r;
    r.images = 1;
    r.psnr = psnr(clamped, target, options.max_val);
    SsimOptions o = options;
    const auto& s = pred.shape();
    const std::size_t extent = std::min(s[s.size() - 2], s[s.size() - 1]);
    o.window = std::min(o.window, extent % 2 ? extent : extent - 1);
    r.ssim = ssim(clamped, target, o);
    if (pred.size() == s[s.size() - 2] * s[s.size() - 1]) {
        const auto pl = connected_components(binarize(pred, 0.5));
        const auto gl = connected_components(binarize(target, 0.5));
        r.rand = rand_score(pl, gl, true);
        r.voi = voi_score(pl, gl, true);
    }
    return r;
}

QualityReport average(const std::vector<QualityReport>& reports) {
    QualityReport out;
    double psnr_sum = 0, ssim_sum = 0, rand_sum = 0, voi_sum = 0;
    std::size_t finite = 0, rand_n = 0, voi_n = 0;
    for (const auto& r : reports) {
        if (std::isfinite(r.psnr)) {
            psnr_sum += r.psnr;
            ++finite;
        }
        ssim_sum += r.ssim;
        if (r.rand) rand_sum += *r.rand, ++rand_n;
        if (r.voi) voi_sum += *r.voi, ++voi_n;
        out.images += r.images;
    }
    if (reports.empty()) return out;
    out.psnr = finite ? psnr_sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
    out.ssim = ssim_sum / static_cast<double>(reports.size());
    if (rand_n) out.rand = rand_sum / static_cast<double>(rand_n);
    if (voi_n) out.voi = voi_sum / static_cast<double>(voi_n);
    return out;
}

std::string format_table(const std::vector<std::pair<std::string, QualityReport>>& rows) {
    auto cell = [](std::optional<double> v) {
        char buf[32];
        if (!v) return std::string("-");
        if (std::isinf(*v)) return std::string("inf");
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
        return std::string(buf);
    };
    char line[160];
    std::string out;
    std::snprintf(line, sizeof(line), "%-24s %10s %10s %10s %10s\n", "model", "rand", "voi", "psnr", "ssim");
    out += line;
    for (const auto& [name, r] : rows) {
        std::snprintf(line, sizeof(line), "%-24s %10s %10s %10s %10s\n", name.c_str(), cell(r.rand).c_str(),
                      cell(r.voi).c_str(), cell(r.psnr).c_str(), cell(r.ssim).c_str());
        out += line;
    }
    return out;
}

}  // namespace fcnscape

#include "fcnscape/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fcnscape {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

struct ConvGeometry {
    std::size_t channels, height, width, kernel, stride, padding, out_height, out_width;

    std::size_t rows() const { return channels * kernel * kernel; }
    std::size_t cols() const { return out_height * out_width; }
    bool is_pointwise() const { return kernel == 1 && stride == 1 && padding == 0; }
};

void require_rank4(const Tensor& t, const char* op, const char* what) {
    if (t.rank() != 4)
        throw std::invalid_argument(std::string(op) + ": " + what + " must be 4-D [B,C,H,W], got " +
                                    to_string(t.shape()));
}

// cols is [C*k*k, Ho*Wo], row (c, ky, kx), column (oy, ox).
void im2col(const double* image, const ConvGeometry& g, double* cols) {
    const std::size_t k = g.kernel;
    for (std::size_t c = 0; c < g.channels; ++c) {
        const double* plane = image + c * g.height * g.width;
        for (std::size_t ky = 0; ky < k; ++ky) {
            for (std::size_t kx = 0; kx < k; ++kx) {
                double* row = cols + ((c * k + ky) * k + kx) * g.cols();
                for (std::size_t oy = 0; oy < g.out_height; ++oy) {
                    double* out = row + oy * g.out_width;
                    const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.padding);
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) {
                        std::fill(out, out + g.out_width, 0.0);
                        continue;
                    }
                    const double* src = plane + static_cast<std::size_t>(iy) * g.width;
                    for (std::size_t ox = 0; ox < g.out_width; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.padding);
                        out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.width)) ? 0.0 : src[ix];
                    }
                }
            }
        }
    }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* image) {
    const std::size_t k = g.kernel;
    for (std::size_t c = 0; c < g.channels; ++c) {
        double* plane = image + c * g.height * g.width;
        for (std::size_t ky = 0; ky < k; ++ky) {
            for (std::size_t kx = 0; kx < k; ++kx) {
                const double* row = cols + ((c * k + ky) * k + kx) * g.cols();
                for (std::size_t oy = 0; oy < g.out_height; ++oy) {
                    const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.padding);
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) continue;
                    double* dst = plane + static_cast<std::size_t>(iy) * g.width;
                    const double* src = row + oy * g.out_width;
                    for (std::size_t ox = 0; ox < g.out_width; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.padding);
                        if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.width)) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

Var conv2d(Var input, Var weight, Var bias, std::size_t stride, std::size_t padding) {
    const Tensor& x = input.value();
    const Tensor& w = weight.value();
    const Tensor& b = bias.value();
    require_rank4(x, "conv2d", "input");
    require_rank4(w, "conv2d", "weight");
    if (w.dim(2) != w.dim(3) || w.dim(2) % 2 == 0 || w.dim(2) > kMaxKernel)
        throw std::invalid_argument("conv2d: kernel must be square, odd and at most 7, got " + to_string(w.shape()));
    if (w.dim(1) != x.dim(1))
        throw std::invalid_argument("conv2d: input has " + std::to_string(x.dim(1)) + " channels but weight " +
                                    to_string(w.shape()) + " expects " + std::to_string(w.dim(1)));
    if (b.rank() != 1 || b.dim(0) != w.dim(0))
        throw std::invalid_argument("conv2d: bias " + to_string(b.shape()) + " does not match " +
                                    std::to_string(w.dim(0)) + " output channels");
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    const std::size_t k = w.dim(2);
    if (x.dim(2) + 2 * padding < k || x.dim(3) + 2 * padding < k)
        throw std::invalid_argument("conv2d: kernel " + std::to_string(k) + " larger than padded input " +
                                    to_string(x.shape()));

    ConvGeometry geo{x.dim(1), x.dim(2), x.dim(3), k, stride, padding,
                     (x.dim(2) + 2 * padding - k) / stride + 1, (x.dim(3) + 2 * padding - k) / stride + 1};
    const std::size_t batch = x.dim(0), out_channels = w.dim(0);
    Tensor y({batch, out_channels, geo.out_height, geo.out_width});

    const ConstMap wm(w.data().data(), static_cast<Eigen::Index>(out_channels), static_cast<Eigen::Index>(geo.rows()));
    AlignedVector cols(geo.is_pointwise() ? 0 : geo.rows() * geo.cols());
    const std::size_t in_stride = geo.channels * geo.height * geo.width;
    const std::size_t out_stride = out_channels * geo.cols();
    for (std::size_t n = 0; n < batch; ++n) {
        const double* image = x.data().data() + n * in_stride;
        const double* colp = image;
        if (!geo.is_pointwise()) {
            im2col(image, geo, cols.data());
            colp = cols.data();
        }
        MutMap ym(y.data().data() + n * out_stride, static_cast<Eigen::Index>(out_channels),
                  static_cast<Eigen::Index>(geo.cols()));
        ym.noalias() = wm * ConstMap(colp, static_cast<Eigen::Index>(geo.rows()), static_cast<Eigen::Index>(geo.cols()));
        for (std::size_t o = 0; o < out_channels; ++o) ym.row(static_cast<Eigen::Index>(o)).array() += b[o];
    }

    const std::size_t xi = input.id, wi = weight.id, bi = bias.id;
    return input.graph->record(std::move(y), {xi, wi, bi}, [=](Graph& g, const Tensor& dy) {
        const Tensor& xv = g.value(xi);
        const Tensor& wv = g.value(wi);
        const bool need_x = g.requires_grad(xi), need_w = g.requires_grad(wi), need_b = g.requires_grad(bi);
        const auto rows = static_cast<Eigen::Index>(geo.rows()), ncols = static_cast<Eigen::Index>(geo.cols());
        const auto cout = static_cast<Eigen::Index>(out_channels);
        const ConstMap wmat(wv.data().data(), cout, rows);

        RowMatrix dw = RowMatrix::Zero(need_w ? cout : 0, need_w ? rows : 0);
        AlignedVector colbuf(geo.is_pointwise() ? 0 : geo.rows() * geo.cols());
        RowMatrix dcols;
        Tensor* dx = need_x ? &g.grad(xi) : nullptr;
        Tensor* db = need_b ? &g.grad(bi) : nullptr;
        for (std::size_t n = 0; n < batch; ++n) {
            const ConstMap dym(dy.data().data() + n * out_stride, cout, ncols);
            if (need_b)
                for (Eigen::Index o = 0; o < cout; ++o) (*db)[static_cast<std::size_t>(o)] += dym.row(o).sum();
            if (need_w) {
                const double* image = xv.data().data() + n * in_stride;
                const double* colp = image;
                if (!geo.is_pointwise()) {
                    im2col(image, geo, colbuf.data());
                    colp = colbuf.data();
                }
                dw.noalias() += dym * ConstMap(colp, rows, ncols).transpose();
            }
            if (need_x) {
                double* dimage = dx->data().data() + n * in_stride;
                if (geo.is_pointwise()) {
                    MutMap(dimage, rows, ncols).noalias() += wmat.transpose() * dym;
                } else {
                    dcols.noalias() = wmat.transpose() * dym;
                    col2im_add(dcols.data(), geo, dimage);
                }
            }
        }
        if (need_w) {
            Tensor& dwt = g.grad(wi);
            for (std::size_t i = 0; i < dwt.size(); ++i) dwt[i] += dw.data()[i];
        }
    });
}

Var maxpool2d(Var input, std::size_t window) {
    const Tensor& x = input.value();
    require_rank4(x, "maxpool2d", "input");
    if (window < 1 || x.dim(2) % window != 0 || x.dim(3) % window != 0)
        throw std::invalid_argument("maxpool2d: extents " + to_string(x.shape()) + " not divisible by window " +
                                    std::to_string(window));
    const std::size_t batch = x.dim(0), channels = x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = h / window, ow = w / window;
    Tensor y({batch, channels, oh, ow});
    std::vector<std::size_t> argmax(y.size());
    for (std::size_t plane = 0; plane < batch * channels; ++plane) {
        const double* src = x.data().data() + plane * h * w;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t best = (oy * window) * w + ox * window;
                for (std::size_t dy = 0; dy < window; ++dy)
                    for (std::size_t dx = 0; dx < window; ++dx) {
                        const std::size_t idx = (oy * window + dy) * w + ox * window + dx;
                        if (src[idx] > src[best]) best = idx;
                    }
                const std::size_t o = plane * oh * ow + oy * ow + ox;
                y[o] = src[best];
                argmax[o] = plane * h * w + best;
            }
        }
    }
    const std::size_t xi = input.id;
    return input.graph->record(std::move(y), {xi}, [xi, argmax = std::move(argmax)](Graph& g, const Tensor& dy) {
        Tensor& dx = g.grad(xi);
        for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += dy[o];
    });
}

Var upsample2x(Var input, Var weight) {
    const Tensor& x = input.value();
    const Tensor& w = weight.value();
    require_rank4(x, "upsample2x", "input");
    require_rank4(w, "upsample2x", "weight");
    if (w.dim(2) != 2 || w.dim(3) != 2 || w.dim(1) != x.dim(1))
        throw std::invalid_argument("upsample2x: weight " + to_string(w.shape()) + " must be [Cout," +
                                    std::to_string(x.dim(1)) + ",2,2]");
    const std::size_t batch = x.dim(0), cin = x.dim(1), h = x.dim(2), wd = x.dim(3), cout = w.dim(0);
    const std::size_t pixels = h * wd;
    const auto rows = static_cast<Eigen::Index>(cout * 4), inner = static_cast<Eigen::Index>(cin),
               ncols = static_cast<Eigen::Index>(pixels);

    // Row (o, a, b) of the rearranged weight holds the taps feeding output
    // position (2i + a, 2j + b) of channel o.
    auto rearrange = [=](const Tensor& wt) {
        RowMatrix wr(rows, inner);
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t c = 0; c < cin; ++c)
                for (std::size_t ab = 0; ab < 4; ++ab)
                    wr(static_cast<Eigen::Index>(o * 4 + ab), static_cast<Eigen::Index>(c)) = wt[(o * cin + c) * 4 + ab];
        return wr;
    };

    Tensor y({batch, cout, 2 * h, 2 * wd});
    const RowMatrix wr = rearrange(w);
    RowMatrix yr(rows, ncols);
    for (std::size_t n = 0; n < batch; ++n) {
        yr.noalias() = wr * ConstMap(x.data().data() + n * cin * pixels, inner, ncols);
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t ab = 0; ab < 4; ++ab) {
                const std::size_t a = ab / 2, b = ab % 2;
                const double* src = yr.data() + (o * 4 + ab) * pixels;
                for (std::size_t i = 0; i < h; ++i)
                    for (std::size_t j = 0; j < wd; ++j) y.at(n, o, 2 * i + a, 2 * j + b) = src[i * wd + j];
            }
    }

    const std::size_t xi = input.id, wi = weight.id;
    return input.graph->record(std::move(y), {xi, wi}, [=](Graph& g, const Tensor& dy) {
        const Tensor& xv = g.value(xi);
        const bool need_x = g.requires_grad(xi), need_w = g.requires_grad(wi);
        const RowMatrix wmat = rearrange(g.value(wi));
        RowMatrix dyr(rows, ncols);
        RowMatrix dwr = RowMatrix::Zero(rows, inner);
        for (std::size_t n = 0; n < batch; ++n) {
            for (std::size_t o = 0; o < cout; ++o)
                for (std::size_t ab = 0; ab < 4; ++ab) {
                    const std::size_t a = ab / 2, b = ab % 2;
                    double* dst = dyr.data() + (o * 4 + ab) * pixels;
                    for (std::size_t i = 0; i < h; ++i)
                        for (std::size_t j = 0; j < wd; ++j) dst[i * wd + j] = dy.at(n, o, 2 * i + a, 2 * j + b);
                }
            const ConstMap xm(xv.data().data() + n * cin * pixels, inner, ncols);
            if (need_w) dwr.noalias() += dyr * xm.transpose();
            if (need_x) MutMap(g.grad(xi).data().data() + n * cin * pixels, inner, ncols).noalias() += wmat.transpose() * dyr;
        }
        if (need_w) {
            Tensor& dw = g.grad(wi);
            for (std::size_t o = 0; o < cout; ++o)
                for (std::size_t c = 0; c < cin; ++c)
                    for (std::size_t ab = 0; ab < 4; ++ab)
                        dw[(o * cin + c) * 4 + ab] += dwr(static_cast<Eigen::Index>(o * 4 + ab), static_cast<Eigen::Index>(c));
        }
    });
}

Var relu(Var input) {
    const Tensor& x = input.value();
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    const std::size_t xi = input.id;
    return input.graph->record(std::move(y), {xi}, [xi](Graph& g, const Tensor& dy) {
        const Tensor& xv = g.value(xi);
        Tensor& dx = g.grad(xi);
        for (std::size_t i = 0; i < dx.size(); ++i)
            if (xv[i] > 0.0) dx[i] += dy[i];
    });
}

Var add(Var a, Var b) {
    if (a.shape() != b.shape())
        throw std::invalid_argument("add: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    Tensor y = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
    const std::size_t ai = a.id, bi = b.id;
    return a.graph->record(std::move(y), {ai, bi}, [ai, bi](Graph& g, const Tensor& dy) {
        for (std::size_t id : {ai, bi}) {
            if (!g.requires_grad(id)) continue;
            Tensor& d = g.grad(id);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
        }
    });
}

Var mul(Var a, Var b) {
    if (a.shape() != b.shape())
        throw std::invalid_argument("mul: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    Tensor y = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
    const std::size_t ai = a.id, bi = b.id;
    return a.graph->record(std::move(y), {ai, bi}, [ai, bi](Graph& g, const Tensor& dy) {
        if (g.requires_grad(ai)) {
            const Tensor& other = g.value(bi);
            Tensor& d = g.grad(ai);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * other[i];
        }
        if (g.requires_grad(bi)) {
            const Tensor& other = g.value(ai);
            Tensor& d = g.grad(bi);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * other[i];
        }
    });
}

Var concat_channels(Var a, Var b) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    require_rank4(av, "concat_channels", "first input");
    require_rank4(bv, "concat_channels", "second input");
    if (av.dim(0) != bv.dim(0) || av.dim(2) != bv.dim(2) || av.dim(3) != bv.dim(3))
        throw std::invalid_argument("concat_channels: batch/spatial mismatch " + to_string(av.shape()) + " vs " +
                                    to_string(bv.shape()));
    const std::size_t batch = av.dim(0), ca = av.dim(1), cb = bv.dim(1), plane = av.dim(2) * av.dim(3);
    Tensor y({batch, ca + cb, av.dim(2), av.dim(3)});
    for (std::size_t n = 0; n < batch; ++n) {
        std::copy_n(av.data().data() + n * ca * plane, ca * plane, y.data().data() + n * (ca + cb) * plane);
        std::copy_n(bv.data().data() + n * cb * plane, cb * plane, y.data().data() + (n * (ca + cb) + ca) * plane);
    }
    const std::size_t ai = a.id, bi = b.id;
    return a.graph->record(std::move(y), {ai, bi}, [=](Graph& g, const Tensor& dy) {
        for (std::size_t n = 0; n < batch; ++n) {
            const double* src = dy.data().data() + n * (ca + cb) * plane;
            if (g.requires_grad(ai)) {
                double* d = g.grad(ai).data().data() + n * ca * plane;
                for (std::size_t i = 0; i < ca * plane; ++i) d[i] += src[i];
            }
            if (g.requires_grad(bi)) {
                double* d = g.grad(bi).data().data() + n * cb * plane;
                for (std::size_t i = 0; i < cb * plane; ++i) d[i] += src[ca * plane + i];
            }
        }
    });
}

Var sum(Var input) {
    double total = 0.0;
    for (double v : input.value().data()) total += v;
    const std::size_t xi = input.id;
    return input.graph->record(Tensor({1}, total), {xi}, [xi](Graph& g, const Tensor& dy) {
        Tensor& dx = g.grad(xi);
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[0];
    });
}

}  // namespace fcnscape

#include "fcnscape/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fcnscape/ops.hpp"

namespace fcnscape {

std::string to_string(Architecture id) {
    switch (id) {
        case Architecture::FCN16s: return "fcn16s";
        case Architecture::FCN8s: return "fcn8s";
        case Architecture::FCN4s: return "fcn4s";
        case Architecture::UNet: return "unet";
        case Architecture::ResidualSkip: return "resskip";
    }
    throw std::invalid_argument("unknown architecture");
}

const std::vector<std::string>& architecture_names() {
    static const std::vector<std::string> names{"fcn16s", "fcn8s", "fcn4s", "unet", "resskip"};
    return names;
}

Architecture parse_architecture(const std::string& name) {
    for (auto id : {Architecture::FCN16s, Architecture::FCN8s, Architecture::FCN4s, Architecture::UNet,
                    Architecture::ResidualSkip})
        if (to_string(id) == name) return id;
    throw std::invalid_argument("unknown architecture '" + name + "', expected one of {fcn16s, fcn8s, fcn4s, unet, resskip}");
}

void validate(const ArchitectureSpec& spec) {
    if (spec.depth < 1 || spec.depth > 8) throw std::invalid_argument("depth must be in [1, 8]");
    if (spec.base_channels < 1) throw std::invalid_argument("base_channels must be positive");
    if (spec.in_channels < 1 || spec.out_channels < 1) throw std::invalid_argument("channel counts must be positive");
    if (!spec.residual_blocks_per_skip.empty() && spec.residual_blocks_per_skip.size() != spec.depth)
        throw std::invalid_argument("residual_blocks_per_skip needs one entry per level (" +
                                    std::to_string(spec.depth) + "), got " +
                                    std::to_string(spec.residual_blocks_per_skip.size()));
}

namespace {

// FCN-Ns keeps the skips of the coarsest stages only: 16s none, 8s the
// deepest pre-pool map, 4s the deepest two. U-Net variants keep all.
std::vector<std::size_t> skip_levels_for(const ArchitectureSpec& spec) {
    std::size_t count = 0;
    switch (spec.id) {
        case Architecture::FCN16s: count = 0; break;
        case Architecture::FCN8s: count = 1; break;
        case Architecture::FCN4s: count = 2; break;
        case Architecture::UNet:
        case Architecture::ResidualSkip: count = spec.depth; break;
    }
    count = std::min(count, spec.depth);
    std::vector<std::size_t> levels;
    for (std::size_t level = spec.depth - count; level < spec.depth; ++level) levels.push_back(level);
    return levels;
}

}  // namespace

Model::Layer Model::add_conv(const std::string& prefix, std::size_t in, std::size_t out, std::size_t kernel,
                            bool rectified) {
    Layer layer{layout_.size(), 0, in, out, kernel, true};
    for (std::size_t o = 0; o < out; ++o) {
        layout_.add_group(prefix + ".filter" + std::to_string(o), GroupRole::ConvFilter, {in, kernel, kernel});
        fan_in_.push_back(in * kernel * kernel);
        gain_.push_back(rectified ? 2.0 : 1.0);
    }
    layer.bias_offset = layout_.size();
    layout_.add_group(prefix + ".bias", GroupRole::Bias, {out});
    fan_in_.push_back(in * kernel * kernel);
    gain_.push_back(0.0);
    return layer;
}

Model::Layer Model::add_upsample(const std::string& prefix, std::size_t in, std::size_t out) {
    Layer layer{layout_.size(), 0, in, out, 2, false};
    for (std::size_t o = 0; o < out; ++o) {
        layout_.add_group(prefix + ".filter" + std::to_string(o), GroupRole::ConvFilter, {in, 2, 2});
        fan_in_.push_back(in);
        gain_.push_back(1.0);
    }
    return layer;
}

Model::Model(ArchitectureSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    const std::size_t depth = spec_.depth;
    skip_levels_ = skip_levels_for(spec_);
    residual_blocks_.assign(depth, 0);
    if (spec_.id == Architecture::ResidualSkip) {
        for (std::size_t level = 0; level < depth; ++level)
            residual_blocks_[level] =
                spec_.residual_blocks_per_skip.empty() ? depth - level : spec_.residual_blocks_per_skip[level];
    }

    std::size_t in = spec_.in_channels;
    for (std::size_t level = 0; level < depth; ++level) {
        const std::string prefix = "enc" + std::to_string(level);
        const std::size_t c = channels_at(level);
        EncoderStage stage;
        stage.first = add_conv(prefix + ".conv_a", in, c, 3);
        stage.second = add_conv(prefix + ".conv_b", c, c, 3);
        encoder_.push_back(stage);
        in = c;
    }
    bottleneck_.first = add_conv("bottleneck.conv_a", in, channels_at(depth), 3);
    bottleneck_.second = add_conv("bottleneck.conv_b", channels_at(depth), channels_at(depth), 3);

    decoder_.resize(depth);
    for (std::size_t level = depth; level-- > 0;) {
        const std::string prefix = "dec" + std::to_string(level);
        const std::size_t c = channels_at(level);
        DecoderStage& stage = decoder_[level];
        stage.upsample = add_upsample(prefix + ".up", channels_at(level + 1), c);
        stage.skip = std::find(skip_levels_.begin(), skip_levels_.end(), level) != skip_levels_.end();
        if (stage.skip) {
            for (std::size_t b = 0; b < residual_blocks_[level]; ++b) {
                const std::string block = prefix + ".skip.res" + std::to_string(b);
                stage.residual.push_back(Block{add_conv(block + ".conv_a", c, c, 3), add_conv(block + ".conv_b", c, c, 3)});
            }
            stage.merge = add_conv(prefix + ".merge", 2 * c, c, 3);
        }
        stage.trunk = add_conv(prefix + ".trunk", c, c, 3);
    }
    output_ = add_conv("output", channels_at(0), spec_.out_channels, 1, false);
}

Var Model::apply(Graph& graph, std::span<const double> params, const Layer& layer, Var x) const {
    const std::size_t kernel = layer.kernel;
    const std::size_t count = layer.out_channels * layer.in_channels * kernel * kernel;
    std::vector<double> w(params.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset),
                          params.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset + count));
    Var weight = graph.parameter(Tensor({layer.out_channels, layer.in_channels, kernel, kernel}, std::move(w)),
                                 layer.weight_offset);
    if (!layer.has_bias) return upsample2x(x, weight);
    std::vector<double> b(params.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset),
                          params.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset + layer.out_channels));
    Var bias = graph.parameter(Tensor({layer.out_channels}, std::move(b)), layer.bias_offset);
    return conv2d(x, weight, bias, 1, kernel / 2);
}

Var Model::forward(Graph& graph, std::span<const double> params, Var input) const {
    if (params.size() != layout_.size())
        throw std::invalid_argument("forward: " + name() + " expects " + std::to_string(layout_.size()) +
                                    " parameters, got " + std::to_string(params.size()));
    const Shape& shape = input.shape();
    if (shape.size() != 4 || shape[1] != spec_.in_channels)
        throw std::invalid_argument("forward: input must be [B," + std::to_string(spec_.in_channels) + ",H,W], got " +
                                    to_string(shape));
    const std::size_t divisor = required_divisor();
    if (shape[2] % divisor != 0 || shape[3] % divisor != 0)
        throw std::invalid_argument("forward: input extents " + std::to_string(shape[2]) + "x" +
                                    std::to_string(shape[3]) + " must be divisible by 2^depth = " +
                                    std::to_string(divisor));

    std::vector<Var> pre_pool;
    Var x = input;
    for (const auto& stage : encoder_) {
        x = relu(apply(graph, params, stage.first, x));
        x = relu(apply(graph, params, stage.second, x));
        pre_pool.push_back(x);
        x = maxpool2d(x, 2);
    }
    x = relu(apply(graph, params, bottleneck_.first, x));
    x = relu(apply(graph, params, bottleneck_.second, x));

    for (std::size_t level = spec_.depth; level-- > 0;) {
        const DecoderStage& stage = decoder_[level];
        x = apply(graph, params, stage.upsample, x);
        if (stage.skip) {
            Var s = pre_pool[level];
            for (const auto& block : stage.residual) {
                Var h = relu(apply(graph, params, block.first, s));
                h = apply(graph, params, block.second, h);
                s = relu(add(h, s));
            }
            x = relu(apply(graph, params, stage.merge, concat_channels(x, s)));
        }
        x = relu(apply(graph, params, stage.trunk, x));
    }
    return apply(graph, params, output_, x);
}

Tensor Model::forward(const ParamSet& params, const Tensor& input) const {
    if (!params.same_layout(layout_)) throw std::invalid_argument("forward: parameter layout does not match " + name());
    Graph graph;
    return forward(graph, params.values(), graph.constant(input)).value();
}

ParamSet Model::initial_params(std::uint64_t seed) const {
    return init_params(*this, seed);
}

Model build(const ArchitectureSpec& spec) {
    return Model(spec);
}

ParamSet init_params(const Model& model, std::uint64_t seed) {
    ParamSet params = model.layout();
    std::mt19937_64 rng(seed);
    for (std::size_t g = 0; g < params.group_count(); ++g) {
        if (params.group(g).role != GroupRole::ConvFilter) continue;
        std::normal_distribution<double> normal(0.0, std::sqrt(model.init_variance(g)));
        for (double& v : params.group_values(g)) v = normal(rng);
    }
    return params;
}

ParamSet init_params(const ArchitectureSpec& spec, std::uint64_t seed) {
    return init_params(Model(spec), seed);
}

std::vector<std::size_t> enumerate_filters(const ParamSet& params) {
    return params.filter_indices();
}

}  // namespace fcnscape

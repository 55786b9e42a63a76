#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcnscape/graph.hpp"
#include "fcnscape/param_set.hpp"

namespace fcnscape {

enum class Architecture { FCN16s, FCN8s, FCN4s, UNet, ResidualSkip };

std::string to_string(Architecture id);
// Accepts fcn16s, fcn8s, fcn4s, unet, resskip.
Architecture parse_architecture(const std::string& name);
const std::vector<std::string>& architecture_names();

struct ArchitectureSpec {
    Architecture id = Architecture::UNet;
    std::size_t depth = 3;
    std::size_t base_channels = 8;
    // Residual blocks on each skip path, finest level first. Empty selects
    // depth - level blocks at each level. Only used by ResidualSkip.
    std::vector<std::size_t> residual_blocks_per_skip;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;

    bool operator==(const ArchitectureSpec&) const = default;
};

void validate(const ArchitectureSpec& spec);

// Anything with a flat parameter layout and a differentiable forward pass.
class Network {
public:
    virtual ~Network() = default;
    virtual std::string name() const = 0;
    virtual const ParamSet& layout() const = 0;
    virtual Var forward(Graph& graph, std::span<const double> params, Var input) const = 0;
    virtual ParamSet initial_params(std::uint64_t seed) const = 0;
    std::size_t param_count() const { return layout().size(); }
};

// Encoder-decoder FCN. Every variant shares the encoder (two 3x3 convs then
// 2x2 max pooling per level), a two-conv bottleneck, and a decoder that
// upsamples with a learned stride-2 transposed conv and refines with one 3x3
// conv per level. Levels with a skip connection concatenate the pre-pool
// encoder map (optionally run through residual blocks) with the upsampled map
// and merge them with an extra 3x3 conv. A final 1x1 conv produces the output.
class Model final : public Network {
public:
    explicit Model(ArchitectureSpec spec);

    const ArchitectureSpec& spec() const { return spec_; }
    std::string name() const override { return to_string(spec_.id); }
    const ParamSet& layout() const override { return layout_; }
    ParamSet initial_params(std::uint64_t seed) const override;

    // Input height and width must be multiples of this.
    std::size_t required_divisor() const { return std::size_t{1} << spec_.depth; }
    std::size_t channels_at(std::size_t level) const { return spec_.base_channels << level; }
    // Levels (0 = full resolution) that carry a skip connection.
    const std::vector<std::size_t>& skip_levels() const { return skip_levels_; }
    std::size_t residual_blocks_at(std::size_t level) const { return residual_blocks_.at(level); }
    // Number of inputs feeding one output unit through the given group.
    std::size_t fan_in(std::size_t group) const { return fan_in_.at(group); }
    // gain / fan_in, with gain 2 for filters feeding a ReLU and 1 for the
    // linear upsampling and output layers.
    double init_variance(std::size_t group) const { return gain_.at(group) / static_cast<double>(fan_in_.at(group)); }

    Var forward(Graph& graph, std::span<const double> params, Var input) const override;
    Tensor forward(const ParamSet& params, const Tensor& input) const;

private:
    struct Layer {
        std::size_t weight_offset = 0;
        std::size_t bias_offset = 0;
        std::size_t in_channels = 0;
        std::size_t out_channels = 0;
        std::size_t kernel = 3;
        bool has_bias = true;
    };
    struct Block {
        Layer first, second;
    };
    struct EncoderStage {
        Layer first, second;
    };
    struct DecoderStage {
        Layer upsample;
        bool skip = false;
        std::vector<Block> residual;
        Layer merge;
        Layer trunk;
    };

    Layer add_conv(const std::string& prefix, std::size_t in, std::size_t out, std::size_t kernel,
                   bool rectified = true);
    Layer add_upsample(const std::string& prefix, std::size_t in, std::size_t out);
    Var apply(Graph& graph, std::span<const double> params, const Layer& layer, Var x) const;

    ArchitectureSpec spec_;
    ParamSet layout_;
    std::vector<std::size_t> skip_levels_;
    std::vector<std::size_t> residual_blocks_;
    std::vector<std::size_t> fan_in_;
    std::vector<double> gain_;
    std::vector<EncoderStage> encoder_;
    EncoderStage bottleneck_;
    std::vector<DecoderStage> decoder_;  // indexed by level
    Layer output_;
};

Model build(const ArchitectureSpec& spec);

// He initialization: each filter ~ N(0, init_variance), biases zero.
ParamSet init_params(const Model& model, std::uint64_t seed);
ParamSet init_params(const ArchitectureSpec& spec, std::uint64_t seed);

// Indices of the conv-filter groups, in group order.
std::vector<std::size_t> enumerate_filters(const ParamSet& params);

}  // namespace fcnscape

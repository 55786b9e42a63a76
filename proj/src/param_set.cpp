#include "fcnscape/param_set.hpp"

#include <stdexcept>

namespace fcnscape {

std::string to_string(GroupRole role) {
    return role == GroupRole::ConvFilter ? "conv-filter" : "bias";
}

GroupRole parse_group_role(const std::string& text) {
    if (text == "conv-filter") return GroupRole::ConvFilter;
    if (text == "bias") return GroupRole::Bias;
    throw std::invalid_argument("unknown group role '" + text + "'");
}

ParamSet::ParamSet(std::vector<FilterGroup> groups, std::vector<double> values)
    : groups_(std::move(groups)), values_(std::move(values)) {
    std::size_t expected = 0;
    for (const auto& g : groups_) {
        if (g.offset != expected)
            throw std::invalid_argument("ParamSet: group '" + g.name + "' is not contiguous with its predecessor");
        expected += g.size();
    }
    if (expected != values_.size())
        throw std::invalid_argument("ParamSet: groups cover " + std::to_string(expected) + " values but " +
                                    std::to_string(values_.size()) + " were given");
}

std::size_t ParamSet::add_group(std::string name, GroupRole role, Shape shape) {
    FilterGroup g{std::move(name), role, std::move(shape), values_.size()};
    values_.resize(values_.size() + g.size(), 0.0);
    groups_.push_back(std::move(g));
    return groups_.size() - 1;
}

std::span<double> ParamSet::group_values(std::size_t i) {
    const auto& g = groups_.at(i);
    return std::span<double>(values_).subspan(g.offset, g.size());
}

std::span<const double> ParamSet::group_values(std::size_t i) const {
    const auto& g = groups_.at(i);
    return std::span<const double>(values_).subspan(g.offset, g.size());
}

std::vector<std::size_t> ParamSet::filter_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < groups_.size(); ++i)
        if (groups_[i].role == GroupRole::ConvFilter) out.push_back(i);
    return out;
}

ParamSet ParamSet::with_values(std::vector<double> values) const {
    return ParamSet(groups_, std::move(values));
}

}  // namespace fcnscape

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcnscape/tensor.hpp"

namespace fcnscape {

enum class GroupRole { ConvFilter, Bias };

std::string to_string(GroupRole role);
GroupRole parse_group_role(const std::string& text);

// A contiguous slice [offset, offset + size) of the flat parameter vector.
// Every output channel of a convolution is its own ConvFilter group.
struct FilterGroup {
    std::string name;
    GroupRole role = GroupRole::ConvFilter;
    Shape shape;
    std::size_t offset = 0;

    std::size_t size() const { return shape_size(shape); }
    bool operator==(const FilterGroup&) const = default;
};

// Ordered filter groups over one flat vector of values.
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(std::vector<FilterGroup> groups, std::vector<double> values);

    // Appends a group (values zero) and returns its index.
    std::size_t add_group(std::string name, GroupRole role, Shape shape);

    const std::vector<FilterGroup>& groups() const { return groups_; }
    const FilterGroup& group(std::size_t i) const { return groups_.at(i); }
    std::size_t group_count() const { return groups_.size(); }
    std::size_t size() const { return values_.size(); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<double> group_values(std::size_t i);
    std::span<const double> group_values(std::size_t i) const;

    // Indices of ConvFilter groups in group order.
    std::vector<std::size_t> filter_indices() const;

    bool same_layout(const ParamSet& other) const { return groups_ == other.groups_; }
    ParamSet with_values(std::vector<double> values) const;

    bool operator==(const ParamSet&) const = default;

private:
    std::vector<FilterGroup> groups_;
    std::vector<double> values_;
};

}  // namespace fcnscape

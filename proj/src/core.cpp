// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/core.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "ucbprune/error.hpp"

namespace ucbprune {

std::size_t TensorShape::size() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

std::size_t total_size(const std::vector<TensorShape>& shapes) {
  std::size_t n = 0;
  for (const auto& s : shapes) n += s.size();
  return n;
}

std::vector<std::uint8_t> default_prunable(const std::vector<TensorShape>& shapes) {
  std::vector<std::uint8_t> out;
  for (const auto& s : shapes) {
    out.insert(out.end(), s.size(), s.dims.size() == 2 ? 1 : 0);
  }
  return out;
}

}  // namespace

ParamState::ParamState(std::vector<double> values, std::vector<TensorShape> shapes)
    : ParamState(std::move(values), shapes, default_prunable(shapes)) {}

ParamState::ParamState(std::vector<double> values, std::vector<TensorShape> shapes,
                       std::vector<std::uint8_t> prunable)
    : values_(std::move(values)), shapes_(std::move(shapes)), prunable_(std::move(prunable)) {
  if (total_size(shapes_) != values_.size()) {
    throw DimensionError("shape directory covers " + std::to_string(total_size(shapes_)) +
                         " entries but the parameter vector has " +
                         std::to_string(values_.size()));
  }
  if (prunable_.size() != values_.size()) {
    throw DimensionError("prunable flags have length " + std::to_string(prunable_.size()) +
                         ", expected " + std::to_string(values_.size()));
  }
}

std::size_t ParamState::prunable_count() const {
  return static_cast<std::size_t>(std::count_if(prunable_.begin(), prunable_.end(),
                                                [](std::uint8_t b) { return b != 0; }));
}

std::vector<std::size_t> ParamState::prunable_indices() const {
  std::vector<std::size_t> out;
  out.reserve(prunable_count());
  for (std::size_t j = 0; j < prunable_.size(); ++j) {
    if (prunable_[j]) out.push_back(j);
  }
  return out;
}

std::size_t ParamState::offset_of(std::size_t tensor) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < tensor; ++i) off += shapes_.at(i).size();
  return off;
}

ParamState ParamState::with_values(std::vector<double> values) const {
  return ParamState(std::move(values), shapes_, prunable_);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

std::size_t Mask::count_where(std::span<const std::uint8_t> prunable) const {
  if (prunable.size() != bits_.size()) {
    throw DimensionError("mask/prunable length mismatch");
  }
  std::size_t n = 0;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (prunable[j] && bits_[j]) ++n;
  }
  return n;
}

GroupPartition::GroupPartition(std::vector<std::vector<std::size_t>> groups)
    : groups_(std::move(groups)) {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].empty()) {
      throw PartitionError("group " + std::to_string(g) + " is empty");
    }
  }
}

void GroupPartition::validate(std::size_t d, std::span<const std::uint8_t> prunable) const {
  if (prunable.size() != d) throw DimensionError("prunable flags do not match d");
  std::vector<std::uint8_t> seen(d, 0);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (std::size_t j : groups_[g]) {
      if (j >= d) {
        throw PartitionError("group " + std::to_string(g) + " references index " +
                             std::to_string(j) + " >= d=" + std::to_string(d));
      }
      if (seen[j]) throw PartitionError("index " + std::to_string(j) + " is in two groups");
      if (!prunable[j]) {
        throw PartitionError("index " + std::to_string(j) + " is grouped but not prunable");
      }
      seen[j] = 1;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (prunable[j] && !seen[j]) {
      throw PartitionError("prunable index " + std::to_string(j) + " belongs to no group");
    }
  }
}

GroupPartition GroupPartition::singletons(const ParamState& params) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t j : params.prunable_indices()) groups.push_back({j});
  return GroupPartition(std::move(groups));
}

namespace {

// Walks each prunable 2-D tensor and emits its columns (by_column) or rows.
GroupPartition matrix_slices(const ParamState& params, bool by_column) {
  std::vector<std::vector<std::size_t>> groups;
  std::size_t off = 0;
  for (const auto& shape : params.shapes()) {
    const std::size_t n = shape.size();
    bool all_prunable = n > 0;
    for (std::size_t j = off; j < off + n; ++j) all_prunable = all_prunable && params.is_prunable(j);
    if (shape.dims.size() == 2 && all_prunable) {
      const std::size_t rows = shape.dims[0];
      const std::size_t cols = shape.dims[1];
      const std::size_t outer = by_column ? cols : rows;
      const std::size_t inner = by_column ? rows : cols;
      for (std::size_t a = 0; a < outer; ++a) {
        std::vector<std::size_t> group;
        group.reserve(inner);
        for (std::size_t b = 0; b < inner; ++b) {
          group.push_back(by_column ? off + b * cols + a : off + a * cols + b);
        }
        groups.push_back(std::move(group));
      }
    } else {
      // Partially prunable or non-matrix tensors fall back to singletons.
      for (std::size_t j = off; j < off + n; ++j) {
        if (params.is_prunable(j)) groups.push_back({j});
      }
    }
    off += n;
  }
  return GroupPartition(std::move(groups));
}

}  // namespace

GroupPartition GroupPartition::columns(const ParamState& params) {
  return matrix_slices(params, true);
}

GroupPartition GroupPartition::rows(const ParamState& params) {
  return matrix_slices(params, false);
}

ParamState apply_mask(const ParamState& params, const Mask& mask) {
  if (mask.size() != params.size()) {
    throw DimensionError("mask has length " + std::to_string(mask.size()) +
                         ", parameters have length " + std::to_string(params.size()));
  }
  std::vector<double> out(params.values().begin(), params.values().end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!mask[j] && params.is_prunable(j)) out[j] = 0.0;
  }
  return params.with_values(std::move(out));
}

Mask expand_group_mask(std::span<const std::uint8_t> group_mask,
                       const GroupPartition& partition, std::size_t d) {
  if (group_mask.size() != partition.size()) {
    throw DimensionError("group mask has length " + std::to_string(group_mask.size()) +
                         " but the partition has " + std::to_string(partition.size()) +
                         " groups");
  }
  Mask out = Mask::ones(d);
  for (std::size_t g = 0; g < partition.size(); ++g) {
    for (std::size_t j : partition[g]) {
      if (j >= d) {
        throw PartitionError("group " + std::to_string(g) + " references index " +
                             std::to_string(j) + " >= d=" + std::to_string(d));
      }
      out.set(j, group_mask[g] != 0);
    }
  }
  return out;
}

Mask expand_group_mask(const Mask& group_mask, const GroupPartition& partition, std::size_t d) {
  return expand_group_mask(group_mask.bits(), partition, d);
}

}  // namespace ucbprune

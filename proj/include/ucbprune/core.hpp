// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Parameter, mask and grouping representations shared by every module.
//
// Parameters live in one flat vector of doubles. A shape directory maps
// contiguous slices of that vector to named tensors, and a prunable flag per
// entry says which entries the projection is allowed to zero.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ucbprune {

struct TensorShape {
  std::string name;
  std::vector<std::size_t> dims;

  std::size_t size() const;
};

class ParamState {
 public:
  ParamState() = default;

  // Prunable flags default to "every entry of a 2-D tensor".
  ParamState(std::vector<double> values, std::vector<TensorShape> shapes);
  ParamState(std::vector<double> values, std::vector<TensorShape> shapes,
             std::vector<std::uint8_t> prunable);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::vector<TensorShape>& shapes() const { return shapes_; }
  std::span<const std::uint8_t> prunable() const { return prunable_; }
  bool is_prunable(std::size_t j) const { return prunable_[j] != 0; }

  std::size_t prunable_count() const;
  std::vector<std::size_t> prunable_indices() const;

  // Offset of the first entry of shapes()[tensor] in the flat vector.
  std::size_t offset_of(std::size_t tensor) const;

  // Same shapes and prunable set with new values.
  ParamState with_values(std::vector<double> values) const;

 private:
  std::vector<double> values_;
  std::vector<TensorShape> shapes_;
  std::vector<std::uint8_t> prunable_;
};

// Keep/drop bits over the flat parameter vector (or over groups before
// expansion). 1 keeps the entry.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  static Mask ones(std::size_t n) { return Mask(std::vector<std::uint8_t>(n, 1)); }
  static Mask zeros(std::size_t n) { return Mask(std::vector<std::uint8_t>(n, 0)); }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t j) const { return bits_[j] != 0; }
  void set(std::size_t j, bool keep) { bits_[j] = keep ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  // Retained entries among the prunable ones.
  std::size_t count_where(std::span<const std::uint8_t> prunable) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Disjoint, non-empty index sets whose union is the prunable set.
class GroupPartition {
 public:
  GroupPartition() = default;
  explicit GroupPartition(std::vector<std::vector<std::size_t>> groups);

  std::size_t size() const { return groups_.size(); }
  const std::vector<std::size_t>& operator[](std::size_t g) const { return groups_[g]; }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  auto begin() const { return groups_.begin(); }
  auto end() const { return groups_.end(); }

  // Throws PartitionError unless the groups exactly tile the prunable set
  // of a d-entry vector.
  void validate(std::size_t d, std::span<const std::uint8_t> prunable) const;

  // One group per prunable entry, in index order.
  static GroupPartition singletons(const ParamState& params);
  // One group per column of every prunable 2-D tensor (entries that share
  // an input index).
  static GroupPartition columns(const ParamState& params);
  // One group per row of every prunable 2-D tensor.
  static GroupPartition rows(const ParamState& params);

 private:
  std::vector<std::vector<std::size_t>> groups_;
};

// Values where mask=1, exactly 0 where mask=0. Non-prunable entries are
// never zeroed, whatever the mask says.
ParamState apply_mask(const ParamState& params, const Mask& mask);

// Entry j receives group_mask[g] for j in group g; entries that belong to
// no group are kept.
Mask expand_group_mask(std::span<const std::uint8_t> group_mask,
                       const GroupPartition& partition, std::size_t d);
Mask expand_group_mask(const Mask& group_mask, const GroupPartition& partition,
                       std::size_t d);

}  // namespace ucbprune

// Copyright 2026 The qcomb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "qcomb/error.hpp"

namespace qcomb {

/// A named finite-dimensional Hilbert space factor.
struct Space {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Space&, const Space&) = default;
};

/// Ordered tuple of spaces with pairwise distinct labels.  The order fixes
/// the basis ordering of any operator living on the tuple: the leftmost space
/// carries the most significant index.
class SpaceTuple {
 public:
  SpaceTuple() = default;

  SpaceTuple(std::initializer_list<Space> spaces)
      : SpaceTuple(std::vector<Space>(spaces)) {}

  explicit SpaceTuple(std::vector<Space> spaces) : spaces_(std::move(spaces)) {
    std::unordered_set<std::string> seen;
    for (const auto& s : spaces_) {
      if (s.dim < 1) {
        throw DimMismatch("space '" + s.label + "' has dimension 0");
      }
      if (!seen.insert(s.label).second) {
        throw OverlappingLabels("label '" + s.label + "' repeated in tuple");
      }
    }
  }

  std::size_t size() const noexcept { return spaces_.size(); }
  bool empty() const noexcept { return spaces_.empty(); }
  const Space& operator[](std::size_t i) const { return spaces_[i]; }
  auto begin() const noexcept { return spaces_.begin(); }
  auto end() const noexcept { return spaces_.end(); }
  const std::vector<Space>& spaces() const noexcept { return spaces_; }

  std::size_t total_dim() const noexcept {
    std::size_t d = 1;
    for (const auto& s : spaces_) d *= s.dim;
    return d;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(spaces_.size());
    for (const auto& s : spaces_) out.push_back(s.label);
    return out;
  }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    out.reserve(spaces_.size());
    for (const auto& s : spaces_) out.push_back(s.dim);
    return out;
  }

  std::optional<std::size_t> position(const std::string& label) const {
    for (std::size_t i = 0; i < spaces_.size(); ++i) {
      if (spaces_[i].label == label) return i;
    }
    return std::nullopt;
  }

  bool contains(const std::string& label) const {
    return position(label).has_value();
  }

  const Space& at(const std::string& label) const {
    auto p = position(label);
    if (!p) throw UnknownLabel("label '" + label + "' not in tuple");
    return spaces_[*p];
  }

  /// Tuple restricted to `labels`, in the order given.
  SpaceTuple select(const std::vector<std::string>& labels) const {
    std::vector<Space> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(at(l));
    return SpaceTuple(std::move(out));
  }

  /// Same labels as a set; order is ignored.
  bool same_labels(const SpaceTuple& other) const {
    if (other.size() != size()) return false;
    for (const auto& s : spaces_) {
      auto p = other.position(s.label);
      if (!p || other[*p].dim != s.dim) return false;
    }
    return true;
  }

  friend bool operator==(const SpaceTuple&, const SpaceTuple&) = default;

 private:
  std::vector<Space> spaces_;
};

/// Spaces of `a` whose labels also occur in `b`, in `a`'s order.
inline SpaceTuple intersect(const SpaceTuple& a, const SpaceTuple& b) {
  std::vector<Space> out;
  for (const auto& s : a) {
    if (auto p = b.position(s.label)) {
      if (b[*p].dim != s.dim) {
        throw DimMismatch("label '" + s.label + "' has dim " +
                          std::to_string(s.dim) + " and " +
                          std::to_string(b[*p].dim));
      }
      out.push_back(s);
    }
  }
  return SpaceTuple(std::move(out));
}

/// Spaces of `a` whose labels do not occur in `b`, in `a`'s order.
inline SpaceTuple difference(const SpaceTuple& a, const SpaceTuple& b) {
  std::vector<Space> out;
  for (const auto& s : a) {
    if (!b.contains(s.label)) out.push_back(s);
  }
  return SpaceTuple(std::move(out));
}

/// Concatenation; labels must be disjoint.
inline SpaceTuple concat(const SpaceTuple& a, const SpaceTuple& b) {
  std::vector<Space> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return SpaceTuple(std::move(out));
}

inline SpaceTuple difference(const SpaceTuple& a,
                             const std::vector<std::string>& labels) {
  std::vector<Space> out;
  for (const auto& s : a) {
    if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) {
      out.push_back(s);
    }
  }
  return SpaceTuple(std::move(out));
}

}  // namespace qcomb

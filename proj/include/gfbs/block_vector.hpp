#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gfbs/types.hpp"

namespace gfbs {

// Ordered block names and sizes of a product space, e.g. (u, v, p).
class BlockLayout {
 public:
  BlockLayout() = default;
  BlockLayout(std::vector<std::pair<std::string, Index>> blocks);

  static BlockLayout single(Index n, const std::string& name = "x");

  Index num_blocks() const { return static_cast<Index>(names_.size()); }
  Index total_dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
  const std::string& name(Index i) const { return names_[i]; }
  Index size(Index i) const { return offsets_[i + 1] - offsets_[i]; }
  Index offset(Index i) const { return offsets_[i]; }
  Index index_of(const std::string& name) const;

  bool operator==(const BlockLayout& other) const {
    return names_ == other.names_ && offsets_ == other.offsets_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Index> offsets_{0};
};

// Element of a product space: a layout plus one flat coordinate vector.
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(BlockLayout layout);
  BlockVector(BlockLayout layout, Vector flat);

  static BlockVector from_blocks(const std::vector<std::pair<std::string, Vector>>& blocks);

  const BlockLayout& layout() const { return layout_; }
  Index total_dim() const { return layout_.total_dim(); }

  const Vector& flatten() const { return data_; }
  Vector& flat() { return data_; }

  auto block(Index i) { return data_.segment(layout_.offset(i), layout_.size(i)); }
  auto block(Index i) const { return data_.segment(layout_.offset(i), layout_.size(i)); }
  auto block(const std::string& name) { return block(layout_.index_of(name)); }
  auto block(const std::string& name) const { return block(layout_.index_of(name)); }

  std::vector<std::pair<std::string, Vector>> blocks() const;

 private:
  BlockLayout layout_;
  Vector data_;
};

BlockVector unflatten(const BlockLayout& layout, const Vector& flat);

}  // namespace gfbs

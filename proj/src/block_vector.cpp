#include "gfbs/block_vector.hpp"

#include <set>

#include "gfbs/errors.hpp"

namespace gfbs {

BlockLayout::BlockLayout(std::vector<std::pair<std::string, Index>> blocks) {
  std::set<std::string> seen;
  for (auto& [name, n] : blocks) {
    if (n < 0) fail(ErrorCode::DimensionMismatch, "negative block size for '" + name + "'");
    if (!seen.insert(name).second) fail(ErrorCode::DimensionMismatch, "duplicate block name '" + name + "'");
    names_.push_back(name);
    offsets_.push_back(offsets_.back() + n);
  }
}

BlockLayout BlockLayout::single(Index n, const std::string& name) { return BlockLayout({{name, n}}); }

Index BlockLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Index>(i);
  fail(ErrorCode::DimensionMismatch, "no block named '" + name + "'");
}

BlockVector::BlockVector(BlockLayout layout)
    : layout_(std::move(layout)), data_(Vector::Zero(layout_.total_dim())) {}

BlockVector::BlockVector(BlockLayout layout, Vector flat) : layout_(std::move(layout)), data_(std::move(flat)) {
  if (data_.size() != layout_.total_dim())
    fail(ErrorCode::DimensionMismatch, "flat vector of size " + std::to_string(data_.size()) +
                                           " does not match layout of size " + std::to_string(layout_.total_dim()));
}

BlockVector BlockVector::from_blocks(const std::vector<std::pair<std::string, Vector>>& blocks) {
  std::vector<std::pair<std::string, Index>> sizes;
  for (auto& [name, v] : blocks) sizes.emplace_back(name, v.size());
  BlockVector out{BlockLayout(sizes)};
  for (std::size_t i = 0; i < blocks.size(); ++i) out.block(static_cast<Index>(i)) = blocks[i].second;
  return out;
}

std::vector<std::pair<std::string, Vector>> BlockVector::blocks() const {
  std::vector<std::pair<std::string, Vector>> out;
  for (Index i = 0; i < layout_.num_blocks(); ++i) out.emplace_back(layout_.name(i), Vector(block(i)));
  return out;
}

BlockVector unflatten(const BlockLayout& layout, const Vector& flat) { return BlockVector(layout, flat); }

}  // namespace gfbs

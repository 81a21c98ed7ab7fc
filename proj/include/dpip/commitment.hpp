#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpip/distribution.hpp"

namespace dpip {

using Hash = std::array<std::uint8_t, 32>;
using HashKey = std::array<std::uint8_t, 32>;

/// SHA-256 of the given bytes.
Hash sha256(std::span<const std::uint8_t> data);

std::string hex_encode(std::span<const std::uint8_t> data);

/// Node label: total probability of the subtree plus the hash binding the
/// children. Leaves carry a zero hash field.
struct NodeLabel {
  double mass = 0.0;
  Hash hash{};

  bool operator==(const NodeLabel&) const = default;
};

/// Authenticated quantile opening: leaf index, its mass q = Q(x), the CDF
/// value phi through x, and the sibling labels along the root-to-leaf path.
struct Opening {
  std::uint64_t leaf_index = 0;
  double q = 0.0;
  double phi = 0.0;
  std::vector<NodeLabel> path;  // root-to-leaf sibling labels

  std::string to_json() const;
};

/// Complete binary hash tree over the leaf masses of a distribution padded
/// with zero-mass leaves to the next power of two. Internal labels are
/// (sum of children masses, H(key || left label || right label)) with label
/// bytes serialized as big-endian IEEE double followed by the 32-byte hash.
/// Immutable after construction.
class CommitmentTree {
 public:
  CommitmentTree(const Distribution& q, const HashKey& key);

  std::size_t depth() const { return depth_; }
  std::size_t leaf_count() const { return std::size_t{1} << depth_; }
  const NodeLabel& root() const { return nodes_[1]; }
  const NodeLabel& node(std::size_t heap_index) const {
    return nodes_[heap_index];
  }

  /// The unique leaf x with mu in (Phi(x) - Q(x), Phi(x)], found by the
  /// mass-guided binary descent, together with its authentication path.
  /// Requires mu in (0,1].
  Opening open_quantile(double mu) const;

  /// Opening for a specific leaf (used by dishonest strategies).
  Opening open_leaf(std::uint64_t leaf_index) const;

 private:
  std::size_t depth_;
  std::vector<NodeLabel> nodes_;  // 1-based heap layout, nodes_[1] = root
};

/// Checks an opening against a committed root: the quantile interval
/// contains mu, the recomputed path hashes match the root, parent masses
/// equal the sum of their children by construction of the recomputation,
/// and the claimed CDF value is consistent with the left-sibling masses.
/// Never throws on adversarial input; invalid is a value.
bool verify_opening(const NodeLabel& root, double mu, const Opening& opening,
                    const HashKey& key);

}  // namespace dpip

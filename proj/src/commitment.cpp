#include "dpip/commitment.hpp"

#include <openssl/sha.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "json.hpp"

namespace dpip {

Hash sha256(std::span<const std::uint8_t> data) {
  Hash out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

std::string hex_encode(std::span<const std::uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

namespace {

// Label bytes: mass as big-endian IEEE double, then the 32-byte hash.
void serialize_label(const NodeLabel& label, std::uint8_t* out) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(label.mass);
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  }
  std::memcpy(out + 8, label.hash.data(), 32);
}

Hash hash_children(const HashKey& key, const NodeLabel& left,
                   const NodeLabel& right) {
  std::array<std::uint8_t, 32 + 40 + 40> buf;
  std::memcpy(buf.data(), key.data(), 32);
  serialize_label(left, buf.data() + 32);
  serialize_label(right, buf.data() + 72);
  return sha256(buf);
}

}  // namespace

std::string Opening::to_json() const {
  nlohmann::json j;
  j["x"] = leaf_index;
  j["q"] = q;
  j["phi"] = phi;
  nlohmann::json path_json = nlohmann::json::array();
  for (const auto& label : path) {
    path_json.push_back({{"p", label.mass}, {"h", hex_encode(label.hash)}});
  }
  j["path"] = path_json;
  return j.dump();
}

CommitmentTree::CommitmentTree(const Distribution& q, const HashKey& key) {
  depth_ = 0;
  while ((std::size_t{1} << depth_) < q.domain_size()) ++depth_;
  const std::size_t leaves = std::size_t{1} << depth_;
  nodes_.assign(2 * leaves, NodeLabel{});
  for (std::size_t i = 0; i < q.domain_size(); ++i) {
    nodes_[leaves + i].mass = q.mass(i);
  }
  // Pad leaves keep mass 0 and are hashed like any other leaf.
  for (std::size_t i = leaves - 1; i >= 1; --i) {
    nodes_[i].mass = nodes_[2 * i].mass + nodes_[2 * i + 1].mass;
    nodes_[i].hash = hash_children(key, nodes_[2 * i], nodes_[2 * i + 1]);
  }
}

Opening CommitmentTree::open_quantile(double mu) const {
  if (!(mu > 0.0) || mu > 1.0) {
    throw std::invalid_argument("quantile mu must lie in (0,1]");
  }
  // Root mass is 1 within 1e-9; clamp so the walk stays in range.
  mu = std::min(mu, root().mass);
  std::size_t node = 1;
  double lo = 0.0;
  Opening opening;
  for (std::size_t level = 0; level < depth_; ++level) {
    const NodeLabel& left = nodes_[2 * node];
    const NodeLabel& right = nodes_[2 * node + 1];
    if (mu <= lo + left.mass) {
      opening.path.push_back(right);
      node = 2 * node;
    } else {
      lo += left.mass;
      opening.path.push_back(left);
      node = 2 * node + 1;
    }
  }
  opening.leaf_index = node - leaf_count();
  opening.q = nodes_[node].mass;
  opening.phi = lo + opening.q;
  return opening;
}

Opening CommitmentTree::open_leaf(std::uint64_t leaf_index) const {
  if (leaf_index >= leaf_count()) {
    throw std::invalid_argument("leaf index out of range");
  }
  Opening opening;
  opening.leaf_index = leaf_index;
  std::size_t node = leaf_count() + leaf_index;
  opening.q = nodes_[node].mass;
  // Collect siblings leaf-to-root, then reverse; accumulate phi root-to-leaf
  // to match open_quantile's float summation order exactly.
  std::vector<NodeLabel> reversed;
  std::vector<bool> is_right;  // whether our node is the right child
  while (node > 1) {
    reversed.push_back(nodes_[node ^ 1]);
    is_right.push_back(node & 1);
    node /= 2;
  }
  opening.path.assign(reversed.rbegin(), reversed.rend());
  double lo = 0.0;
  for (std::size_t level = 0; level < opening.path.size(); ++level) {
    if (is_right[opening.path.size() - 1 - level]) {
      lo += opening.path[level].mass;
    }
  }
  opening.phi = lo + opening.q;
  return opening;
}

bool verify_opening(const NodeLabel& root, double mu, const Opening& opening,
                    const HashKey& key) {
  if (!(mu > 0.0) || mu > 1.0) return false;
  if (!std::isfinite(opening.q) || !std::isfinite(opening.phi)) return false;
  if (!(opening.q >= 0.0)) return false;
  const std::size_t depth = opening.path.size();
  if (depth == 0 || depth > 62) return false;
  if (opening.leaf_index >= (std::uint64_t{1} << depth)) return false;
  for (const auto& label : opening.path) {
    if (!std::isfinite(label.mass)) return false;
  }

  // Quantile interval check, allowing for the clamp at the root mass.
  const double mu_eff = std::min(mu, root.mass);
  if (!(mu_eff > opening.phi - opening.q && mu_eff <= opening.phi)) {
    return false;
  }

  // Recompute labels up the path. Parent masses are children sums by
  // construction, so the hash comparison at the root binds every claimed
  // mass and hash along the way.
  NodeLabel current{opening.q, Hash{}};
  double lo = 0.0;
  for (std::size_t level = depth; level-- > 0;) {
    const NodeLabel& sibling = opening.path[level];
    const bool current_is_right = (opening.leaf_index >> (depth - 1 - level)) & 1;
    if (current_is_right) {
      current = NodeLabel{sibling.mass + current.mass,
                          hash_children(key, sibling, current)};
    } else {
      current = NodeLabel{current.mass + sibling.mass,
                          hash_children(key, current, sibling)};
    }
  }
  if (current.hash != root.hash || current.mass != root.mass) return false;

  // CDF consistency: phi must equal the left-sibling prefix plus q, summed
  // root-to-leaf as the honest opener does.
  for (std::size_t level = 0; level < depth; ++level) {
    if ((opening.leaf_index >> (depth - 1 - level)) & 1) {
      lo += opening.path[level].mass;
    }
  }
  return opening.phi == lo + opening.q;
}

}  // namespace dpip

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

struct RankingOptions {
  /// Treat greek-suffixed R/GROUP placeholders as interchangeable names: only the pattern
  /// of which atoms share a placeholder matters, not which greek letter it uses.
  bool alpha_placeholders = false;
  /// Add 2D points to the atom invariant. Serializers need this so automorphic atoms with
  /// different drawn positions still get a relabeling-independent order.
  bool coordinates = false;
};

/// Relabeling-invariant ranking of atoms, as atom id -> rank in 0..n-1.
///
/// Colors are seeded with each atom's attribute tuple (label, charge, isotope, valence,
/// radical, hydrogens, aromaticity, degree, incident bond types, bracket membership) and
/// refined Morgan-style until stable. Remaining ties are split by individualizing atoms in
/// input order; every branch is explored (with automorphism pruning) and the branch yielding
/// the lexicographically smallest labeled graph wins, so isomorphic inputs receive the same
/// canonical atom sequence. Requires a valid graph.
std::map<int, int> canonical_ranking(const MolGraph& g, RankingOptions options = {});

/// Atom indices listed in canonical rank order.
std::vector<std::size_t> canonical_order(const MolGraph& g, RankingOptions options = {});

/// Edge-colored adjacency used by partition refinement: (neighbor index, edge color).
using ColoredAdjacency = std::vector<std::vector<std::pair<std::size_t, int>>>;

/// Refine `colors` (dense, 0-based) to the coarsest equitable partition. Output colors are
/// dense and order-compatible: cells keep their relative order and split in place.
std::vector<int> equitable_refinement(const ColoredAdjacency& adjacency, std::vector<int> colors);

/// +1 when sorting `values` ascending takes an even number of transpositions, else -1.
/// Values must be distinct.
int permutation_sign(std::span<const int> values);

/// Densely rank arbitrary comparable keys (equal keys share a rank).
template <class Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys);

// ---------------------------------------------------------------------------

template <class Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys) {
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(keys.size(), 0);
  int next = -1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || keys[order[k - 1]] < keys[order[k]]) ++next;
    ranks[order[k]] = next;
  }
  return ranks;
}

}  // namespace ocsrbench::graph

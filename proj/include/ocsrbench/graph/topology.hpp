#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

struct Neighbor {
  std::size_t atom;  // atom index
  std::size_t bond;  // bond index
};

/// Index-space adjacency of a valid MolGraph. Holds a reference; the graph must outlive it.
class Topology {
 public:
  explicit Topology(const MolGraph& g);

  const MolGraph& graph() const noexcept { return *g_; }
  std::size_t size() const noexcept { return adjacency_.size(); }

  std::span<const Neighbor> neighbors(std::size_t atom) const { return adjacency_[atom]; }
  std::size_t degree(std::size_t atom) const { return adjacency_[atom].size(); }
  std::optional<std::size_t> bond_between(std::size_t a, std::size_t b) const;

  std::size_t index_of(int id) const { return index_.at(id); }
  std::size_t bond_atom1(std::size_t bond) const { return ends_[bond].first; }
  std::size_t bond_atom2(std::size_t bond) const { return ends_[bond].second; }

 private:
  const MolGraph* g_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
};

}  // namespace ocsrbench::graph

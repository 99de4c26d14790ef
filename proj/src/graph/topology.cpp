#include "ocsrbench/graph/topology.hpp"

#include "ocsrbench/error.hpp"

namespace ocsrbench::graph {

Topology::Topology(const MolGraph& g) : g_(&g), adjacency_(g.atoms.size()) {
  for (std::size_t i = 0; i < g.atoms.size(); ++i) index_.emplace(g.atoms[i].id, i);
  ends_.reserve(g.bonds.size());
  for (std::size_t b = 0; b < g.bonds.size(); ++b) {
    const auto a1 = index_.find(g.bonds[b].atom1);
    const auto a2 = index_.find(g.bonds[b].atom2);
    if (a1 == index_.end() || a2 == index_.end()) {
      throw ContractViolation("Topology: bond references unknown atom id");
    }
    ends_.emplace_back(a1->second, a2->second);
    adjacency_[a1->second].push_back({a2->second, b});
    adjacency_[a2->second].push_back({a1->second, b});
  }
}

std::optional<std::size_t> Topology::bond_between(std::size_t a, std::size_t b) const {
  for (const Neighbor& n : adjacency_[a]) {
    if (n.atom == b) return n.bond;
  }
  return std::nullopt;
}

}  // namespace ocsrbench::graph

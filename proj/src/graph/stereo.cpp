#include "ocsrbench/graph/stereo.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"
#include "ocsrbench/graph/topology.hpp"

namespace ocsrbench::graph {
namespace {

int mapped(const std::map<int, int>& mapping, int id) {
  const auto it = mapping.find(id);
  return it == mapping.end() ? id : it->second;
}

// Why the stereocenter at `idx` is unusable, or nullopt when it is fine.
std::optional<std::string> stereocenter_problem(const Topology& topo, std::size_t idx) {
  const Atom& atom = topo.graph().atoms[idx];
  const auto& order = atom.stereo->neighbors;
  std::set<int> distinct(order.begin(), order.end());
  if (distinct.size() != order.size()) return "repeated neighbor in stereo order";
  if (order.size() < 3) return "stereocenter needs at least 3 distinct neighbors";
  for (int id : order) {
    if (id == kImplicitHydrogen) continue;
    const auto* other = topo.graph().find_atom(id);
    if (other == nullptr || !topo.bond_between(idx, topo.index_of(id))) {
      return "stereo order names non-neighbor atom " + std::to_string(id);
    }
  }
  return std::nullopt;
}

// Marker of the bond between `from` and `to`, read in that direction.
BondMarker marker_towards(const Topology& topo, std::size_t bond, std::size_t from) {
  const BondMarker m = topo.graph().bonds[bond].marker;
  return topo.bond_atom1(bond) == from ? m : flip(m);
}

}  // namespace

StereoSignature stereo_parity_signature(const MolGraph& g, const std::map<int, int>& mapping) {
  const Topology topo(g);
  StereoSignature sig;

  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& atom = g.atoms[i];
    if (!atom.stereo) continue;
    if (auto problem = stereocenter_problem(topo, i)) {
      throw ValidationError(*problem, "atoms[" + std::to_string(i) + "].stereo");
    }
    std::vector<int> order;
    for (int id : atom.stereo->neighbors) order.push_back(id == kImplicitHydrogen ? kImplicitHydrogen : mapped(mapping, id));
    const int tag = atom.stereo->tag == Chirality::anticlockwise ? 1 : -1;
    sig.centers[mapped(mapping, atom.id)] = tag * permutation_sign(order);
  }

  for (std::size_t b = 0; b < g.bonds.size(); ++b) {
    if (g.bonds[b].type != BondType::double_) continue;
    const std::size_t x = topo.bond_atom1(b);
    const std::size_t y = topo.bond_atom2(b);

    // Lowest-mapped marked substituent on one end, read towards the double bond. Choosing by
    // mapped id keeps conflicting marker pairs independent of bond order.
    auto marked_side = [&](std::size_t end, std::size_t other) -> std::optional<std::pair<std::size_t, BondMarker>> {
      std::optional<std::pair<std::size_t, BondMarker>> best;
      int best_id = 0;
      for (const Neighbor& nb : topo.neighbors(end)) {
        if (nb.atom == other || g.bonds[nb.bond].marker == BondMarker::none) continue;
        const int id = mapped(mapping, g.atoms[nb.atom].id);
        if (!best || id < best_id) {
          best = std::pair{nb.atom, marker_towards(topo, nb.bond, nb.atom)};
          best_id = id;
        }
      }
      return best;
    };
    const auto sx = marked_side(x, y);
    const auto sy = marked_side(y, x);
    if (!sx || !sy) continue;

    // from A towards X, and from Y towards B (= reverse of B towards Y)
    const BondMarker a_to_x = sx->second;
    const BondMarker y_to_b = flip(sy->second);
    int config = a_to_x == y_to_b ? 1 : -1;

    auto lowest_substituent = [&](std::size_t end, std::size_t other) {
      std::size_t best = end;
      int best_id = 0;
      for (const Neighbor& nb : topo.neighbors(end)) {
        if (nb.atom == other) continue;
        const int id = mapped(mapping, g.atoms[nb.atom].id);
        if (best == end || id < best_id) {
          best = nb.atom;
          best_id = id;
        }
      }
      return best;
    };
    if (lowest_substituent(x, y) != sx->first) config = -config;
    if (lowest_substituent(y, x) != sy->first) config = -config;

    const int mx = mapped(mapping, g.atoms[x].id);
    const int my = mapped(mapping, g.atoms[y].id);
    sig.double_bonds[std::minmax(mx, my)] = config;
  }
  return sig;
}

StereoSignature stereo_parity_signature(const MolGraph& g) { return stereo_parity_signature(g, {}); }

std::size_t drop_invalid_stereocenters(MolGraph& g) {
  const MolGraph snapshot = g;
  const Topology topo(snapshot);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (g.atoms[i].stereo && stereocenter_problem(topo, i)) {
      g.atoms[i].stereo.reset();
      ++dropped;
    }
  }
  return dropped;
}

}  // namespace ocsrbench::graph

#include "ocsrbench/match/aromatic.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <string>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/topology.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::match {
namespace {

using graph::BondType;
using graph::MolGraph;
using graph::Topology;

constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);

// Edge-incidence vector over GF(2).
using EdgeSet = std::vector<std::uint64_t>;

struct Candidate {
  std::vector<std::size_t> atoms;
  EdgeSet edges;
};

std::size_t components(const Topology& topo) {
  std::vector<bool> seen(topo.size(), false);
  std::size_t count = 0;
  for (std::size_t s = 0; s < topo.size(); ++s) {
    if (seen[s]) continue;
    ++count;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& nb : topo.neighbors(v)) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          queue.push_back(nb.atom);
        }
      }
    }
  }
  return count;
}

// Generic Gaussian elimination keyed by the lowest set bit of each basis row.
class Gf2Basis {
 public:
  bool insert(EdgeSet v) {
    for (const auto& [pivot, row] : rows_) {
      if (v[pivot / 64] >> (pivot % 64) & 1U) {
        for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= row[w];
      }
    }
    for (std::size_t w = 0; w < v.size(); ++w) {
      if (v[w] == 0) continue;
      const std::size_t pivot = w * 64 + static_cast<std::size_t>(__builtin_ctzll(v[w]));
      for (auto& [p, row] : rows_) {
        if (row[pivot / 64] >> (pivot % 64) & 1U) {
          for (std::size_t k = 0; k < row.size(); ++k) row[k] ^= v[k];
        }
      }
      rows_.emplace_back(pivot, std::move(v));
      return true;
    }
    return false;
  }

 private:
  std::vector<std::pair<std::size_t, EdgeSet>> rows_;
};

int order_of(BondType t) { return t == BondType::double_ ? 2 : t == BondType::single ? 1 : 0; }

bool aromatic_capable(const graph::Atom& a) {
  const auto* el = a.label.get_if<graph::ElementLabel>();
  if (!el) return false;
  static const std::set<std::string> capable = {"C", "N", "O", "S", "B", "P"};
  return capable.count(el->symbol) > 0;
}

// Ring bond types in ring order; bond i joins ring[i] and ring[i+1].
std::vector<std::size_t> ring_bonds(const Topology& topo, const std::vector<std::size_t>& ring) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ring.size(); ++i) out.push_back(*topo.bond_between(ring[i], ring[(i + 1) % ring.size()]));
  return out;
}

// Orders 1/2 must alternate around the cycle; aromatic bonds fit either slot.
bool alternates(const std::vector<BondType>& types) {
  if (types.size() % 2 != 0) return false;
  for (int phase = 0; phase < 2; ++phase) {
    bool ok = true;
    for (std::size_t i = 0; i < types.size() && ok; ++i) {
      if (types[i] == BondType::aromatic) continue;
      const int want = (i % 2 == static_cast<std::size_t>(phase)) ? 2 : 1;
      ok = order_of(types[i]) == want;
    }
    if (ok) return true;
  }
  return false;
}

bool has_double_bond(const Topology& topo, std::size_t atom) {
  const MolGraph& g = topo.graph();
  return std::any_of(topo.neighbors(atom).begin(), topo.neighbors(atom).end(),
                     [&](const graph::Neighbor& nb) { return g.bonds[nb.bond].type == BondType::double_; });
}

// X-a1=a2-a3=a4-X with X in {N, O, S} free of double bonds; aromatic bonds fit their slot.
bool heteroaromatic_five(const Topology& topo, const std::vector<std::size_t>& ring, const std::vector<BondType>& types) {
  const MolGraph& g = topo.graph();
  for (std::size_t x = 0; x < 5; ++x) {
    const auto* el = g.atoms[ring[x]].label.get_if<graph::ElementLabel>();
    if (!el || (el->symbol != "N" && el->symbol != "O" && el->symbol != "S")) continue;
    if (has_double_bond(topo, ring[x])) continue;
    static constexpr int pattern[5] = {1, 2, 1, 2, 1};  // bonds starting at x
    bool ok = true;
    for (std::size_t k = 0; k < 5 && ok; ++k) {
      const BondType t = types[(x + k) % 5];
      ok = t == BondType::aromatic || order_of(t) == pattern[k];
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

std::vector<std::vector<std::size_t>> smallest_set_of_smallest_rings(const MolGraph& g) {
  const Topology topo(g);
  const std::size_t n = g.atoms.size();
  const std::size_t e = g.bonds.size();
  const std::size_t want = e + components(topo) - n;
  if (want == 0) return {};

  // BFS shortest-path trees from every atom.
  std::vector<std::vector<std::size_t>> parent(n, std::vector<std::size_t>(n, kUnreached));
  for (std::size_t s = 0; s < n; ++s) {
    std::deque<std::size_t> queue{s};
    parent[s][s] = s;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& nb : topo.neighbors(v)) {
        if (parent[s][nb.atom] == kUnreached) {
          parent[s][nb.atom] = v;
          queue.push_back(nb.atom);
        }
      }
    }
  }
  auto path = [&](std::size_t s, std::size_t t) {
    std::vector<std::size_t> p{t};
    while (p.back() != s) p.push_back(parent[s][p.back()]);
    std::reverse(p.begin(), p.end());
    return p;
  };

  const std::size_t words = (e + 63) / 64;
  std::vector<Candidate> candidates;
  std::set<EdgeSet> seen;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t b = 0; b < e; ++b) {
      const std::size_t x = topo.bond_atom1(b);
      const std::size_t y = topo.bond_atom2(b);
      if (parent[v][x] == kUnreached) continue;
      const auto px = path(v, x);
      const auto py = path(v, y);
      // Paths must meet only at v.
      std::set<std::size_t> on_px(px.begin(), px.end());
      if (std::any_of(py.begin() + 1, py.end(), [&](std::size_t a) { return on_px.count(a) > 0; })) continue;
      Candidate c;
      c.atoms = px;
      for (auto it = py.rbegin(); it + 1 != py.rend(); ++it) c.atoms.push_back(*it);
      if (c.atoms.size() < 3) continue;
      c.edges.assign(words, 0);
      for (std::size_t i = 0; i < c.atoms.size(); ++i) {
        const std::size_t bond = *topo.bond_between(c.atoms[i], c.atoms[(i + 1) % c.atoms.size()]);
        c.edges[bond / 64] |= std::uint64_t{1} << (bond % 64);
      }
      if (seen.insert(c.edges).second) candidates.push_back(std::move(c));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.atoms.size() < b.atoms.size(); });

  Gf2Basis basis;
  std::vector<std::vector<std::size_t>> rings;
  for (auto& c : candidates) {
    if (rings.size() == want) break;
    if (basis.insert(c.edges)) rings.push_back(std::move(c.atoms));
  }
  return rings;
}

MolGraph aromatic_normalize(const MolGraph& g) {
  graph::require_valid(g, "aromatic_normalize");
  for (const auto& b : g.bonds) {
    if (b.type != BondType::single && b.type != BondType::double_ && b.type != BondType::triple &&
        b.type != BondType::aromatic) {
      throw ContractViolation("aromatic_normalize: bond type " + std::string(graph::bond_type_name(b.type)) +
                              " does not arise from SMILES");
    }
  }
  MolGraph out = g;
  const Topology topo(out);
  std::vector<std::vector<std::size_t>> rings;
  for (auto& r : smallest_set_of_smallest_rings(out)) {
    if (r.size() > 7) continue;
    const bool capable = std::all_of(r.begin(), r.end(), [&](std::size_t a) { return aromatic_capable(out.atoms[a]); });
    if (capable) rings.push_back(std::move(r));
  }

  std::vector<bool> done(rings.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < rings.size(); ++k) {
      if (done[k]) continue;
      const auto bonds = ring_bonds(topo, rings[k]);
      std::vector<BondType> types;
      for (std::size_t b : bonds) types.push_back(out.bonds[b].type);
      const bool qualifies = alternates(types) || (rings[k].size() == 5 && heteroaromatic_five(topo, rings[k], types));
      if (!qualifies) continue;
      done[k] = true;
      for (std::size_t b : bonds) {
        if (out.bonds[b].type != BondType::aromatic) {
          out.bonds[b].type = BondType::aromatic;
          out.bonds[b].marker = graph::BondMarker::none;
          changed = true;
        }
      }
      for (std::size_t a : rings[k]) {
        if (!out.atoms[a].aromatic) {
          out.atoms[a].aromatic = true;
          changed = true;
        }
      }
    }
  }
  return out;
}

}  // namespace ocsrbench::match

#include "ocsrbench/graph/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/stereo.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::graph {
namespace {

using PairKey = std::pair<int, int>;

std::map<PairKey, const Bond*> bonds_by_pair(const MolGraph& g) {
  std::map<PairKey, const Bond*> out;
  for (const Bond& b : g.bonds) out.emplace(std::minmax(b.atom1, b.atom2), &b);
  return out;
}

std::vector<std::pair<std::vector<int>, std::string>> bracket_multiset(const MolGraph& g,
                                                                       const AtomMapping* mapping) {
  std::vector<std::pair<std::vector<int>, std::string>> out;
  for (const Bracket& br : g.brackets) {
    std::vector<int> ids;
    for (int id : br.atoms) ids.push_back(mapping ? mapping->at(id) : id);
    std::sort(ids.begin(), ids.end());
    out.emplace_back(std::move(ids), collapse_whitespace(br.mark));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

AttributeComparison AttributeComparison::smiles_protocol(bool stereo) {
  AttributeComparison cmp;
  cmp.hydrogens = true;
  cmp.aromatic = true;
  cmp.brackets = false;
  cmp.bond_direction = false;
  cmp.stereo = stereo;
  return cmp;
}

bool atoms_compatible(const Atom& a, const Atom& b, const AttributeComparison& cmp) {
  if (cmp.labels && a.label != b.label) return false;
  if (cmp.charge && a.effective_charge() != b.effective_charge()) return false;
  if (cmp.isotope && a.isotope != b.isotope) return false;
  if (cmp.radical && a.radical != b.radical) return false;
  if (cmp.valence && a.valence && b.valence && *a.valence != *b.valence) return false;
  if (cmp.hydrogens && a.hydrogens.value_or(0) != b.hydrogens.value_or(0)) return false;
  if (cmp.aromatic && a.aromatic != b.aromatic) return false;
  return true;
}

bool mapping_preserves_bonds(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping,
                             const AttributeComparison& cmp) {
  if (a.bonds.size() != b.bonds.size()) return false;
  const auto b_pairs = bonds_by_pair(b);
  for (const Bond& bond : a.bonds) {
    const int m1 = mapping.at(bond.atom1);
    const int m2 = mapping.at(bond.atom2);
    const auto it = b_pairs.find(std::minmax(m1, m2));
    if (it == b_pairs.end()) return false;
    const Bond& other = *it->second;
    if (!cmp.bond_types) continue;
    if (bond.type != other.type) return false;
    if (cmp.bond_direction && is_directional(bond.type) && other.atom1 != m1) return false;
  }
  return true;
}

bool mapping_preserves_brackets(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping) {
  if (a.brackets.size() != b.brackets.size()) return false;
  return bracket_multiset(a, &mapping) == bracket_multiset(b, nullptr);
}

bool mapping_preserves_stereo(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping) {
  return stereo_parity_signature(a, mapping) == stereo_parity_signature(b);
}

std::optional<AtomMapping> brute_force_isomorphic(const MolGraph& a, const MolGraph& b,
                                                  const AttributeComparison& cmp) {
  if (a.atoms.size() > kBruteForceAtomLimit || b.atoms.size() > kBruteForceAtomLimit) {
    throw RefusalError("brute_force_isomorphic: refusing graphs above " +
                       std::to_string(kBruteForceAtomLimit) + " atoms");
  }
  require_valid(a, "brute_force_isomorphic");
  require_valid(b, "brute_force_isomorphic");
  if (a.atoms.size() != b.atoms.size() || a.bonds.size() != b.bonds.size()) return std::nullopt;

  const std::size_t n = a.atoms.size();
  std::vector<std::size_t> image(n);
  std::vector<bool> used(n, false);
  AtomMapping mapping;

  auto accept = [&]() {
    mapping.clear();
    for (std::size_t i = 0; i < n; ++i) mapping.emplace(a.atoms[i].id, b.atoms[image[i]].id);
    if (!mapping_preserves_bonds(a, b, mapping, cmp)) return false;
    if (cmp.brackets && !mapping_preserves_brackets(a, b, mapping)) return false;
    if (cmp.stereo && !mapping_preserves_stereo(a, b, mapping)) return false;
    return true;
  };

  // Plain permutation enumeration; atom compatibility only skips bijections that must fail.
  auto extend = [&](auto&& self, std::size_t i) -> bool {
    if (i == n) return accept();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || !atoms_compatible(a.atoms[i], b.atoms[j], cmp)) continue;
      used[j] = true;
      image[i] = j;
      if (self(self, i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  if (!extend(extend, 0)) return std::nullopt;
  return mapping;
}

}  // namespace ocsrbench::graph

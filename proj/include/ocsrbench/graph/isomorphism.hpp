#pragma once

#include <map>
#include <optional>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

/// Which attributes an attributed isomorphism must preserve. Coordinates never count.
struct AttributeComparison {
  bool labels = true;
  bool charge = true;  // absent compares equal to 0
  bool isotope = true;
  bool radical = true;
  bool valence = true;  // compared only when both atoms carry one
  bool hydrogens = false;
  bool aromatic = false;
  bool bond_types = true;
  bool bond_direction = true;  // (atom1, atom2) order of directional types
  bool brackets = true;        // atom sets and whitespace-collapsed marks
  bool stereo = false;         // tetrahedral parity and double-bond configuration

  /// Graph protocol: labels, charge/isotope/valence/radical, exact directed bonds, brackets.
  static AttributeComparison graph_protocol() { return {}; }
  /// SMILES protocol: adds hydrogen totals and aromatic flags, drops brackets.
  static AttributeComparison smiles_protocol(bool stereo);
};

bool atoms_compatible(const Atom& a, const Atom& b, const AttributeComparison& cmp);

/// Atom ids of `a` mapped to atom ids of `b`.
using AtomMapping = std::map<int, int>;

/// True when `mapping` (a bijection between the atom sets) preserves bonds under `cmp`.
bool mapping_preserves_bonds(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping,
                             const AttributeComparison& cmp);
/// True when `mapping` carries a's brackets bijectively onto b's, marks equal.
bool mapping_preserves_brackets(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping);
/// True when stereo signatures agree under `mapping`. Throws ValidationError on bad stereo.
bool mapping_preserves_stereo(const MolGraph& a, const MolGraph& b, const AtomMapping& mapping);

inline constexpr std::size_t kBruteForceAtomLimit = 10;

/// Exhaustive attributed-isomorphism search over every atom bijection. Complete, and meant
/// as a test oracle: refuses (RefusalError) graphs with more than 10 atoms.
std::optional<AtomMapping> brute_force_isomorphic(const MolGraph& a, const MolGraph& b,
                                                  const AttributeComparison& cmp);

}  // namespace ocsrbench::graph

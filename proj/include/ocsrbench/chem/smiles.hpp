#pragma once

#include <string>
#include <string_view>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::chem {

/// Parse a SMILES string (organic subset, bracket atoms, branches, ring closures up to %99,
/// '.' components, '@'/'@@', '/' and '\').
///
/// Atom ids follow textual order from 0. Organic-subset atoms receive implicit hydrogen
/// counts from their normal valences; bracket atoms take their explicit count (default 0).
/// Bracket text outside the element grammar becomes a label of its own kind: "[MeO]" a
/// superatom, "[R1]" an R group, "[D]" deuterium. An unwritten bond between two aromatic
/// atoms is aromatic. Stereo neighbor order is the order of appearance, with an implicit
/// hydrogen placed right after the preceding atom. A '/' or '\' bond has atom1 on the side
/// where the symbol is written. Throws ParseError (column = 1-based character offset).
graph::MolGraph parse_smiles(std::string_view text);

/// Deterministic SMILES for a SMILES-expressible graph; isomorphic inputs give equal strings.
///
/// Expressible means: bond types single/double/triple/aromatic, no brackets or atom groups,
/// element/superatom/deuterium labels, integer charges, no radical or valence annotation,
/// and superatom text that cannot be read back as an element. Anything else raises
/// RefusalError "not SMILES-expressible: <feature>". Coordinates are dropped.
std::string emit_canonical_smiles(const graph::MolGraph& g);

}  // namespace ocsrbench::chem

#pragma once

#include <cstddef>
#include <vector>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::match {

/// Smallest set of smallest rings: E - V + C cycles, each a list of atom indices in ring
/// order, shortest first. Built from Horton candidates selected by GF(2) independence.
std::vector<std::vector<std::size_t>> smallest_set_of_smallest_rings(const graph::MolGraph& g);

/// Rewrite Kekulé rings as aromatic. A ring of the smallest set with at most 7 atoms, all of
/// them C, N, O, S, B or P, is aromatized when its bonds alternate single/double around the
/// whole cycle. Bonds already aromatic act as either order, so fused Kekulé systems convert
/// ring by ring until nothing changes. Five-membered rings qualify when two conjugated double
/// bonds are closed by one N, O or S carrying no double bond (pyrrole, furan, thiophene).
/// Aromatized ring bonds become aromatic and their atoms are flagged; other bonds are
/// untouched. Idempotent.
///
/// Requires bond types single/double/triple/aromatic only; otherwise ContractViolation.
graph::MolGraph aromatic_normalize(const graph::MolGraph& g);

}  // namespace ocsrbench::match

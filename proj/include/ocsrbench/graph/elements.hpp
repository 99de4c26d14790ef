#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace ocsrbench::graph {

/// True for the 118 periodic-table symbols (case-sensitive: "Cl", not "CL").
bool is_element_symbol(std::string_view symbol);

/// Atomic number, or nullopt for a non-element.
std::optional<int> atomic_number(std::string_view symbol);

/// Normal valences of the SMILES organic subset (B C N O P S F Cl Br I); empty otherwise.
std::span<const int> organic_valences(std::string_view symbol);

/// Implicit hydrogen count of an unbracketed organic-subset atom: the smallest normal
/// valence covering the bond-order sum, minus that sum, minus one more when aromatic
/// (floored at 0). Aromatic bonds contribute 1 to `bond_order_sum`. Returns 0 past the
/// largest valence. Benzene c gets 1, pyridine n and thiophene s get 0.
int organic_implicit_hydrogens(std::string_view symbol, int bond_order_sum, bool aromatic);

/// Elements that may appear as lowercase aromatic atoms in SMILES.
bool is_smiles_aromatic_symbol(std::string_view symbol);

}  // namespace ocsrbench::graph

#pragma once

#include <string>
#include <vector>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

enum class Severity { error, warning };

struct ValidationIssue {
  Severity severity = Severity::error;
  /// Stable machine code, e.g. "bracket-unknown-atom".
  std::string code;
  std::string message;
  /// Where the problem sits, e.g. "brackets[1].atoms[0]".
  std::string location;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;

  bool has(std::string_view code) const;
  std::vector<ValidationIssue> errors() const;
};

/// Check every referential and per-field invariant of `g`. Never throws.
///
/// Error codes: duplicate-atom-id, negative-atom-id, invalid-label, invalid-isotope,
/// invalid-valence, invalid-hydrogens, stereo-unknown-atom, bond-self-loop, bond-unknown-atom,
/// duplicate-bond, bracket-empty, bracket-unknown-atom, bracket-partial-overlap,
/// group-empty, group-unknown-atom.
/// Warning codes: ambiguous-superatom, duplicate-bracket.
ValidationReport validate_graph(const MolGraph& g);

/// Throws ContractViolation carrying the first error when `g` is invalid.
void require_valid(const MolGraph& g, std::string_view operation);

}  // namespace ocsrbench::graph

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

/// Total map from the 23 bond types onto BASIC, fixing every BASIC type.
class BondMapping {
 public:
  /// Decorated or ambiguous types collapse to their dominant drawn multiplicity;
  /// hollow wedge becomes solid wedge.
  static BondMapping default_mapping();

  /// Parse {"bold": "single", ...}. Types not named keep their default image.
  /// With `require_total`, every non-BASIC type must be named. Throws ConfigError when an
  /// image is outside BASIC, a BASIC type is remapped, or a name is unknown.
  static BondMapping from_json(std::string_view text, bool require_total = false);

  /// Build from an explicit table; throws ConfigError on the same conditions as from_json.
  static BondMapping from_table(const std::array<BondType, kBondTypeCount>& table);

  BondType operator()(BondType type) const { return table_[static_cast<std::size_t>(type)]; }

  std::string to_json() const;

  bool operator==(const BondMapping&) const = default;

 private:
  BondMapping() = default;
  std::array<BondType, kBondTypeCount> table_{};
};

/// Rename greek-suffixed R-group and GROUP placeholders to α, β, γ, ... per family, in order
/// of first occurrence along the placeholder-insensitive canonical ranking. Numbered R
/// labels are untouched. Idempotent.
MolGraph normalize_placeholder_labels(const MolGraph& g);

/// Replace every bond type by `mapping(type)`; atoms and brackets untouched.
MolGraph simplify_bonds(const MolGraph& g, const BondMapping& mapping);

/// Simplified-graph projection: default bond mapping, charge/isotope/valence/radical cleared,
/// brackets (and atom groups) removed. Labels and coordinates stay.
MolGraph project_simplified(const MolGraph& g);
MolGraph project_simplified(const MolGraph& g, const BondMapping& mapping);

/// Fold drawn deuterium labels into hydrogen with isotope 2.
MolGraph fold_deuterium(const MolGraph& g);

/// Random id permutation helper used by tests and tools: same graph, ids shuffled by `seed`.
MolGraph shuffle_ids(const MolGraph& g, unsigned seed);

}  // namespace ocsrbench::graph

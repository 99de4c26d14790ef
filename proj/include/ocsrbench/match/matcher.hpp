#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ocsrbench/graph/isomorphism.hpp"
#include "ocsrbench/graph/mol_graph.hpp"
#include "ocsrbench/graph/transform.hpp"

namespace ocsrbench::match {

struct MatchConfig {
  bool compare_stereo = true;
  bool aromatic_normalize_smiles = true;
  /// Bond mapping applied by the simplified-graph projection.
  graph::BondMapping simplification = graph::BondMapping::default_mapping();
  /// Rename greek placeholders canonically before graph comparison.
  bool placeholder_alpha_equivalence = true;

  /// Reads {"compare_stereo", "aromatic_normalize_smiles", "placeholder_alpha_equivalence",
  /// "bond_simplification": {...}}; absent keys keep their defaults. Throws ConfigError on
  /// unknown keys or mistyped values.
  static MatchConfig from_json(std::string_view text);
};

/// First failing check, in diagnosis order.
enum class MismatchReason {
  parse_failed,
  atom_set_mismatch,
  bond_mismatch,
  attribute_mismatch,
  bracket_mismatch,
  stereo_mismatch,
  no_isomorphism,
};

/// "parse-failed", "atom-set-mismatch", ..., "no-isomorphism".
std::string_view mismatch_reason_name(MismatchReason r);
std::optional<MismatchReason> parse_mismatch_reason(std::string_view name);

/// Invariant: matched implies witness and no reason; unmatched implies a reason.
struct MatchOutcome {
  bool matched = false;
  std::optional<MismatchReason> reason;
  /// Prediction atom id -> ground-truth atom id.
  std::optional<graph::AtomMapping> witness;
  /// Human-readable context for a mismatch.
  std::string detail;
};

/// Attributed isomorphism search under `cmp`: joint partition refinement over both graphs,
/// then individualization-refinement branching. Complete; coordinates never count. Both
/// graphs must be valid.
std::optional<graph::AtomMapping> find_isomorphism(const graph::MolGraph& a, const graph::MolGraph& b,
                                                   const graph::AttributeComparison& cmp);

/// Graph protocol: labels, charge/isotope/radical (valence when both carry one), exact bond
/// types with direction for directional types, and brackets mapped bijectively with marks
/// equal after whitespace collapse. With placeholder_alpha_equivalence, greek placeholders
/// match up to a bijective renaming within each family.
/// Unmatched reasons are diagnosed in order: atom-set-mismatch (label multisets differ),
/// bond-mismatch (bond count or type multisets differ), no-isomorphism (no label/bond
/// preserving bijection), attribute-mismatch, bracket-mismatch.
/// Throws ContractViolation on an invalid graph.
MatchOutcome graph_exact_match(const graph::MolGraph& pred, const graph::MolGraph& gt, const MatchConfig& cfg = {});

/// graph_exact_match of both simplified projections under cfg.simplification.
MatchOutcome simplified_graph_match(const graph::MolGraph& pred, const graph::MolGraph& gt,
                                    const MatchConfig& cfg = {});

/// Parse both strings, read deuterium as hydrogen-2, fold plain explicit hydrogen atoms into
/// their neighbor's count, drop stereocenters with fewer than 3 distinct neighbors,
/// optionally aromatize Kekulé rings, and compare heavy atoms with hydrogen totals, bond orders, charges, isotopes, aromatic flags
/// and labels, plus stereo parity when cfg.compare_stereo. Either side failing to parse
/// gives parse-failed; later failures follow the graph diagnosis order with stereo-mismatch
/// last.
MatchOutcome smiles_match(std::string_view pred, std::string_view gt, const MatchConfig& cfg = {});

/// Preparation applied by smiles_match to each parsed side.
graph::MolGraph prepare_smiles_graph(const graph::MolGraph& parsed, const MatchConfig& cfg);

}  // namespace ocsrbench::match

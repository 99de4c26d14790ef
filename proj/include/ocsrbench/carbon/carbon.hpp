#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocsrbench/graph/mol_graph.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::carbon {

// CARBON 1.0 document layout (JSON, UTF-8). Every document starts with the header
//   {"format": "CARBON", "version": "1.0", "form": "atom-centric" | "attribute-centric"}
//
// atom-centric:
//   "atoms": [{"id", "atom", "point_2d"?, "charge"?, "isotope"?, "valence"?, "radical"?,
//              "hydrogens"?, "aromatic"?, "stereo"?: {"tag": "@"|"@@", "neighbors": [id|"H"]},
//              "bonds": [{"to", "bond_type", "marker"?: "/"|"\\"}]}]
//   Each bond is listed once: directional types under atom1, others under the lower id.
//
// attribute-centric:
//   "atoms": {"<id>": label}, "bonds": {"<a1>-<a2>": bond_type}, and optional maps
//   "coordinates", "charges", "isotopes", "valences", "radicals", "hydrogens",
//   "chirality", "bond_markers" keyed the same way, plus "aromatic": [id].
//
// Both forms: "brackets": [{"atoms": [id], "mark"}], optional "groups": [{"atoms", "charge"}].
// Charges are integers or "p/q" strings; radicals use 1 doublet, 2 singlet, 3 triplet.
// Emission renumbers atoms by canonical rank, so equal graphs produce identical bytes.

enum class CarbonForm { atom_centric, attribute_centric };

inline constexpr std::string_view kCarbonVersion = "1.0";

std::string_view form_name(CarbonForm form);

struct CarbonDocument {
  CarbonForm form = CarbonForm::atom_centric;
  std::string version{kCarbonVersion};
  /// Whole document including the header fields.
  nlohmann::ordered_json body;
};

struct ParseOptions {
  /// Unknown fields are errors when strict, warnings otherwise.
  bool strict = true;
};

struct ParsedCarbon {
  graph::MolGraph graph;
  CarbonForm form = CarbonForm::atom_centric;
  std::vector<graph::ValidationIssue> warnings;
};

/// Throws ContractViolation when `g` is invalid.
std::string emit_carbon(const graph::MolGraph& g, CarbonForm form);
CarbonDocument to_document(const graph::MolGraph& g, CarbonForm form);
std::string to_text(const CarbonDocument& doc);

/// Throws ParseError (with line/column) on malformed JSON or a bad header, and
/// ValidationError (with the offending path) on schema or referential violations.
ParsedCarbon parse_carbon(std::string_view text, ParseOptions options = {});
/// Header-checked document without graph reconstruction.
CarbonDocument parse_document(std::string_view text);
ParsedCarbon parse_carbon(const CarbonDocument& doc, ParseOptions options = {});

/// Re-express `doc` in `target` form. Semantics preserving; errors propagate from parsing.
CarbonDocument convert_form(const CarbonDocument& doc, CarbonForm target, ParseOptions options = {});

}  // namespace ocsrbench::carbon

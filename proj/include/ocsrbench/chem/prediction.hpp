#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::chem {

/// Output format a model was asked for.
enum class Protocol { smiles, simplified_graph, graph };

std::string_view protocol_name(Protocol p);
/// Accepts "smiles", "simplified_graph", "graph" (also with '-'); nullopt otherwise.
std::optional<Protocol> parse_protocol(std::string_view name);

enum class ParseStatus { ok, repaired, failed };

std::string_view parse_status_name(ParseStatus s);

/// Closed set of reasons a prediction document can fail.
enum class FailureReason { not_json, schema_violation, unknown_bond_type, referential_integrity, model_declared_error };

/// "not-json", "schema-violation", "unknown-bond-type", "referential-integrity", "model-declared-error".
std::string_view failure_reason_name(FailureReason r);
std::optional<FailureReason> parse_failure_reason(std::string_view name);

struct SmilesText {
  std::string text;
  bool operator==(const SmilesText&) const = default;
};

using Payload = std::variant<SmilesText, graph::MolGraph>;

/// Invariant: payload present exactly when status != failed; reason present exactly when
/// status == failed.
struct Prediction {
  std::string sample_id;
  Protocol protocol = Protocol::smiles;
  std::optional<Payload> payload;
  std::string raw_text;
  ParseStatus status = ParseStatus::failed;
  std::optional<FailureReason> reason;
  /// Human-readable context for a failure; empty otherwise.
  std::string detail;

  bool failed() const noexcept { return status == ParseStatus::failed; }
  const graph::MolGraph* graph() const noexcept;
  const SmilesText* smiles() const noexcept;
};

/// Extract a JSON candidate from noisy model output: normalizes smart quotes, strips
/// markdown fences, cuts the first balanced top-level object (string-aware), or else wraps
/// the first quoted "smiles" value as {"smiles": ...}, and drops trailing commas before a
/// closing brace or bracket. Never throws; returns `raw` unchanged when nothing is found.
std::string repair_model_text(std::string_view raw);

/// Read one model answer under `protocol`. Never throws.
///
/// smiles: reads the "smiles" string; null (or an "error" key without "smiles") fails with
/// model-declared-error. The text is carried verbatim and is not parsed here.
/// simplified_graph / graph: "atoms" records {id, atom, point_2d[, charge, isotope, valence,
/// radical]}, "bonds" records {atom1, atom2, bond_type} and, under graph, "brackets" records
/// {atoms, mark}. simplified_graph accepts only the six basic bond names and ignores
/// brackets; graph accepts all 23. Unknown keys are ignored. The graph must pass
/// validate_graph; referential problems fail with referential-integrity, field problems
/// with schema-violation.
///
/// status is repaired when repair_model_text changed the text and parsing then succeeded.
Prediction parse_prediction_document(std::string_view raw, Protocol protocol, std::string sample_id = {});

}  // namespace ocsrbench::chem

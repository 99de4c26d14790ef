#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocsrbench/bench/manifest.hpp"
#include "ocsrbench/chem/prediction.hpp"
#include "ocsrbench/gateway/gateway.hpp"
#include "ocsrbench/match/matcher.hpp"
#include "ocsrbench/mosaic/mosaic.hpp"
#include "ocsrbench/mosaic/percent.hpp"

namespace ocsrbench::bench {

using chem::Protocol;

/// What happened to a sample's prediction before matching.
enum class PredictionState { ok, repaired, failed, request_failed, missing };

/// "ok", "repaired", "failed", "request-failed", "missing".
std::string_view prediction_state_name(PredictionState s);
std::optional<PredictionState> parse_prediction_state(std::string_view name);

/// Invariant: evaluated == false implies matched == false and no reasons. An unmatched
/// evaluated sample carries a mismatch reason; parse-failed ones also carry a failure
/// reason when the document itself was rejected.
struct SampleResult {
  std::string sample_id;
  bool evaluated = true;
  bool matched = false;
  PredictionState state = PredictionState::missing;
  std::optional<chem::FailureReason> failure;
  std::optional<match::MismatchReason> mismatch;
  std::string detail;
  mosaic::LabelSet labels;

  bool operator==(const SampleResult&) const = default;
};

struct RunRecord {
  std::string run_id;
  std::string model_name;
  Protocol protocol = Protocol::smiles;
  /// Match configuration as a JSON object text.
  std::string config_snapshot = "{}";
  /// ISO 8601 UTC, second precision.
  std::string scored_at;
  /// Manifest order; keys are a subset of the manifest's sample ids.
  std::vector<SampleResult> samples;

  bool operator==(const RunRecord&) const = default;
};

/// n matched over n evaluated, and the histogram of why the rest failed. Histogram keys
/// are "missing", "request-failed", failure-reason names for rejected documents, and
/// mismatch-reason names for parsed-but-wrong predictions.
struct RunTally {
  std::size_t evaluated = 0;
  std::size_t matched = 0;
  std::map<std::string, std::size_t> failures;
};

RunTally tally(const RunRecord& record);
/// nullopt when nothing was evaluated.
std::optional<mosaic::Percent> accuracy(const RunRecord& record);
/// Grid over evaluated samples only.
mosaic::DifficultyGrid difficulty_grid(const RunRecord& record);

struct ScoreOptions {
  /// Empty takes the "model" recorded in prediction metadata, or "unknown".
  std::string model_name;
  /// Empty derives a content hash of model, protocol, config, manifest and predictions.
  std::string run_id;
  /// Empty stamps the current time.
  std::string scored_at;
  /// Worker threads; results do not depend on it.
  int jobs = 1;
};

/// JSON object for a MatchConfig: {"compare_stereo", "aromatic_normalize_smiles",
/// "placeholder_alpha_equivalence", "bond_simplification"}. Readable by MatchConfig::from_json.
std::string config_snapshot(const match::MatchConfig& cfg);

/// Scores every manifest entry. A missing prediction or a failed request is an unmatched
/// sample with reason parse-failed. Under the SMILES protocol, entries without ground-truth
/// SMILES are not evaluated. Throws InputError when a prediction names an unknown or
/// repeated sample id, when its metadata records another protocol, or when a document has
/// the payload shape of another protocol (a graph under smiles, a SMILES string under a
/// graph protocol).
RunRecord score_run(const Manifest& manifest, const std::vector<gateway::PredictionRecord>& predictions,
                    Protocol protocol, const match::MatchConfig& cfg = {}, const ScoreOptions& options = {});

/// Lossless JSON serialization; run_record_from_json(run_record_to_json(r)) == r.
std::string run_record_to_json(const RunRecord& record);
/// Throws ParseError on malformed input.
RunRecord run_record_from_json(std::string_view text);

}  // namespace ocsrbench::bench

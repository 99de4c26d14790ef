#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/mol_graph.hpp"
#include "ocsrbench/mosaic/mosaic.hpp"

namespace ocsrbench::bench {

/// Provenance of a sample image; each field may be empty.
struct SourceInfo {
  std::string journal;
  std::string paper;
  std::string figure;
  bool operator==(const SourceInfo&) const = default;
};

/// One ground-truth sample. Invariant: ground_truth is a valid graph and smiles, when
/// present, parses.
struct ManifestEntry {
  std::string sample_id;
  /// Resolved against the manifest's directory when relative.
  std::filesystem::path image;
  /// CARBON document text, read from the inline object or the referenced file.
  std::string carbon_text;
  graph::MolGraph ground_truth;
  std::optional<std::string> smiles;
  mosaic::LabelSet labels;
  std::optional<SourceInfo> source;
  /// 1-based line in the manifest file.
  std::size_t line = 0;
};

struct ManifestIssue {
  std::size_t line = 0;
  std::string message;
};

/// Raised by load_manifest; what() is "<file>:<line>: <message>" for the first issue.
class ManifestError : public InputError {
 public:
  ManifestError(const std::string& file, std::vector<ManifestIssue> issues);
  const std::vector<ManifestIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ManifestIssue> issues_;
};

struct ManifestOptions {
  /// Strict stops at the first malformed entry; lenient skips bad entries and collects
  /// every issue.
  bool strict = true;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  /// Lenient mode only: entries that were skipped.
  std::vector<ManifestIssue> issues;

  const ManifestEntry* find(const std::string& sample_id) const;
  /// Entries carrying ground-truth SMILES.
  std::size_t smiles_count() const;
};

/// JSON Lines, one object per non-blank line: {"sample_id", "image", "carbon": {..} | "path",
/// "smiles"?, "visual_labels"?: [name], "chemical_labels"?: [name], "source"?: {"journal",
/// "paper", "figure"}}. The CARBON document is parsed strictly. Unknown keys, duplicate
/// sample ids, unknown label names and unparseable ground truth are issues.
/// Throws InputError when the file is unreadable and ManifestError (strict mode) on the first
/// issue.
Manifest load_manifest(const std::filesystem::path& path, ManifestOptions options = {});

}  // namespace ocsrbench::bench

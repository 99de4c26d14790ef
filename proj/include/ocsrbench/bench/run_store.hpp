#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ocsrbench/bench/scoring.hpp"
#include "ocsrbench/error.hpp"

namespace ocsrbench::bench {

/// Another writer holds the store lock; retrying later may succeed.
class StoreBusyError : public Error {
 public:
  using Error::Error;
};

struct RunSummary {
  std::string run_id;
  std::string scored_at;
  std::string model_name;
  Protocol protocol = Protocol::smiles;
  bool operator==(const RunSummary&) const = default;
};

struct StoreOptions {
  /// A lock file older than this is taken over.
  std::chrono::seconds stale_lock_after{300};
  /// Receives takeover and index-recovery notices; defaults to stderr.
  std::function<void(std::string_view)> log;
};

/// Directory layout: runs/<run_id>.json (one file per run, never rewritten), index.jsonl
/// (one summary per line, append-only), .lock (held by the single writer). Readers take no
/// lock.
class RunStore {
 public:
  /// Creates the directory layout when absent. Throws Error when it cannot.
  explicit RunStore(std::filesystem::path dir, StoreOptions options = {});

  /// Throws StoreBusyError when another writer holds a fresh lock, and Error when the run
  /// id is already stored or a write fails.
  void store_run(const RunRecord& record);

  /// Index order, stable-sorted by timestamp. An index that fails to parse or disagrees
  /// with the run files is rebuilt from the files.
  std::vector<RunSummary> list_runs() const;

  /// Throws InputError for an unknown id and ParseError for a corrupt file.
  RunRecord load_run(std::string_view run_id) const;
  /// The stored bytes.
  std::string load_run_text(std::string_view run_id) const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  class Lock;
  std::filesystem::path run_path(std::string_view run_id) const;
  std::vector<RunSummary> rebuild_index() const;
  void log(std::string_view message) const;

  std::filesystem::path dir_;
  StoreOptions options_;
};

}  // namespace ocsrbench::bench

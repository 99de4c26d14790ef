#include "ocsrbench/bench/run_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ocsrbench::bench {
namespace {

using nlohmann::ordered_json;

constexpr const char* kIndex = "index.jsonl";
constexpr const char* kLock = ".lock";

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool valid_run_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
  });
}

std::string summary_line(const RunSummary& s) {
  ordered_json j;
  j["run_id"] = s.run_id;
  j["scored_at"] = s.scored_at;
  j["model"] = s.model_name;
  j["protocol"] = chem::protocol_name(s.protocol);
  return j.dump() + "\n";
}

std::optional<RunSummary> parse_summary(const std::string& line) {
  const ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  for (const char* key : {"run_id", "scored_at", "model", "protocol"}) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  }
  const auto protocol = chem::parse_protocol(j["protocol"].get<std::string>());
  if (!protocol) return std::nullopt;
  return RunSummary{j["run_id"].get<std::string>(), j["scored_at"].get<std::string>(), j["model"].get<std::string>(), *protocol};
}

RunSummary summarize(const RunRecord& r) { return {r.run_id, r.scored_at, r.model_name, r.protocol}; }

void sort_by_time(std::vector<RunSummary>& runs) {
  std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.scored_at < b.scored_at; });
}

}  // namespace

// Exclusive-create lock file; removed on destruction.
class RunStore::Lock {
 public:
  explicit Lock(const RunStore& store) : path_(store.dir_ / kLock) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        const std::string owner = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] const auto n = ::write(fd, owner.data(), owner.size());
        ::close(fd);
        return;
      }
      if (errno != EEXIST) throw Error("cannot create lock " + path_.string());
      std::error_code ec;
      const auto written = std::filesystem::last_write_time(path_, ec);
      if (ec) continue;  // Released between the two calls.
      const auto age = std::filesystem::file_time_type::clock::now() - written;
      if (age < store.options_.stale_lock_after) {
        throw StoreBusyError("run store " + store.dir_.string() + " is locked by another writer");
      }
      store.log("run store: taking over stale lock " + path_.string());
      std::filesystem::remove(path_, ec);
    }
    throw StoreBusyError("run store " + store.dir_.string() + " is locked by another writer");
  }
  ~Lock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  Lock(const Lock&) = delete;
  Lock& operator=(const Lock&) = delete;

 private:
  std::filesystem::path path_;
};

RunStore::RunStore(std::filesystem::path dir, StoreOptions options) : dir_(std::move(dir)), options_(std::move(options)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "runs", ec);
  if (ec) throw Error("cannot initialize run store " + dir_.string() + ": " + ec.message());
}

void RunStore::log(std::string_view message) const {
  if (options_.log) {
    options_.log(message);
  } else {
    std::cerr << message << "\n";
  }
}

std::filesystem::path RunStore::run_path(std::string_view run_id) const {
  if (!valid_run_id(run_id)) throw InputError("invalid run id '" + std::string(run_id) + "'");
  return dir_ / "runs" / (std::string(run_id) + ".json");
}

void RunStore::store_run(const RunRecord& record) {
  const auto path = run_path(record.run_id);
  Lock lock(*this);
  if (std::filesystem::exists(path)) throw Error("run already stored: " + record.run_id);
  const std::string text = run_record_to_json(record);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  std::ofstream index(dir_ / kIndex, std::ios::binary | std::ios::app);
  index << summary_line(summarize(record));
  index.flush();
  if (!index) throw Error("cannot append to " + (dir_ / kIndex).string());
}

std::vector<RunSummary> RunStore::rebuild_index() const {
  std::vector<RunSummary> runs;
  for (const auto& entry : std::filesystem::directory_iterator(dir_ / "runs")) {
    if (entry.path().extension() != ".json") continue;
    runs.push_back(summarize(run_record_from_json(read_text(entry.path()))));
  }
  std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.run_id < b.run_id; });
  sort_by_time(runs);
  return runs;
}

std::vector<RunSummary> RunStore::list_runs() const {
  std::set<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_ / "runs")) {
    if (entry.path().extension() == ".json") files.insert(entry.path().stem().string());
  }
  std::vector<RunSummary> runs;
  bool consistent = true;
  std::set<std::string> indexed;
  if (std::filesystem::exists(dir_ / kIndex)) {
    std::istringstream lines(read_text(dir_ / kIndex));
    std::string line;
    while (consistent && std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto s = parse_summary(line);
      consistent = s && files.contains(s->run_id) && indexed.insert(s->run_id).second;
      if (consistent) runs.push_back(*s);
    }
  }
  if (consistent && indexed == files) {
    sort_by_time(runs);
    return runs;
  }
  log("run store: index of " + dir_.string() + " is inconsistent, rebuilding from run files");
  runs = rebuild_index();
  try {
    Lock lock(*this);
    std::string text;
    for (const auto& s : runs) text += summary_line(s);
    std::ofstream out(dir_ / kIndex, std::ios::binary | std::ios::trunc);
    out << text;
  } catch (const StoreBusyError&) {
    // The writer will leave a consistent index; this read still returns the rebuilt list.
  }
  return runs;
}

std::string RunStore::load_run_text(std::string_view run_id) const {
  const auto path = run_path(run_id);
  if (!std::filesystem::exists(path)) throw InputError("unknown run '" + std::string(run_id) + "'");
  return read_text(path);
}

RunRecord RunStore::load_run(std::string_view run_id) const { return run_record_from_json(load_run_text(run_id)); }

}  // namespace ocsrbench::bench

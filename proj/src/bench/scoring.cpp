#include "ocsrbench/bench/scoring.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"

namespace ocsrbench::bench {
namespace {

using nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kStateNames = {"ok", "repaired", "failed", "request-failed", "missing"};

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  // Length-prefixed, so field boundaries are unambiguous.
  void field(std::string_view s) {
    const std::uint64_t n = s.size();
    EVP_DigestUpdate(ctx_, &n, sizeof n);
    EVP_DigestUpdate(ctx_, s.data(), s.size());
  }

  std::string hex() {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, out, &len);
    std::string s;
    for (unsigned int i = 0; i < len; ++i) s += fmt::format("{:02x}", out[i]);
    return s;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string sanitize_id(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "run" : out;
}

std::optional<ordered_json> meta_object(const gateway::PredictionRecord& r) {
  const ordered_json meta = ordered_json::parse(r.meta_json, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) return std::nullopt;
  return std::optional<ordered_json>(std::in_place, meta);
}

void check_payload_shape(const gateway::PredictionRecord& r, Protocol protocol) {
  const ordered_json doc = ordered_json::parse(chem::repair_model_text(*r.raw), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return;
  const bool graph_shape = doc.contains("atoms") && doc["atoms"].is_array() && !doc.contains("smiles");
  const bool smiles_shape = doc.contains("smiles") && doc["smiles"].is_string() && !doc.contains("atoms");
  if (protocol == Protocol::smiles && graph_shape) {
    throw InputError("prediction for '" + r.sample_id + "' is a graph payload, scored under smiles");
  }
  if (protocol != Protocol::smiles && smiles_shape) {
    throw InputError("prediction for '" + r.sample_id + "' is a SMILES payload, scored under " +
                     std::string(chem::protocol_name(protocol)));
  }
}

SampleResult score_one(const ManifestEntry& entry, const gateway::PredictionRecord* pred, Protocol protocol,
                       const match::MatchConfig& cfg) {
  SampleResult s;
  s.sample_id = entry.sample_id;
  s.labels = entry.labels;
  if (protocol == Protocol::smiles && !entry.smiles) {
    s.evaluated = false;
    s.state = pred ? (pred->raw ? PredictionState::ok : PredictionState::request_failed) : PredictionState::missing;
    s.detail = "no ground-truth SMILES";
    return s;
  }
  if (!pred || !pred->raw) {
    s.state = pred ? PredictionState::request_failed : PredictionState::missing;
    s.mismatch = match::MismatchReason::parse_failed;
    s.detail = pred ? "request failed" : "missing prediction";
    return s;
  }
  const chem::Prediction p = chem::parse_prediction_document(*pred->raw, protocol, entry.sample_id);
  if (p.failed()) {
    s.state = PredictionState::failed;
    s.failure = p.reason;
    s.mismatch = match::MismatchReason::parse_failed;
    s.detail = p.detail;
    return s;
  }
  s.state = p.status == chem::ParseStatus::repaired ? PredictionState::repaired : PredictionState::ok;
  match::MatchOutcome outcome;
  switch (protocol) {
    case Protocol::smiles:
      outcome = match::smiles_match(p.smiles()->text, *entry.smiles, cfg);
      break;
    case Protocol::simplified_graph:
      outcome = match::simplified_graph_match(*p.graph(), entry.ground_truth, cfg);
      break;
    case Protocol::graph:
      outcome = match::graph_exact_match(*p.graph(), entry.ground_truth, cfg);
      break;
  }
  s.matched = outcome.matched;
  s.mismatch = outcome.reason;
  s.detail = outcome.detail;
  return s;
}

ordered_json label_json(const mosaic::LabelSet& labels, bool visual) {
  ordered_json arr = ordered_json::array();
  if (visual) {
    for (auto l : labels.visual) arr.push_back(mosaic::label_name(l));
  } else {
    for (auto l : labels.chemical) arr.push_back(mosaic::label_name(l));
  }
  return arr;
}

}  // namespace

std::string_view prediction_state_name(PredictionState s) { return kStateNames.at(static_cast<std::size_t>(s)); }

std::optional<PredictionState> parse_prediction_state(std::string_view name) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (kStateNames[i] == name) return static_cast<PredictionState>(i);
  }
  return std::nullopt;
}

RunTally tally(const RunRecord& record) {
  RunTally t;
  for (const auto& s : record.samples) {
    if (!s.evaluated) continue;
    ++t.evaluated;
    if (s.matched) {
      ++t.matched;
      continue;
    }
    std::string key;
    if (s.state == PredictionState::missing || s.state == PredictionState::request_failed) {
      key = prediction_state_name(s.state);
    } else if (s.failure) {
      key = chem::failure_reason_name(*s.failure);
    } else if (s.mismatch) {
      key = match::mismatch_reason_name(*s.mismatch);
    } else {
      key = "unknown";
    }
    ++t.failures[key];
  }
  return t;
}

std::optional<mosaic::Percent> accuracy(const RunRecord& record) {
  const RunTally t = tally(record);
  if (t.evaluated == 0) return std::nullopt;
  return mosaic::Percent::of(t.matched, t.evaluated);
}

mosaic::DifficultyGrid difficulty_grid(const RunRecord& record) {
  std::map<std::string, bool> results;
  std::map<std::string, mosaic::LabelSet> labels;
  for (const auto& s : record.samples) {
    if (!s.evaluated) continue;
    results[s.sample_id] = s.matched;
    labels[s.sample_id] = s.labels;
  }
  return mosaic::accuracy_by_difficulty(results, labels);
}

std::string config_snapshot(const match::MatchConfig& cfg) {
  ordered_json j;
  j["compare_stereo"] = cfg.compare_stereo;
  j["aromatic_normalize_smiles"] = cfg.aromatic_normalize_smiles;
  j["placeholder_alpha_equivalence"] = cfg.placeholder_alpha_equivalence;
  j["bond_simplification"] = ordered_json::parse(cfg.simplification.to_json());
  return j.dump();
}

RunRecord score_run(const Manifest& manifest, const std::vector<gateway::PredictionRecord>& predictions,
                    Protocol protocol, const match::MatchConfig& cfg, const ScoreOptions& options) {
  std::map<std::string, const gateway::PredictionRecord*> by_id;
  std::set<std::string> models;
  std::set<std::string> known;
  for (const auto& e : manifest.entries) known.insert(e.sample_id);
  for (const auto& r : predictions) {
    if (!known.contains(r.sample_id)) throw InputError("prediction for unknown sample '" + r.sample_id + "'");
    if (!by_id.emplace(r.sample_id, &r).second) throw InputError("duplicate prediction for sample '" + r.sample_id + "'");
    if (const auto meta = meta_object(r)) {
      if (const auto it = meta->find("protocol"); it != meta->end() && it->is_string()) {
        const auto recorded = chem::parse_protocol(it->get<std::string>());
        if (recorded && *recorded != protocol) {
          throw InputError("prediction for '" + r.sample_id + "' was collected under " + it->get<std::string>() +
                           ", scored under " + std::string(chem::protocol_name(protocol)));
        }
      }
      if (const auto it = meta->find("model"); it != meta->end() && it->is_string()) models.insert(it->get<std::string>());
    }
    if (r.raw) check_payload_shape(r, protocol);
  }

  RunRecord record;
  record.protocol = protocol;
  record.config_snapshot = config_snapshot(cfg);
  record.model_name = !options.model_name.empty() ? options.model_name
                      : models.size() == 1        ? *models.begin()
                                                  : "unknown";
  record.scored_at = options.scored_at.empty() ? utc_now() : options.scored_at;

  const std::size_t n = manifest.entries.size();
  record.samples.resize(n);
  auto lookup = [&](const std::string& id) -> const gateway::PredictionRecord* {
    const auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto& e = manifest.entries[i];
        record.samples[i] = score_one(e, lookup(e.sample_id), protocol, cfg);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(options.jobs, 1, 64);
  std::vector<std::thread> threads;
  for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  if (!options.run_id.empty()) {
    record.run_id = sanitize_id(options.run_id);
  } else {
    Sha256 h;
    h.field(record.model_name);
    h.field(chem::protocol_name(protocol));
    h.field(record.config_snapshot);
    for (const auto& e : manifest.entries) {
      h.field(e.sample_id);
      h.field(e.carbon_text);
      h.field(e.smiles.value_or(""));
      const auto* p = lookup(e.sample_id);
      h.field(p ? (p->raw ? "r:" + *p->raw : "f") : "m");
    }
    record.run_id = sanitize_id(record.model_name) + "-" + std::string(chem::protocol_name(protocol)) + "-" + h.hex().substr(0, 12);
  }
  return record;
}

std::string run_record_to_json(const RunRecord& record) {
  ordered_json j;
  j["run_id"] = record.run_id;
  j["model"] = record.model_name;
  j["protocol"] = chem::protocol_name(record.protocol);
  j["config"] = ordered_json::parse(record.config_snapshot);
  j["scored_at"] = record.scored_at;
  ordered_json samples = ordered_json::array();
  for (const auto& s : record.samples) {
    ordered_json row;
    row["sample_id"] = s.sample_id;
    row["evaluated"] = s.evaluated;
    row["matched"] = s.matched;
    row["state"] = prediction_state_name(s.state);
    row["failure"] = s.failure ? ordered_json(chem::failure_reason_name(*s.failure)) : ordered_json(nullptr);
    row["mismatch"] = s.mismatch ? ordered_json(match::mismatch_reason_name(*s.mismatch)) : ordered_json(nullptr);
    row["detail"] = s.detail;
    row["visual_labels"] = label_json(s.labels, true);
    row["chemical_labels"] = label_json(s.labels, false);
    samples.push_back(std::move(row));
  }
  j["samples"] = std::move(samples);
  return j.dump(2) + "\n";
}

RunRecord run_record_from_json(std::string_view text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("run record is not a JSON object");
  try {
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.model_name = j.at("model").get<std::string>();
    const auto protocol = chem::parse_protocol(j.at("protocol").get<std::string>());
    if (!protocol) throw ParseError("run record: unknown protocol");
    r.protocol = *protocol;
    if (!j.at("config").is_object()) throw ParseError("run record: config must be an object");
    r.config_snapshot = j.at("config").dump();
    r.scored_at = j.at("scored_at").get<std::string>();
    for (const auto& row : j.at("samples")) {
      SampleResult s;
      s.sample_id = row.at("sample_id").get<std::string>();
      s.evaluated = row.at("evaluated").get<bool>();
      s.matched = row.at("matched").get<bool>();
      const auto state = parse_prediction_state(row.at("state").get<std::string>());
      if (!state) throw ParseError("run record: unknown state for '" + s.sample_id + "'");
      s.state = *state;
      if (!row.at("failure").is_null()) {
        s.failure = chem::parse_failure_reason(row["failure"].get<std::string>());
        if (!s.failure) throw ParseError("run record: unknown failure reason for '" + s.sample_id + "'");
      }
      if (!row.at("mismatch").is_null()) {
        s.mismatch = match::parse_mismatch_reason(row["mismatch"].get<std::string>());
        if (!s.mismatch) throw ParseError("run record: unknown mismatch reason for '" + s.sample_id + "'");
      }
      s.detail = row.at("detail").get<std::string>();
      for (const auto& v : row.at("visual_labels")) {
        const auto l = mosaic::parse_visual_label(v.get<std::string>());
        if (!l) throw ParseError("run record: unknown visual label '" + v.get<std::string>() + "'");
        s.labels.visual.insert(*l);
      }
      for (const auto& v : row.at("chemical_labels")) {
        const auto l = mosaic::parse_chemical_label(v.get<std::string>());
        if (!l) throw ParseError("run record: unknown chemical label '" + v.get<std::string>() + "'");
        s.labels.chemical.insert(*l);
      }
      r.samples.push_back(std::move(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
}

}  // namespace ocsrbench::bench

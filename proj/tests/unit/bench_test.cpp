#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ocsrbench/bench/cli.hpp"
#include "ocsrbench/bench/manifest.hpp"
#include "ocsrbench/bench/report.hpp"
#include "ocsrbench/bench/run_store.hpp"
#include "ocsrbench/bench/scoring.hpp"
#include "ocsrbench/carbon/carbon.hpp"
#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/error.hpp"
#include "ocsrbench/gateway/mock_endpoint.hpp"
#include "ocsrbench/graph/transform.hpp"
#include "support/random_graphs.hpp"
#include "support/run_fixture.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace ocsrbench;
using namespace ocsrbench::bench;
using nlohmann::json;
namespace fs = std::filesystem;
using testkit::TempDir;

const fs::path kE2e = fs::path(OCSRBENCH_FIXTURE_DIR) / "e2e";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string carbon_of(const std::string& smiles) {
  return json::parse(carbon::emit_carbon(chem::parse_smiles(smiles), carbon::CarbonForm::atom_centric)).dump();
}

std::string entry_line(const std::string& id, const std::string& smiles, const std::string& extra = "") {
  return R"({"sample_id": ")" + id + R"(", "image": ")" + id + R"(.png", "carbon": )" + carbon_of(smiles) +
         R"(, "smiles": ")" + smiles + "\"" + extra + "}\n";
}

// Canned answers of the e2e fixture, as the collection step would record them.
std::vector<gateway::PredictionRecord> canned_predictions(Protocol p) {
  const json cfg = json::parse(slurp(kE2e / "mock_responses.json"));
  std::vector<gateway::PredictionRecord> out;
  for (const auto& r : cfg["responses"]) {
    if (r["protocol"] != chem::protocol_name(p)) continue;
    gateway::PredictionRecord rec;
    rec.sample_id = fs::path(r["image"].get<std::string>()).stem().string();
    rec.raw = r["content"].get<std::string>();
    rec.meta_json = json{{"model", "mock-model"}, {"protocol", chem::protocol_name(p)}}.dump();
    out.push_back(rec);
  }
  return out;
}

ScoreOptions fixed_options() { return {.model_name = "", .run_id = "", .scored_at = "2026-01-01T00:00:00Z", .jobs = 1}; }

// ---------------------------------------------------------------------------
// Manifest

TEST(Manifest, LoadsWellFormedFixture) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_TRUE(m.issues.empty());
  EXPECT_EQ(m.smiles_count(), 3u);
  const auto& e = m.entries[1];
  EXPECT_EQ(e.sample_id, "e2e-2");
  EXPECT_EQ(e.line, 2u);
  EXPECT_EQ(e.image, kE2e / "e2e-2.png");
  EXPECT_EQ(e.ground_truth.atoms.size(), 9u);
  EXPECT_EQ(e.labels.visual.size(), 2u);
  EXPECT_TRUE(e.labels.chemical.contains(mosaic::ChemicalLabel::aromatic_bond));
  ASSERT_TRUE(e.source);
  EXPECT_EQ(e.source->figure, "Scheme 2");
  EXPECT_FALSE(m.entries[2].source);
}

TEST(Manifest, UnknownLabelNamesLabelAndLine) {
  TempDir dir;
  const auto path = dir.write("m.jsonl", entry_line("a", "CCO") + entry_line("b", "CC", R"(, "visual_labels": ["blury_image"])"));
  try {
    load_manifest(path);
    FAIL() << "expected ManifestError";
  } catch (const ManifestError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].line, 2u);
    EXPECT_NE(std::string(e.what()).find("blury_image"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(Manifest, LenientCollectsEveryIssue) {
  TempDir dir;
  const std::string text = entry_line("a", "CCO") + "not json\n\n" + entry_line("a", "CC") +
                           entry_line("c", "CC", R"(, "chemical_labels": ["nope"])") +
                           R"({"sample_id": "d", "image": "d.png", "carbon": {"format": "CARBON"}})" "\n" +
                           entry_line("e", "CC", R"(, "colour": 1)") +
                           R"({"sample_id": "f", "image": "f.png", "carbon": )" + carbon_of("CC") +
                           R"(, "smiles": "C1CC"})" "\n";
  const auto path = dir.write("m.jsonl", text);
  EXPECT_THROW(load_manifest(path), ManifestError);
  const Manifest m = load_manifest(path, {.strict = false});
  ASSERT_EQ(m.entries.size(), 1u);
  ASSERT_EQ(m.issues.size(), 6u);
  const std::vector<std::size_t> lines = {2, 4, 5, 6, 7, 8};
  for (std::size_t i = 0; i < lines.size(); ++i) EXPECT_EQ(m.issues[i].line, lines[i]) << m.issues[i].message;
  EXPECT_NE(m.issues[1].message.find("duplicate sample_id"), std::string::npos);
  EXPECT_NE(m.issues[2].message.find("unknown chemical label 'nope'"), std::string::npos);
  EXPECT_NE(m.issues[3].message.find("ground-truth CARBON"), std::string::npos);
  EXPECT_NE(m.issues[4].message.find("colour"), std::string::npos);
  EXPECT_NE(m.issues[5].message.find("ground-truth SMILES"), std::string::npos);
}

TEST(Manifest, CarbonByRelativePathAndOptionalSmiles) {
  TempDir dir;
  fs::create_directories(dir.path() / "gt");
  dir.write("gt/a.json", carbon_of("c1ccccc1"));
  const auto path = dir.write("m.jsonl", R"({"sample_id": "a", "image": "img/a.png", "carbon": "gt/a.json"})" "\n");
  const Manifest m = load_manifest(path);
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].ground_truth.atoms.size(), 6u);
  EXPECT_FALSE(m.entries[0].smiles);
  EXPECT_EQ(m.entries[0].image, dir.path() / "img/a.png");
  EXPECT_EQ(m.smiles_count(), 0u);
  const auto missing = dir.write("n.jsonl", R"({"sample_id": "a", "image": "a.png", "carbon": "gt/none.json"})" "\n");
  EXPECT_THROW(load_manifest(missing), ManifestError);
  EXPECT_THROW(load_manifest(dir.path() / "absent.jsonl"), InputError);
}

// ---------------------------------------------------------------------------
// Scoring

TEST(Score, CannedFixtureScoresTwoOfThreePerProtocol) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  const std::map<Protocol, std::string> expected_failure = {
      {Protocol::smiles, "not-json"}, {Protocol::simplified_graph, "atom-set-mismatch"}, {Protocol::graph, "bond-mismatch"}};
  for (Protocol p : {Protocol::smiles, Protocol::simplified_graph, Protocol::graph}) {
    const RunRecord r = score_run(m, canned_predictions(p), p, {}, fixed_options());
    ASSERT_TRUE(accuracy(r)) << chem::protocol_name(p);
    EXPECT_EQ(accuracy(r)->to_string(), "66.67") << chem::protocol_name(p);
    EXPECT_EQ(r.model_name, "mock-model");
    const RunTally t = tally(r);
    EXPECT_EQ(t.evaluated, 3u);
    EXPECT_EQ(t.failures, (std::map<std::string, std::size_t>{{expected_failure.at(p), 1}}));
  }
  // The fenced SMILES answer was repaired, not rejected.
  const RunRecord s = score_run(m, canned_predictions(Protocol::smiles), Protocol::smiles, {}, fixed_options());
  EXPECT_EQ(s.samples[0].state, PredictionState::repaired);
  EXPECT_TRUE(s.samples[0].matched);
}

TEST(Score, PredictionsEqualToGroundTruthScoreHundred) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  std::vector<gateway::PredictionRecord> graph_preds, simplified_preds, smiles_preds;
  for (const auto& e : m.entries) {
    graph_preds.push_back({e.sample_id, testkit::graph_document(e.ground_truth), "{}"});
    simplified_preds.push_back(
        {e.sample_id, testkit::graph_document(graph::project_simplified(e.ground_truth), false), "{}"});
    smiles_preds.push_back({e.sample_id, json{{"smiles", *e.smiles}}.dump(), "{}"});
  }
  EXPECT_EQ(accuracy(score_run(m, graph_preds, Protocol::graph))->to_string(), "100.00");
  EXPECT_EQ(accuracy(score_run(m, simplified_preds, Protocol::simplified_graph))->to_string(), "100.00");
  EXPECT_EQ(accuracy(score_run(m, smiles_preds, Protocol::smiles))->to_string(), "100.00");
}

TEST(Score, RandomGroundTruthReplayedScoresHundred) {
  std::mt19937 rng(77);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 10;
  opt.groups = false;
  opt.stereo = false;
  Manifest m;
  std::vector<gateway::PredictionRecord> preds;
  for (int i = 0; i < 60; ++i) {
    ManifestEntry e;
    e.sample_id = "r" + std::to_string(i);
    e.ground_truth = testkit::random_graph(rng, opt);
    m.entries.push_back(e);
    preds.push_back({e.sample_id, testkit::graph_document(graph::shuffle_ids(e.ground_truth, rng())), "{}"});
  }
  const RunRecord r = score_run(m, preds, Protocol::graph);
  for (const auto& s : r.samples) EXPECT_TRUE(s.matched) << s.sample_id << " " << s.detail;
}

TEST(Score, MissingAndFailedPredictionsStayInDenominator) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  auto preds = canned_predictions(Protocol::graph);
  // Keep only e2e-2 (correct) and turn e2e-3 into a failed request.
  preds.erase(preds.begin());
  preds[1].raw.reset();
  const RunRecord r = score_run(m, preds, Protocol::graph);
  const RunTally t = tally(r);
  EXPECT_EQ(t.evaluated, 3u);
  EXPECT_EQ(t.matched, 1u);
  EXPECT_EQ(t.failures, (std::map<std::string, std::size_t>{{"missing", 1}, {"request-failed", 1}}));
  EXPECT_EQ(r.samples[0].state, PredictionState::missing);
  EXPECT_EQ(r.samples[0].mismatch, match::MismatchReason::parse_failed);
  EXPECT_EQ(accuracy(r)->to_string(), "33.33");
}

TEST(Score, SmilesDenominatorCountsOnlyEntriesWithSmiles) {
  TempDir dir;
  const auto path = dir.write("m.jsonl", entry_line("a", "CCO") +
                                             R"({"sample_id": "b", "image": "b.png", "carbon": )" + carbon_of("CC") + "}\n" +
                                             entry_line("c", "c1ccccc1"));
  const Manifest m = load_manifest(path);
  EXPECT_EQ(m.smiles_count(), 2u);
  const std::vector<gateway::PredictionRecord> preds = {
      {"a", R"({"smiles": "OCC"})", "{}"}, {"b", R"({"smiles": "CC"})", "{}"}, {"c", R"({"smiles": "C1CCCCC1"})", "{}"}};
  const RunRecord r = score_run(m, preds, Protocol::smiles);
  const RunTally t = tally(r);
  EXPECT_EQ(t.evaluated, m.smiles_count());
  EXPECT_EQ(t.matched, 1u);
  EXPECT_FALSE(r.samples[1].evaluated);
  EXPECT_EQ(accuracy(r)->to_string(), "50.00");
  // Graph protocols use the whole manifest.
  std::vector<gateway::PredictionRecord> none;
  EXPECT_EQ(tally(score_run(m, none, Protocol::graph)).evaluated, 3u);
  EXPECT_EQ(accuracy(score_run(m, none, Protocol::graph))->to_string(), "0.00");
}

TEST(Score, RejectsInconsistentPredictionFiles) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  auto graph_preds = canned_predictions(Protocol::graph);
  EXPECT_THROW(score_run(m, graph_preds, Protocol::smiles), InputError);  // meta says graph
  for (auto& p : graph_preds) p.meta_json = "{}";
  EXPECT_THROW(score_run(m, graph_preds, Protocol::smiles), InputError);  // graph payload
  auto smiles_preds = canned_predictions(Protocol::smiles);
  for (auto& p : smiles_preds) p.meta_json = "{}";
  EXPECT_THROW(score_run(m, smiles_preds, Protocol::graph), InputError);  // SMILES payload
  std::vector<gateway::PredictionRecord> unknown = {{"zzz", R"({"smiles": "C"})", "{}"}};
  EXPECT_THROW(score_run(m, unknown, Protocol::smiles), InputError);
  std::vector<gateway::PredictionRecord> dup = {{"e2e-1", R"({"smiles": "C"})", "{}"}, {"e2e-1", R"({"smiles": "C"})", "{}"}};
  EXPECT_THROW(score_run(m, dup, Protocol::smiles), InputError);
}

TEST(Score, DeterministicAcrossThreadCountsAndRuns) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  const auto preds = canned_predictions(Protocol::simplified_graph);
  const RunRecord a = score_run(m, preds, Protocol::simplified_graph, {}, fixed_options());
  ScoreOptions threaded = fixed_options();
  threaded.jobs = 4;
  const RunRecord b = score_run(m, preds, Protocol::simplified_graph, {}, threaded);
  EXPECT_EQ(a, b);
  // Timestamps differ between runs but never reach the machine report.
  const RunRecord c = score_run(m, preds, Protocol::simplified_graph);
  EXPECT_EQ(report_json({a}), report_json({c}));
  EXPECT_EQ(a.run_id, c.run_id);
  auto changed = preds;
  changed[0].raw = *changed[0].raw + " ";
  EXPECT_NE(score_run(m, changed, Protocol::simplified_graph).run_id, a.run_id);
}

TEST(Score, GridWeightedMeanEqualsOverallAccuracy) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> pop(1, 400);
    const std::size_t n = pop(rng);
    const std::size_t e = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, e)(rng);
    const RunRecord r = testkit::synthetic_run("m", Protocol::smiles, n, e, k);
    EXPECT_EQ(mosaic::weighted_grid_accuracy(difficulty_grid(r)), *accuracy(r));
    EXPECT_EQ(*accuracy(r), mosaic::Percent::of(k, e));
  }
}

TEST(Score, RunRecordJsonRoundTrip) {
  const Manifest m = load_manifest(kE2e / "manifest.jsonl");
  for (Protocol p : {Protocol::smiles, Protocol::simplified_graph, Protocol::graph}) {
    const RunRecord r = score_run(m, canned_predictions(p), p);
    const std::string text = run_record_to_json(r);
    EXPECT_EQ(run_record_from_json(text), r);
    EXPECT_EQ(run_record_to_json(run_record_from_json(text)), text);
  }
  EXPECT_THROW(run_record_from_json("[]"), ParseError);
  EXPECT_THROW(run_record_from_json(R"({"run_id": "x"})"), ParseError);
}

TEST(Score, ConfigSnapshotReadsBack) {
  match::MatchConfig cfg;
  cfg.compare_stereo = false;
  const auto back = match::MatchConfig::from_json(config_snapshot(cfg));
  EXPECT_FALSE(back.compare_stereo);
  EXPECT_EQ(back.simplification, cfg.simplification);
}

TEST(Score, ShippedBondSimplificationIsTheDefault) {
  const std::string text = slurp(fs::path(OCSRBENCH_DATA_DIR) / "bond_simplification.json");
  EXPECT_EQ(graph::BondMapping::from_json(text, true), graph::BondMapping::default_mapping());
}

// ---------------------------------------------------------------------------
// Reports

TEST(Report, GoldenComparisonTable) {
  const auto runs = testkit::molscribe_runs();
  EXPECT_EQ(report_markdown(runs), slurp(fs::path(OCSRBENCH_FIXTURE_DIR) / "golden" / "molscribe_table.md"));
}

TEST(Report, DashOnlyWhenNotEvaluated) {
  auto runs = testkit::molscribe_runs();
  runs.push_back(testkit::synthetic_run("MolScribe", Protocol::graph, 4, 0, 0));
  runs.push_back(testkit::synthetic_run("GPT", Protocol::graph, 4, 4, 0));
  const std::string md = report_markdown(runs);
  EXPECT_NE(md.find("| MolScribe | 41.05 | 34.47 | - |"), std::string::npos) << md;
  EXPECT_NE(md.find("| GPT | - | - | 0.00 |"), std::string::npos) << md;
}

TEST(Report, DuplicateRunKeyIsRejected) {
  auto runs = testkit::molscribe_runs();
  runs.push_back(testkit::synthetic_run("MolScribe", Protocol::smiles, 3, 3, 1));
  try {
    report_markdown(runs);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate run key"), std::string::npos);
  }
  TempDir dir;
  EXPECT_THROW(emit_report(runs, dir.path() / "r", {ReportFormat::json}), InputError);
}

TEST(Report, EmitsAllFormats) {
  TempDir dir;
  const auto runs = testkit::molscribe_runs();
  const auto paths = emit_report(runs, dir.path() / "out", {ReportFormat::json, ReportFormat::csv, ReportFormat::md});
  ASSERT_EQ(paths.size(), 3u);
  const json j = json::parse(slurp(paths[0]));
  ASSERT_EQ(j["runs"].size(), 2u);
  EXPECT_EQ(j["runs"][0]["accuracy"], "41.05");
  EXPECT_EQ(j["runs"][0]["evaluated"], 95);
  EXPECT_EQ(j["runs"][0]["samples"].size(), 206u);
  EXPECT_FALSE(j["runs"][0].contains("scored_at"));
  const std::string csv = slurp(paths[1]);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,protocol,n_vis,n_chem,matched,population,accuracy");
  // Grid populations sum to the evaluated count of each run.
  std::map<std::string, std::size_t> pop;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 7u);
    pop[f[1]] += std::stoul(f[5]);
  }
  EXPECT_EQ(pop["smiles"], 95u);
  EXPECT_EQ(pop["simplified_graph"], 206u);
  EXPECT_EQ(slurp(paths[2]), report_markdown(runs));
  EXPECT_THROW(emit_report(runs, dir.path() / "missing_dir" / "r", {ReportFormat::md}), Error);
}

// ---------------------------------------------------------------------------
// Run store

TEST(Store, StoreLoadListRoundTrip) {
  TempDir dir;
  RunStore store(dir.path() / "store");
  EXPECT_TRUE(store.list_runs().empty());
  std::vector<RunRecord> runs;
  const std::vector<std::string> stamps = {"2026-03-01T00:00:02Z", "2026-03-01T00:00:01Z", "2026-03-01T00:00:03Z"};
  for (std::size_t i = 0; i < 3; ++i) {
    RunRecord r = testkit::synthetic_run("model" + std::to_string(i), Protocol::graph, 5, 5, i);
    r.scored_at = stamps[i];
    store.store_run(r);
    runs.push_back(r);
  }
  const auto listed = store.list_runs();
  ASSERT_EQ(listed.size(), 3u);
  EXPECT_EQ(listed[0].run_id, runs[1].run_id);
  EXPECT_EQ(listed[1].run_id, runs[0].run_id);
  EXPECT_EQ(listed[2].run_id, runs[2].run_id);
  for (const auto& r : runs) {
    EXPECT_EQ(store.load_run(r.run_id), r);
    EXPECT_EQ(store.load_run_text(r.run_id), run_record_to_json(r));
  }
  EXPECT_THROW(store.store_run(runs[0]), Error);
  EXPECT_THROW(store.load_run("nope"), InputError);
  EXPECT_THROW(store.load_run("../x"), InputError);
  EXPECT_FALSE(fs::exists(dir.path() / "store" / ".lock"));
}

TEST(Store, FreshLockIsBusyStaleLockIsTakenOver) {
  TempDir dir;
  std::vector<std::string> logged;
  RunStore store(dir.path(), {.stale_lock_after = std::chrono::seconds(60), .log = [&](std::string_view m) { logged.emplace_back(m); }});
  const auto lock = dir.write(".lock", "12345\n");
  const RunRecord r = testkit::synthetic_run("m", Protocol::smiles, 2, 2, 1);
  EXPECT_THROW(store.store_run(r), StoreBusyError);
  EXPECT_TRUE(store.list_runs().empty());  // Readers are not blocked.
  fs::last_write_time(lock, fs::file_time_type::clock::now() - std::chrono::minutes(10));
  store.store_run(r);
  EXPECT_EQ(store.list_runs().size(), 1u);
  ASSERT_EQ(logged.size(), 1u);
  EXPECT_NE(logged[0].find("stale lock"), std::string::npos);
  EXPECT_FALSE(fs::exists(lock));
}

TEST(Store, CorruptIndexIsRebuiltFromRunFiles) {
  TempDir dir;
  std::vector<std::string> logged;
  RunStore store(dir.path(), {.stale_lock_after = std::chrono::seconds(300), .log = [&](std::string_view m) { logged.emplace_back(m); }});
  for (int i = 0; i < 3; ++i) {
    RunRecord r = testkit::synthetic_run("m" + std::to_string(i), Protocol::graph, 2, 2, 1);
    r.scored_at = "2026-03-0" + std::to_string(3 - i) + "T00:00:00Z";
    store.store_run(r);
  }
  const auto before = store.list_runs();
  dir.write("index.jsonl", "{\"run_id\": \"m0-graph\"\ngarbage\n");
  const auto after = store.list_runs();
  EXPECT_EQ(after, before);
  EXPECT_EQ(logged.size(), 1u);
  // The rewritten index is consistent again.
  EXPECT_EQ(store.list_runs(), before);
  EXPECT_EQ(logged.size(), 1u);
  fs::remove(dir.path() / "index.jsonl");
  EXPECT_EQ(store.list_runs(), before);
}

TEST(Store, ConcurrentWritersNeverInterleave) {
  TempDir dir;
  RunStore store(dir.path(), {.stale_lock_after = std::chrono::seconds(300), .log = [](std::string_view) {}});
  std::atomic<int> stored{0}, busy{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i) {
        const RunRecord r = testkit::synthetic_run("w" + std::to_string(t) + "_" + std::to_string(i), Protocol::graph, 20, 20, 3);
        for (;;) {
          try {
            store.store_run(r);
            ++stored;
            break;
          } catch (const StoreBusyError&) {
            ++busy;
            std::this_thread::yield();
          }
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(stored.load(), 80);
  EXPECT_EQ(store.list_runs().size(), 80u);
}

// ---------------------------------------------------------------------------
// CLI

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ocsrbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto manifest = (kE2e / "manifest.jsonl").string();
  auto r = run_cli({"score", "--manifest", manifest, "--pred", "p.jsonl", "--protocol", "foo"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("foo"), std::string::npos);
  r = run_cli({"validate", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"validate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(Cli, ScoreWritesReportAndStoresRun) {
  TempDir dir;
  std::string pred;
  for (const auto& p : canned_predictions(Protocol::graph)) pred += gateway::to_jsonl_line(p) + "\n";
  const auto pred_path = dir.write("p.jsonl", pred);
  const auto r = run_cli({"score", "--manifest", (kE2e / "manifest.jsonl").string(), "--pred", pred_path.string(), "--protocol",
                          "graph", "--out", (dir.path() / "rep").string(), "--store", (dir.path() / "store").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("66.67 (2/3 matched)"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir.path() / "rep.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "rep.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "rep.md"));
  const auto rep = run_cli({"--json", "report", "--store", (dir.path() / "store").string()});
  ASSERT_EQ(rep.code, kExitOk) << rep.err;
  const json j = json::parse(rep.out);
  EXPECT_EQ(j["runs"], 1);
  EXPECT_NE(j["table"].get<std::string>().find("| mock-model | - | - | 66.67 |"), std::string::npos);
  // Scoring graph predictions as SMILES is an operational error.
  const auto bad = run_cli({"score", "--manifest", (kE2e / "manifest.jsonl").string(), "--pred", pred_path.string(),
                            "--protocol", "smiles", "--out", (dir.path() / "x").string()});
  EXPECT_EQ(bad.code, kExitOperational);
}

TEST(Cli, ConvertBetweenFormats) {
  TempDir dir;
  const std::string dative = R"({"format": "CARBON", "version": "1.0", "form": "attribute-centric",
    "atoms": {"0": "N", "1": "Pt"}, "bonds": {"0-1": "dative"}})";
  const auto dpath = dir.write("dative.json", dative);
  auto r = run_cli({"convert", "--in", dpath.string(), "--to", "smiles"});
  EXPECT_EQ(r.code, kExitOperational);
  EXPECT_NE(r.err.find("not SMILES-expressible: dative"), std::string::npos) << r.err;

  r = run_cli({"convert", "--in", dpath.string(), "--to", "atom-centric"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ac = dir.write("ac.json", r.out);
  r = run_cli({"convert", "--in", ac.string(), "--to", "attribute-centric"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, carbon::emit_carbon(carbon::parse_carbon(dative).graph, carbon::CarbonForm::attribute_centric));

  const auto smi = dir.write("a.smi", "OC(=O)c1ccccc1\n");
  r = run_cli({"convert", "--in", smi.string(), "--to", "smiles"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, chem::emit_canonical_smiles(chem::parse_smiles("c1ccccc1C(O)=O")) + "\n");

  const auto mol = fs::path(OCSRBENCH_FIXTURE_DIR) / "molfile" / "ethoxide_13c.mol";
  r = run_cli({"--json", "convert", "--in", mol.string(), "--to", "atom-centric", "--out", (dir.path() / "m.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["path"], (dir.path() / "m.json").string());
  EXPECT_EQ(carbon::parse_carbon(slurp(dir.path() / "m.json")).graph.atoms.size(), 3u);
}

TEST(Cli, ValidateAndMosaicStats) {
  TempDir dir;
  auto r = run_cli({"--json", "validate", "--manifest", (kE2e / "manifest.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["entries"], 3);
  const auto bad = dir.write("m.jsonl", entry_line("a", "C", R"(, "visual_labels": ["blury_image"])"));
  r = run_cli({"validate", "--manifest", bad.string()});
  EXPECT_EQ(r.code, kExitOperational);
  EXPECT_NE(r.err.find("blury_image"), std::string::npos);
  r = run_cli({"--json", "validate", "--manifest", bad.string(), "--lenient"});
  EXPECT_EQ(r.code, kExitOperational);
  EXPECT_EQ(json::parse(r.out)["issues"][0]["line"], 1);
  r = run_cli({"validate", "--carbon", dir.write("c.json", carbon_of("CCN")).string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("3 atoms, 2 bonds"), std::string::npos);

  r = run_cli({"--json", "mosaic-stats", "--manifest", (kE2e / "manifest.jsonl").string(), "--out", (dir.path() / "st").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["pct_at_least_one_label"], "100.00");
  EXPECT_EQ(j["pct_both_dimensions"], "33.33");
  EXPECT_EQ(json::parse(slurp(dir.path() / "st.json"))["total"], 3);
}

TEST(Cli, JsonErrorsAreMachineReadable) {
  const auto r = run_cli({"--json", "validate", "--carbon", "/nonexistent/c.json"});
  EXPECT_EQ(r.code, kExitOperational);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["ok"], false);
  EXPECT_EQ(j["command"], "validate");
}

TEST(Cli, CollectThenScoreAgainstMockEndpoint) {
  TempDir dir;
  gateway::MockEndpoint mock(gateway::parse_mock_config(slurp(kE2e / "mock_responses.json"), kE2e));
  mock.start();
  const auto ep = dir.write("ep.json", json{{"base_url", mock.base_url()},
                                            {"model_name", "mock-model"},
                                            {"api_key_env", ""},
                                            {"backoff_base_seconds", 0.01},
                                            {"requests_per_minute", 60000}}
                                           .dump());
  const auto manifest = (kE2e / "manifest.jsonl").string();
  const auto pred = (dir.path() / "p.jsonl").string();
  auto r = run_cli({"--json", "collect", "--manifest", manifest, "--endpoint", ep.string(), "--protocol", "simplified_graph",
                    "--out", pred});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["collected"], 3);
  r = run_cli({"--json", "collect", "--manifest", manifest, "--endpoint", ep.string(), "--protocol", "simplified_graph",
               "--out", pred});
  EXPECT_EQ(json::parse(r.out)["skipped"], 3);
  r = run_cli({"--json", "score", "--manifest", manifest, "--pred", pred, "--protocol", "simplified_graph", "--out",
               (dir.path() / "rep").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["accuracy"], "66.67");
  // One scripted 429 plus three answered requests.
  EXPECT_EQ(mock.stats().requests, 4u);
}

}  // namespace

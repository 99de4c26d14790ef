// Acceptance suite: one PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocsrbench/bench/cli.hpp"
#include "ocsrbench/bench/manifest.hpp"
#include "ocsrbench/bench/report.hpp"
#include "ocsrbench/bench/scoring.hpp"
#include "ocsrbench/carbon/carbon.hpp"
#include "ocsrbench/chem/prediction.hpp"
#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/gateway/mock_endpoint.hpp"
#include "ocsrbench/graph/isomorphism.hpp"
#include "ocsrbench/graph/transform.hpp"
#include "ocsrbench/graph/validate.hpp"
#include "ocsrbench/match/matcher.hpp"
#include "ocsrbench/mosaic/mosaic.hpp"
#include "support/alpha_oracle.hpp"
#include "support/canonical_form.hpp"
#include "support/mosaic_fixture.hpp"
#include "support/random_graphs.hpp"
#include "support/run_fixture.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ocsrbench;
using graph::AttributeComparison;
using graph::MolGraph;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

const fs::path kData = OCSRBENCH_DATA_DIR;
const fs::path kFixtures = OCSRBENCH_FIXTURE_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937 rng(20260101);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 8;
  std::size_t checked = 0, positives = 0, disagreements = 0;
  for (int trial = 0; checked < 1200; ++trial) {
    const MolGraph a = testkit::random_graph(rng, opt);
    MolGraph b;
    switch (trial % 3) {
      case 0: b = graph::shuffle_ids(a, rng()); break;
      case 1: b = graph::shuffle_ids(testkit::mutate(a, rng), rng()); break;
      default: {
        auto same = opt;
        same.min_atoms = same.max_atoms = a.atoms.size();
        b = testkit::random_graph(rng, same);
      }
    }
    if (!graph::validate_graph(b).ok) continue;
    const bool oracle = testkit::brute_force_alpha_isomorphic(a, b, AttributeComparison::graph_protocol());
    disagreements += match::graph_exact_match(a, b).matched != oracle ? 1 : 0;
    positives += oracle ? 1 : 0;
    ++checked;
  }
  const double t = seconds_since(start);
  return {disagreements == 0 && checked >= 500 && t < 60.0,
          std::to_string(checked) + " pairs, " + std::to_string(positives) + " isomorphic, " +
              std::to_string(disagreements) + " disagreements, " + fmt_seconds(t)};
}

Verdict carbon_round_trip() {
  std::mt19937 rng(4242);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 10;
  opt.stereo = true;
  opt.groups = true;
  AttributeComparison full = AttributeComparison::graph_protocol();
  full.hydrogens = full.aromatic = full.stereo = true;
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    for (auto form : {carbon::CarbonForm::atom_centric, carbon::CarbonForm::attribute_centric}) {
      const std::string first = carbon::emit_carbon(g, form);
      const auto parsed = carbon::parse_carbon(first);
      const bool same_bytes = carbon::emit_carbon(parsed.graph, form) == first;
      const bool same_form = parsed.form == form;
      const bool same_coords = testkit::canonical_form(g, {.coordinates = true}) ==
                               testkit::canonical_form(parsed.graph, {.coordinates = true});
      const bool iso = g.atoms.size() > graph::kBruteForceAtomLimit
                           ? match::find_isomorphism(g, parsed.graph, full).has_value()
                           : graph::brute_force_isomorphic(g, parsed.graph, full).has_value();
      failures += same_bytes && same_form && same_coords && iso ? 0 : 1;
    }
  }
  return {failures == 0, "1000 graphs x 2 forms, " + std::to_string(failures) + " failures"};
}

Verdict smiles_properties() {
  std::ifstream in(kFixtures / "smiles_corpus.smi");
  if (!in) return {false, "corpus missing"};
  std::size_t count = 0, unstable = 0;
  bool has_abbreviation = false;
  const auto cmp = AttributeComparison::smiles_protocol(true);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    ++count;
    has_abbreviation = has_abbreviation || line == "[MeO]c1nc(C#N)cc(C)c1";
    const MolGraph g = chem::parse_smiles(line);
    const std::string once = chem::emit_canonical_smiles(g);
    const MolGraph back = chem::parse_smiles(once);
    const bool stable = match::find_isomorphism(g, back, cmp).has_value() && chem::emit_canonical_smiles(back) == once;
    unstable += stable ? 0 : 1;
  }
  const bool smiles_equal = match::smiles_match("c1ccccc1", "C1=CC=CC=C1").matched;
  const bool graph_distinct =
      !match::graph_exact_match(chem::parse_smiles("c1ccccc1"), chem::parse_smiles("C1=CC=CC=C1")).matched;
  return {count == 200 && unstable == 0 && has_abbreviation && smiles_equal && graph_distinct,
          std::to_string(count) + " strings, " + std::to_string(unstable) + " unstable, abbreviation entry " +
              (has_abbreviation ? "present" : "absent") + ", benzene forms " + (smiles_equal ? "equal" : "unequal") +
              " under smiles and " + (graph_distinct ? "distinct" : "equal") + " under graph"};
}

// The example block of a prompt: from the first line that is exactly "{" to the next "}".
std::string prompt_example(const fs::path& prompt) {
  std::istringstream in(slurp(prompt));
  std::string out;
  bool inside = false;
  for (std::string line; std::getline(in, line);) {
    if (!inside && line == "{") inside = true;
    if (inside) out += line + "\n";
    if (inside && line == "}") return out;
  }
  throw std::runtime_error("no example block in " + prompt.string());
}

Verdict prompt_fixtures() {
  const auto prompts = kData / "prompts";
  const auto simple = chem::parse_prediction_document(prompt_example(prompts / "prompt_for_simplified_graph.txt"),
                                                      chem::Protocol::simplified_graph);
  const bool simple_ok = simple.status == chem::ParseStatus::ok && simple.graph() &&
                         simple.graph()->atoms.size() == 4 && simple.graph()->bonds.size() == 3 &&
                         match::simplified_graph_match(*simple.graph(), *simple.graph()).matched;

  const auto graph_doc =
      chem::parse_prediction_document(prompt_example(prompts / "prompt_for_graph.txt"), chem::Protocol::graph);
  const bool graph_ok =
      graph_doc.status == chem::ParseStatus::failed && graph_doc.reason == chem::FailureReason::referential_integrity;

  const std::string smiles_prompt = slurp(prompts / "prompt_for_smiles.txt");
  const auto from = smiles_prompt.find("{\"smiles\": null");
  const auto to = smiles_prompt.find('}', from);
  if (from == std::string::npos || to == std::string::npos) return {false, "null-smiles example not found"};
  const std::string declared = smiles_prompt.substr(from, to - from + 1);
  const auto manifest = bench::load_manifest(kFixtures / "e2e" / "manifest.jsonl");
  std::vector<gateway::PredictionRecord> preds;
  for (const auto& e : manifest.entries) preds.push_back({e.sample_id, declared, "{}"});
  const auto run = bench::score_run(manifest, preds, chem::Protocol::smiles);
  bool smiles_ok = !run.samples.empty();
  for (const auto& s : run.samples) {
    smiles_ok = smiles_ok && !s.matched && s.state == bench::PredictionState::failed &&
                s.failure == chem::FailureReason::model_declared_error;
  }
  return {simple_ok && graph_ok && smiles_ok, std::string("simplified ") + (simple_ok ? "ok" : "bad") + ", graph " +
                                                  (graph_ok ? "referential-integrity" : "bad") + ", smiles " +
                                                  (smiles_ok ? "model-declared-error" : "bad")};
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ocsrbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bench::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// collect then score for each protocol; returns "accuracy|report bytes" per protocol.
std::vector<std::string> mock_pipeline(const std::string& base_url, const testkit::TempDir& dir) {
  const fs::path e2e = kFixtures / "e2e";
  const auto ep = dir.write("ep.json", json{{"base_url", base_url},
                                            {"model_name", "mock-model"},
                                            {"api_key_env", ""},
                                            {"backoff_base_seconds", 0.01},
                                            {"requests_per_minute", 60000}}
                                           .dump());
  std::vector<std::string> out;
  for (const char* protocol : {"smiles", "simplified_graph", "graph"}) {
    const auto pred = (dir.path() / (std::string(protocol) + ".jsonl")).string();
    const auto prefix = (dir.path() / (std::string(protocol) + "-report")).string();
    auto r = run_cli({"--json", "collect", "--manifest", (e2e / "manifest.jsonl").string(), "--endpoint", ep.string(),
                      "--protocol", protocol, "--out", pred});
    if (r.code != bench::kExitOk) throw std::runtime_error("collect " + std::string(protocol) + ": " + r.err);
    r = run_cli({"--json", "score", "--manifest", (e2e / "manifest.jsonl").string(), "--pred", pred, "--protocol",
                 protocol, "--out", prefix, "--formats", "json"});
    if (r.code != bench::kExitOk) throw std::runtime_error("score " + std::string(protocol) + ": " + r.err);
    out.push_back(json::parse(r.out)["accuracy"].get<std::string>() + "|" + slurp(prefix + ".json"));
  }
  return out;
}

Verdict mock_end_to_end() {
  const auto start = Clock::now();
  const fs::path e2e = kFixtures / "e2e";
  gateway::MockEndpoint mock(gateway::parse_mock_config(slurp(e2e / "mock_responses.json"), e2e));
  mock.start();
  const testkit::TempDir first("ocsr-accept"), second("ocsr-accept");
  const auto a = mock_pipeline(mock.base_url(), first);
  const auto b = mock_pipeline(mock.base_url(), second);
  mock.stop();
  const double t = seconds_since(start);
  bool exact = true;
  std::string accs;
  for (const auto& r : a) {
    const auto acc = r.substr(0, r.find('|'));
    accs += (accs.empty() ? "" : "/") + acc;
    exact = exact && acc == "66.67";
  }
  const bool deterministic = a == b;
  return {exact && deterministic && t < 10.0, "accuracy " + accs + " (smiles/simplified/graph), " +
                                                  (deterministic ? "identical" : "different") +
                                                  " reports across 2 runs, " + fmt_seconds(t)};
}

Verdict mosaic_arithmetic() {
  const auto samples = testkit::coverage_fixture(10000, 9329, 4200, 2026);
  const auto cov = mosaic::coverage_stats(samples);
  const auto total = mosaic::distribution_matrix(samples).total;
  const bool coverage_ok = cov.pct_at_least_one_label.to_string() == "93.29" && cov.pct_both_dimensions.to_string() == "42.00";

  // The golden runs plus runs of rising accuracy over the fixture's labels.
  std::vector<bench::RunRecord> runs = testkit::molscribe_runs();
  std::mt19937 rng(93);
  for (int k = 0; k < 20; ++k) {
    auto run = testkit::synthetic_run("synthetic", chem::Protocol::graph, 10000, 10000, 0);
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      run.samples[i].labels = samples[i];
      run.samples[i].matched = rng() % 100 < static_cast<unsigned>(5 * k);
    }
    runs.push_back(std::move(run));
  }
  std::size_t grid_mismatches = 0;
  for (const auto& run : runs) {
    const auto overall = bench::accuracy(run);
    if (!overall) continue;
    grid_mismatches += mosaic::weighted_grid_accuracy(bench::difficulty_grid(run)) == *overall ? 0 : 1;
  }
  return {coverage_ok && total == 10000 && grid_mismatches == 0,
          "coverage " + cov.pct_at_least_one_label.to_string() + "/" + cov.pct_both_dimensions.to_string() +
              ", matrix total " + std::to_string(total) + ", " + std::to_string(grid_mismatches) + " of " +
              std::to_string(runs.size()) + " runs with grid mean != overall"};
}

Verdict simplification_monotonicity() {
  std::mt19937 rng(31337);
  std::size_t exact = 0, violations = 0;
  testkit::GraphGenOptions opt;
  opt.all_bond_types = true;
  for (int trial = 0; trial < 3000; ++trial) {
    const MolGraph a = testkit::random_graph(rng, opt);
    const MolGraph b = graph::shuffle_ids(trial % 2 ? testkit::mutate(a, rng) : a, rng());
    if (!graph::validate_graph(b).ok) continue;
    if (!match::graph_exact_match(a, b).matched) continue;
    ++exact;
    violations += match::simplified_graph_match(a, b).matched ? 0 : 1;
  }
  return {violations == 0 && exact > 0,
          std::to_string(exact) + " exact matches, " + std::to_string(violations) + " violations"};
}

Verdict report_fidelity() {
  const std::string golden = slurp(kFixtures / "golden" / "molscribe_table.md");
  const std::string rendered = bench::report_markdown(testkit::molscribe_runs());
  return {rendered == golden, rendered == golden ? "byte-identical to golden table" : "differs:\n" + rendered};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"CARBON round-trip", carbon_round_trip},
      {"SMILES properties", smiles_properties},
      {"prompt fixtures replay", prompt_fixtures},
      {"mock end-to-end", mock_end_to_end},
      {"MOSAIC arithmetic", mosaic_arithmetic},
      {"simplification monotonicity", simplification_monotonicity},
      {"report fidelity", report_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "ocsrbench/bench/cli.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ocsrbench/bench/manifest.hpp"
#include "ocsrbench/bench/report.hpp"
#include "ocsrbench/bench/run_store.hpp"
#include "ocsrbench/bench/scoring.hpp"
#include "ocsrbench/carbon/carbon.hpp"
#include "ocsrbench/chem/molfile.hpp"
#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/gateway/gateway.hpp"
#include "ocsrbench/mosaic/mosaic.hpp"

#ifndef OCSRBENCH_DATA_DIR
#define OCSRBENCH_DATA_DIR "data"
#endif

namespace ocsrbench::bench {
namespace {

using nlohmann::ordered_json;

// Bad option combinations that CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Protocol protocol_of(const std::string& name) { return *chem::parse_protocol(name); }

std::string check_protocol(const std::string& s) {
  return chem::parse_protocol(s) ? std::string() : "unknown protocol '" + s + "' (expected smiles, simplified_graph or graph)";
}

std::set<ReportFormat> formats_of(const std::vector<std::string>& names) {
  std::set<ReportFormat> out;
  for (const auto& n : names) out.insert(*parse_report_format(n));
  return out;
}

ordered_json paths_json(const std::vector<std::filesystem::path>& paths) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : paths) arr.push_back(p.string());
  return arr;
}

void emit(const Context& ctx, ordered_json result, const std::string& text) {
  if (ctx.json) {
    ordered_json j;
    j["ok"] = true;
    for (auto& [k, v] : result.items()) j[k] = v;
    ctx.out << j.dump() << "\n";
  } else {
    ctx.out << text;
  }
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string manifest;
  std::string carbon;
  bool lenient = false;
};

int run_validate(const Context& ctx, const ValidateArgs& a) {
  if (a.manifest.empty() == a.carbon.empty()) throw UsageError("validate: give exactly one of --manifest or --carbon");
  if (!a.carbon.empty()) {
    const auto parsed = carbon::parse_carbon(read_text(a.carbon));
    ordered_json r{{"command", "validate"},
                   {"form", carbon::form_name(parsed.form)},
                   {"atoms", parsed.graph.atoms.size()},
                   {"bonds", parsed.graph.bonds.size()}};
    emit(ctx, r,
         "CARBON OK: " + std::string(carbon::form_name(parsed.form)) + ", " + std::to_string(parsed.graph.atoms.size()) +
             " atoms, " + std::to_string(parsed.graph.bonds.size()) + " bonds\n");
    return kExitOk;
  }
  const Manifest m = load_manifest(a.manifest, {.strict = !a.lenient});
  ordered_json issues = ordered_json::array();
  std::string text;
  for (const auto& i : m.issues) {
    issues.push_back({{"line", i.line}, {"message", i.message}});
    text += a.manifest + ":" + std::to_string(i.line) + ": " + i.message + "\n";
  }
  text += "manifest " + std::string(m.issues.empty() ? "OK" : "has issues") + ": " + std::to_string(m.entries.size()) +
          " entries (" + std::to_string(m.smiles_count()) + " with SMILES)\n";
  if (ctx.json) {
    ordered_json j{{"ok", m.issues.empty()},
                   {"command", "validate"},
                   {"entries", m.entries.size()},
                   {"with_smiles", m.smiles_count()},
                   {"issues", issues}};
    ctx.out << j.dump() << "\n";
  } else {
    ctx.out << text;
  }
  return m.issues.empty() ? kExitOk : kExitOperational;
}

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
  std::string in;
  std::string from = "auto";
  std::string to;
  std::string out;
};

graph::MolGraph read_structure(const ConvertArgs& a) {
  std::string from = a.from;
  if (from == "auto") {
    const auto ext = std::filesystem::path(a.in).extension().string();
    from = (ext == ".mol" || ext == ".sdf") ? "molfile" : (ext == ".smi" || ext == ".smiles") ? "smiles" : "carbon";
  }
  const std::string text = read_text(a.in);
  if (from == "molfile") return chem::parse_molfile_v2000(text);
  if (from == "smiles") return chem::parse_smiles(trim(text));
  return carbon::parse_carbon(text).graph;
}

int run_convert(const Context& ctx, const ConvertArgs& a) {
  const graph::MolGraph g = read_structure(a);
  std::string result;
  if (a.to == "smiles") {
    result = chem::emit_canonical_smiles(g) + "\n";
  } else {
    result = carbon::emit_carbon(g, a.to == "attribute-centric" ? carbon::CarbonForm::attribute_centric : carbon::CarbonForm::atom_centric);
    if (result.empty() || result.back() != '\n') result += "\n";
  }
  if (!a.out.empty()) {
    write_text(a.out, result);
    emit(ctx, {{"command", "convert"}, {"to", a.to}, {"path", a.out}}, "wrote " + a.out + "\n");
  } else if (ctx.json) {
    emit(ctx, {{"command", "convert"}, {"to", a.to}, {"output", result}}, "");
  } else {
    ctx.out << result;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// collect

struct CollectArgs {
  std::string manifest;
  std::string endpoint;
  std::string base_url;
  std::string model;
  std::string protocol;
  std::string out;
  std::string prompts = std::string(OCSRBENCH_DATA_DIR) + "/prompts";
};

int run_collect(const Context& ctx, const CollectArgs& a) {
  const Manifest m = load_manifest(a.manifest);
  gateway::EndpointConfig cfg = gateway::EndpointConfig::from_json(read_text(a.endpoint));
  if (!a.base_url.empty()) cfg.base_url = a.base_url;
  if (!a.model.empty()) cfg.model_name = a.model;
  const gateway::Client client(cfg, gateway::make_http_transport());
  std::vector<gateway::CollectionItem> items;
  for (const auto& e : m.entries) items.push_back({e.sample_id, e.image});
  gateway::JsonlSink sink(a.out);
  const auto summary =
      gateway::run_collection(client, items, protocol_of(a.protocol), gateway::PromptAssets::from_directory(a.prompts), sink);
  emit(ctx,
       {{"command", "collect"},
        {"model", cfg.model_name},
        {"protocol", a.protocol},
        {"collected", summary.ok},
        {"failed", summary.failed},
        {"skipped", summary.skipped},
        {"path", a.out}},
       "collected " + std::to_string(summary.ok) + " ok, " + std::to_string(summary.failed) + " failed, " +
           std::to_string(summary.skipped) + " already recorded -> " + a.out + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string manifest;
  std::string pred;
  std::string protocol;
  std::string model;
  std::string config;
  std::string out = "score_report";
  std::vector<std::string> formats = {"json", "csv", "md"};
  std::string store;
  std::string run_id;
  int jobs = 1;
};

int run_score(const Context& ctx, const ScoreArgs& a) {
  const Manifest m = load_manifest(a.manifest);
  const auto predictions = gateway::read_prediction_file(a.pred);
  const match::MatchConfig cfg = a.config.empty() ? match::MatchConfig{} : match::MatchConfig::from_json(read_text(a.config));
  const RunRecord record =
      score_run(m, predictions, protocol_of(a.protocol), cfg, {.model_name = a.model, .run_id = a.run_id, .scored_at = {}, .jobs = a.jobs});
  const auto paths = emit_report({record}, a.out, formats_of(a.formats));
  if (!a.store.empty()) RunStore(a.store).store_run(record);

  const RunTally t = tally(record);
  const auto acc = accuracy(record);
  const std::string acc_text = acc ? acc->to_string() : "-";
  ordered_json failures = ordered_json::object();
  for (const auto& [k, v] : t.failures) failures[k] = v;
  std::string text = record.model_name + " " + a.protocol + ": " + acc_text + " (" + std::to_string(t.matched) + "/" +
                     std::to_string(t.evaluated) + " matched)\n";
  for (const auto& [k, v] : t.failures) text += "  " + k + ": " + std::to_string(v) + "\n";
  for (const auto& p : paths) text += "wrote " + p.string() + "\n";
  emit(ctx,
       {{"command", "score"},
        {"run_id", record.run_id},
        {"model", record.model_name},
        {"protocol", a.protocol},
        {"evaluated", t.evaluated},
        {"matched", t.matched},
        {"accuracy", acc ? ordered_json(acc_text) : ordered_json(nullptr)},
        {"failures", failures},
        {"reports", paths_json(paths)}},
       text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string store;
  std::vector<std::string> runs;
  std::vector<std::string> records;
  std::string out;
  std::vector<std::string> formats = {"json", "csv", "md"};
};

int run_report(const Context& ctx, const ReportArgs& a) {
  if (a.store.empty() && a.records.empty()) throw UsageError("report: give --store or --record");
  if (!a.runs.empty() && a.store.empty()) throw UsageError("report: --run needs --store");
  std::vector<RunRecord> runs;
  if (!a.store.empty()) {
    const RunStore store(a.store);
    if (a.runs.empty()) {
      for (const auto& s : store.list_runs()) runs.push_back(store.load_run(s.run_id));
    } else {
      for (const auto& id : a.runs) runs.push_back(store.load_run(id));
    }
  }
  for (const auto& f : a.records) runs.push_back(run_record_from_json(read_text(f)));
  const std::string table = report_markdown(runs);
  std::vector<std::filesystem::path> paths;
  if (!a.out.empty()) paths = emit_report(runs, a.out, formats_of(a.formats));
  std::string text = table;
  for (const auto& p : paths) text += "wrote " + p.string() + "\n";
  emit(ctx, {{"command", "report"}, {"runs", runs.size()}, {"table", table}, {"reports", paths_json(paths)}}, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mosaic-stats

struct MosaicArgs {
  std::string manifest;
  std::string out;
};

int run_mosaic(const Context& ctx, const MosaicArgs& a) {
  const Manifest m = load_manifest(a.manifest);
  std::vector<mosaic::LabelSet> labels;
  for (const auto& e : m.entries) labels.push_back(e.labels);
  const auto cov = mosaic::coverage_stats(labels);
  std::vector<std::filesystem::path> paths;
  if (!a.out.empty()) {
    paths = {a.out + ".json", a.out + ".csv"};
    write_text(paths[0], mosaic::stats_report_json(labels));
    write_text(paths[1], mosaic::distribution_csv(mosaic::distribution_matrix(labels)));
  }
  std::string text = "samples: " + std::to_string(labels.size()) + "\n" +
                     "at least one label: " + cov.pct_at_least_one_label.to_string() + "\n" +
                     "both dimensions: " + cov.pct_both_dimensions.to_string() + "\n";
  for (const auto& p : paths) text += "wrote " + p.string() + "\n";
  emit(ctx,
       {{"command", "mosaic-stats"},
        {"samples", labels.size()},
        {"pct_at_least_one_label", cov.pct_at_least_one_label.to_string()},
        {"pct_both_dimensions", cov.pct_both_dimensions.to_string()},
        {"reports", paths_json(paths)}},
       text);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chemical structure recognition benchmark harness", "ocsrbench"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.fallthrough();
  Context ctx{out, err};
  app.add_flag("--json", ctx.json, "Print one JSON object instead of text");

  const auto format_check = CLI::IsMember({"json", "csv", "md"});

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a manifest or a CARBON document");
  validate->add_option("--manifest", va.manifest, "Manifest (JSON Lines)");
  validate->add_option("--carbon", va.carbon, "CARBON document");
  validate->add_flag("--lenient", va.lenient, "Report every bad entry instead of stopping at the first");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Convert between CARBON forms, SMILES and MolFile");
  convert->add_option("--in", ca.in, "Input file")->required();
  convert->add_option("--from", ca.from, "Input format")->check(CLI::IsMember({"auto", "carbon", "molfile", "smiles"}));
  convert->add_option("--to", ca.to, "Output")->required()->check(CLI::IsMember({"atom-centric", "attribute-centric", "smiles"}));
  convert->add_option("--out", ca.out, "Output file (default stdout)");

  CollectArgs co;
  auto* collect = app.add_subcommand("collect", "Query a model endpoint for every manifest sample");
  collect->add_option("--manifest", co.manifest, "Manifest (JSON Lines)")->required();
  collect->add_option("--endpoint", co.endpoint, "Endpoint configuration (JSON)")->required();
  collect->add_option("--base-url", co.base_url, "Override the endpoint base URL");
  collect->add_option("--model", co.model, "Override the model name");
  collect->add_option("--protocol", co.protocol, "smiles, simplified_graph or graph")->required()->check(check_protocol);
  collect->add_option("--out", co.out, "Prediction file (JSON Lines, appended, resumable)")->required();
  collect->add_option("--prompts", co.prompts, "Directory with prompt templates and exemplar images");

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score predictions against the manifest");
  score->add_option("--manifest", sa.manifest, "Manifest (JSON Lines)")->required();
  score->add_option("--pred", sa.pred, "Prediction file (JSON Lines)")->required();
  score->add_option("--protocol", sa.protocol, "smiles, simplified_graph or graph")->required()->check(check_protocol);
  score->add_option("--model", sa.model, "Model name (default: from prediction metadata)");
  score->add_option("--config", sa.config, "Match configuration (JSON)");
  score->add_option("--out", sa.out, "Report path prefix")->capture_default_str();
  score->add_option("--formats", sa.formats, "Report formats")->delimiter(',')->check(format_check);
  score->add_option("--store", sa.store, "Also store the run record in this run store");
  score->add_option("--run-id", sa.run_id, "Run id (default: content hash)");
  score->add_option("--jobs", sa.jobs, "Scoring threads")->check(CLI::Range(1, 64));

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Merge stored runs into one comparison report");
  report->add_option("--store", ra.store, "Run store directory");
  report->add_option("--run", ra.runs, "Run id from the store (repeatable; default all)");
  report->add_option("--record", ra.records, "Run record file (repeatable)");
  report->add_option("--out", ra.out, "Report path prefix (default: print the table only)");
  report->add_option("--formats", ra.formats, "Report formats")->delimiter(',')->check(format_check);

  MosaicArgs ma;
  auto* mosaic_cmd = app.add_subcommand("mosaic-stats", "Difficulty-label statistics of a manifest");
  mosaic_cmd->add_option("--manifest", ma.manifest, "Manifest (JSON Lines)")->required();
  mosaic_cmd->add_option("--out", ma.out, "Write <prefix>.json and <prefix>.csv");

  std::string command;
  try {
    app.parse(argc, argv);
    command = app.get_subcommands().front()->get_name();
    if (command == "validate") return run_validate(ctx, va);
    if (command == "convert") return run_convert(ctx, ca);
    if (command == "collect") return run_collect(ctx, co);
    if (command == "score") return run_score(ctx, sa);
    if (command == "report") return run_report(ctx, ra);
    return run_mosaic(ctx, ma);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << "\n" << app.help();
    if (ctx.json) out << ordered_json{{"ok", false}, {"command", command}, {"error", e.what()}}.dump() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (ctx.json) out << ordered_json{{"ok", false}, {"command", command}, {"error", e.what()}}.dump() << "\n";
    return kExitOperational;
  }
}

}  // namespace ocsrbench::bench

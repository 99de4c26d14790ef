#include "ocsrbench/bench/report.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"

namespace ocsrbench::bench {
namespace {

using nlohmann::ordered_json;

constexpr std::array<Protocol, 3> kColumns = {Protocol::smiles, Protocol::simplified_graph, Protocol::graph};

std::string run_key(const RunRecord& r) { return r.model_name + "/" + std::string(chem::protocol_name(r.protocol)); }

// Quotes a CSV field when it holds a delimiter, quote or line break.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Pipes inside a model name would split the cell.
std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error("cannot write report " + path.string());
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "md") return ReportFormat::md;
  return std::nullopt;
}

void check_run_keys(const std::vector<RunRecord>& runs) {
  std::set<std::string> keys;
  for (const auto& r : runs) {
    if (!keys.insert(run_key(r)).second) throw InputError("duplicate run key: " + run_key(r));
  }
}

std::string report_json(const std::vector<RunRecord>& runs) {
  ordered_json out;
  out["runs"] = ordered_json::array();
  for (const auto& r : runs) {
    const RunTally t = tally(r);
    const auto acc = accuracy(r);
    ordered_json j;
    j["run_id"] = r.run_id;
    j["model"] = r.model_name;
    j["protocol"] = chem::protocol_name(r.protocol);
    j["config"] = ordered_json::parse(r.config_snapshot);
    j["evaluated"] = t.evaluated;
    j["matched"] = t.matched;
    j["accuracy"] = acc ? ordered_json(acc->to_string()) : ordered_json(nullptr);
    j["failures"] = ordered_json::object();
    for (const auto& [k, v] : t.failures) j["failures"][k] = v;
    j["grid"] = ordered_json::array();
    for (const auto& [score, cell] : difficulty_grid(r)) {
      j["grid"].push_back({{"n_vis", score.n_vis},
                           {"n_chem", score.n_chem},
                           {"matched", cell.matched},
                           {"population", cell.population},
                           {"accuracy", mosaic::Percent::of(cell.matched, cell.population).to_string()}});
    }
    const ordered_json record = ordered_json::parse(run_record_to_json(r));
    j["samples"] = record["samples"];
    out["runs"].push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string report_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model,protocol,n_vis,n_chem,matched,population,accuracy\n";
  for (const auto& r : runs) {
    for (const auto& [score, cell] : difficulty_grid(r)) {
      out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.model_name), chem::protocol_name(r.protocol), score.n_vis,
                         score.n_chem, cell.matched, cell.population,
                         mosaic::Percent::of(cell.matched, cell.population).to_string());
    }
  }
  return out;
}

std::string report_markdown(const std::vector<RunRecord>& runs) {
  check_run_keys(runs);
  std::vector<std::string> models;
  std::map<std::pair<std::string, Protocol>, std::string> cells;
  for (const auto& r : runs) {
    if (std::find(models.begin(), models.end(), r.model_name) == models.end()) models.push_back(r.model_name);
    const auto acc = accuracy(r);
    cells[{r.model_name, r.protocol}] = acc ? acc->to_string() : "-";
  }
  std::string out = "| Method | SMILES | Simplified Graph | Graph |\n|:--|--:|--:|--:|\n";
  for (const auto& m : models) {
    out += "| " + md_cell(m);
    for (Protocol p : kColumns) {
      const auto it = cells.find({m, p});
      out += " | " + (it == cells.end() ? std::string("-") : it->second);
    }
    out += " |\n";
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& runs, const std::filesystem::path& prefix,
                                               const std::set<ReportFormat>& formats) {
  check_run_keys(runs);
  std::vector<std::filesystem::path> written;
  auto path_for = [&](const char* ext) {
    std::filesystem::path p = prefix;
    p += ext;
    return p;
  };
  if (formats.contains(ReportFormat::json)) {
    written.push_back(path_for(".json"));
    write_file(written.back(), report_json(runs));
  }
  if (formats.contains(ReportFormat::csv)) {
    written.push_back(path_for(".csv"));
    write_file(written.back(), report_csv(runs));
  }
  if (formats.contains(ReportFormat::md)) {
    written.push_back(path_for(".md"));
    write_file(written.back(), report_markdown(runs));
  }
  return written;
}

}  // namespace ocsrbench::bench

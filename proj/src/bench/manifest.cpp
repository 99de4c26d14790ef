#include "ocsrbench/bench/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ocsrbench/carbon/carbon.hpp"
#include "ocsrbench/chem/smiles.hpp"

namespace ocsrbench::bench {
namespace {

using nlohmann::ordered_json;

const std::set<std::string, std::less<>> kEntryKeys = {"sample_id",     "image",           "carbon", "smiles",
                                                       "visual_labels", "chemical_labels", "source"};
const std::set<std::string, std::less<>> kSourceKeys = {"journal", "paper", "figure"};

// Thrown inside entry decoding; carries only the message.
struct EntryIssue {
  std::string message;
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string string_field(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw EntryIssue{std::string("missing \"") + key + "\""};
  if (!it->is_string()) throw EntryIssue{std::string("\"") + key + "\" must be a string"};
  return it->get<std::string>();
}

template <typename Label, typename Parse>
std::set<Label> decode_labels(const ordered_json& j, const char* key, const char* kind, Parse parse) {
  std::set<Label> out;
  const auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw EntryIssue{std::string("\"") + key + "\" must be an array of label names"};
  for (const auto& v : *it) {
    if (!v.is_string()) throw EntryIssue{std::string("\"") + key + "\" must be an array of label names"};
    const auto label = parse(v.get<std::string>());
    if (!label) throw EntryIssue{std::string("unknown ") + kind + " label '" + v.get<std::string>() + "'"};
    out.insert(*label);
  }
  return out;
}

ManifestEntry decode_entry(const ordered_json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw EntryIssue{"entry must be a JSON object"};
  for (const auto& [key, value] : j.items()) {
    if (!kEntryKeys.contains(key)) throw EntryIssue{"unknown key \"" + key + "\""};
  }
  ManifestEntry e;
  e.sample_id = string_field(j, "sample_id");
  if (e.sample_id.empty()) throw EntryIssue{"empty sample_id"};
  const std::filesystem::path image = string_field(j, "image");
  e.image = image.is_absolute() ? image : base_dir / image;

  const auto carbon_it = j.find("carbon");
  if (carbon_it == j.end()) throw EntryIssue{"missing \"carbon\""};
  if (carbon_it->is_object()) {
    e.carbon_text = carbon_it->dump();
  } else if (carbon_it->is_string()) {
    const std::filesystem::path ref = carbon_it->get<std::string>();
    try {
      e.carbon_text = read_text(ref.is_absolute() ? ref : base_dir / ref);
    } catch (const InputError& err) {
      throw EntryIssue{err.what()};
    }
  } else {
    throw EntryIssue{"\"carbon\" must be an inline document or a file path"};
  }
  try {
    e.ground_truth = carbon::parse_carbon(e.carbon_text).graph;
  } catch (const Error& err) {
    throw EntryIssue{std::string("ground-truth CARBON: ") + err.what()};
  }

  if (const auto it = j.find("smiles"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw EntryIssue{"\"smiles\" must be a string"};
    e.smiles = it->get<std::string>();
    try {
      (void)chem::parse_smiles(*e.smiles);
    } catch (const Error& err) {
      throw EntryIssue{std::string("ground-truth SMILES: ") + err.what()};
    }
  }

  e.labels.visual = decode_labels<mosaic::VisualLabel>(j, "visual_labels", "visual", mosaic::parse_visual_label);
  e.labels.chemical =
      decode_labels<mosaic::ChemicalLabel>(j, "chemical_labels", "chemical", mosaic::parse_chemical_label);

  if (const auto it = j.find("source"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw EntryIssue{"\"source\" must be an object"};
    SourceInfo s;
    for (const auto& [key, value] : it->items()) {
      if (!kSourceKeys.contains(key)) throw EntryIssue{"unknown key \"source." + key + "\""};
      if (!value.is_string()) throw EntryIssue{"\"source." + key + "\" must be a string"};
    }
    s.journal = it->value("journal", "");
    s.paper = it->value("paper", "");
    s.figure = it->value("figure", "");
    e.source = std::move(s);
  }
  return e;
}

}  // namespace

ManifestError::ManifestError(const std::string& file, std::vector<ManifestIssue> issues)
    : InputError(issues.empty() ? file + ": invalid manifest"
                                : file + ":" + std::to_string(issues.front().line) + ": " + issues.front().message),
      issues_(std::move(issues)) {}

const ManifestEntry* Manifest::find(const std::string& sample_id) const {
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.sample_id == sample_id; });
  return it == entries.end() ? nullptr : &*it;
}

std::size_t Manifest::smiles_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.smiles.has_value(); }));
}

Manifest load_manifest(const std::filesystem::path& path, ManifestOptions options) {
  const std::string text = read_text(path);
  const std::filesystem::path base_dir = path.parent_path();
  Manifest out;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const ordered_json j = ordered_json::parse(line, nullptr, false);
      if (j.is_discarded()) throw EntryIssue{"invalid JSON"};
      ManifestEntry e = decode_entry(j, base_dir);
      if (!seen.insert(e.sample_id).second) throw EntryIssue{"duplicate sample_id '" + e.sample_id + "'"};
      e.line = line_no;
      out.entries.push_back(std::move(e));
    } catch (const EntryIssue& issue) {
      if (options.strict) throw ManifestError(path.string(), {{line_no, issue.message}});
      out.issues.push_back({line_no, issue.message});
    }
  }
  return out;
}

}  // namespace ocsrbench::bench

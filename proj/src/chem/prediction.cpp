#include "ocsrbench/chem/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::chem {
namespace {

using Json = nlohmann::json;

// Carries a categorical failure out of the document walk.
struct Failure {
  FailureReason reason;
  std::string detail;
};

[[noreturn]] void fail(FailureReason reason, std::string detail) { throw Failure{reason, std::move(detail)}; }

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(FailureReason::schema_violation, path + ": " + what);
}

int integer(const Json& v, const std::string& path) {
  if (v.is_number_integer()) {
    const auto n = v.get<std::int64_t>();
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) schema(path, "integer out of range");
    return static_cast<int>(n);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 2e9) return static_cast<int>(d);
  }
  schema(path, "expected an integer");
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema(path, std::string("missing \"") + key + "\"");
  return *it;
}

graph::Atom read_atom(const Json& rec, const std::string& path) {
  if (!rec.is_object()) schema(path, "expected an object");
  graph::Atom a;
  a.id = integer(member(rec, "id", path), path + ".id");
  const Json& label = member(rec, "atom", path);
  if (!label.is_string()) schema(path + ".atom", "expected a string");
  try {
    a.label = graph::AtomLabel::parse(label.get<std::string>());
  } catch (const Error& e) {
    schema(path + ".atom", e.what());
  }
  if (const auto it = rec.find("point_2d"); it != rec.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      schema(path + ".point_2d", "expected [x, y]");
    }
    a.point_2d = graph::Point2d{(*it)[0].get<double>(), (*it)[1].get<double>()};
  }
  if (const auto it = rec.find("charge"); it != rec.end() && !it->is_null()) {
    if (it->is_string()) {
      try {
        a.charge = graph::Charge::parse(it->get<std::string>());
      } catch (const Error& e) {
        schema(path + ".charge", e.what());
      }
    } else {
      a.charge = graph::Charge(integer(*it, path + ".charge"));
    }
  }
  if (const auto it = rec.find("isotope"); it != rec.end() && !it->is_null()) a.isotope = integer(*it, path + ".isotope");
  if (const auto it = rec.find("valence"); it != rec.end() && !it->is_null()) a.valence = integer(*it, path + ".valence");
  if (const auto it = rec.find("radical"); it != rec.end() && !it->is_null()) {
    const int r = integer(*it, path + ".radical");
    if (r < 1 || r > 3) schema(path + ".radical", "expected 1, 2 or 3");
    a.radical = static_cast<graph::Radical>(r);
  }
  return a;
}

graph::Bond read_bond(const Json& rec, const std::string& path, Protocol protocol) {
  if (!rec.is_object()) schema(path, "expected an object");
  graph::Bond b;
  b.atom1 = integer(member(rec, "atom1", path), path + ".atom1");
  b.atom2 = integer(member(rec, "atom2", path), path + ".atom2");
  const Json& type = member(rec, "bond_type", path);
  if (!type.is_string()) schema(path + ".bond_type", "expected a string");
  const auto parsed = graph::parse_bond_type(type.get<std::string>());
  if (!parsed) fail(FailureReason::unknown_bond_type, path + ".bond_type: \"" + type.get<std::string>() + "\"");
  if (protocol == Protocol::simplified_graph && !graph::is_basic(*parsed)) {
    fail(FailureReason::unknown_bond_type,
         path + ".bond_type: \"" + type.get<std::string>() + "\" is not allowed under simplified_graph");
  }
  b.type = *parsed;
  return b;
}

graph::Bracket read_bracket(const Json& rec, const std::string& path) {
  if (!rec.is_object()) schema(path, "expected an object");
  graph::Bracket br;
  const Json& atoms = member(rec, "atoms", path);
  if (!atoms.is_array()) schema(path + ".atoms", "expected a list");
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    br.atoms.push_back(integer(atoms[k], path + ".atoms[" + std::to_string(k) + "]"));
  }
  std::sort(br.atoms.begin(), br.atoms.end());
  br.atoms.erase(std::unique(br.atoms.begin(), br.atoms.end()), br.atoms.end());
  if (const auto it = rec.find("mark"); it != rec.end() && !it->is_null()) {
    if (it->is_string()) {
      br.mark = it->get<std::string>();
    } else if (it->is_number()) {
      br.mark = it->dump();
    } else {
      schema(path + ".mark", "expected a string or number");
    }
  }
  return br;
}

bool referential(std::string_view code) {
  static const std::set<std::string_view> codes = {
      "duplicate-atom-id",    "stereo-unknown-atom",     "bond-self-loop",     "bond-unknown-atom", "duplicate-bond",
      "bracket-unknown-atom", "bracket-partial-overlap", "group-unknown-atom",
  };
  return codes.count(code) > 0;
}

Payload read_graph(const Json& doc, Protocol protocol) {
  if (!doc.contains("atoms") && doc.contains("error")) {
    fail(FailureReason::model_declared_error, doc["error"].is_string() ? doc["error"].get<std::string>() : doc["error"].dump());
  }
  const Json& atoms = member(doc, "atoms", "$");
  const Json& bonds = member(doc, "bonds", "$");
  if (!atoms.is_array()) schema("atoms", "expected a list");
  if (!bonds.is_array()) schema("bonds", "expected a list");
  graph::MolGraph g;
  for (std::size_t i = 0; i < atoms.size(); ++i) g.atoms.push_back(read_atom(atoms[i], "atoms[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    g.bonds.push_back(read_bond(bonds[i], "bonds[" + std::to_string(i) + "]", protocol));
  }
  if (protocol == Protocol::graph) {
    if (const auto it = doc.find("brackets"); it != doc.end() && !it->is_null()) {
      if (!it->is_array()) schema("brackets", "expected a list");
      for (std::size_t i = 0; i < it->size(); ++i) {
        g.brackets.push_back(read_bracket((*it)[i], "brackets[" + std::to_string(i) + "]"));
      }
    }
  }
  const auto report = graph::validate_graph(g);
  if (!report.ok) {
    const auto first = report.errors().front();
    const std::string detail = first.location + ": " + first.message;
    fail(referential(first.code) ? FailureReason::referential_integrity : FailureReason::schema_violation, detail);
  }
  return g;
}

Payload read_smiles(const Json& doc) {
  const auto it = doc.find("smiles");
  if (it == doc.end() || it->is_null()) {
    if (const auto err = doc.find("error"); err != doc.end()) {
      fail(FailureReason::model_declared_error, err->is_string() ? err->get<std::string>() : err->dump());
    }
    if (it != doc.end()) fail(FailureReason::model_declared_error, "smiles is null");
    schema("$", "missing \"smiles\"");
  }
  if (!it->is_string()) schema("smiles", "expected a string");
  return SmilesText{it->get<std::string>()};
}

}  // namespace

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::smiles: return "smiles";
    case Protocol::simplified_graph: return "simplified_graph";
    case Protocol::graph: return "graph";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  if (name == "smiles") return Protocol::smiles;
  if (name == "simplified_graph" || name == "simplified-graph") return Protocol::simplified_graph;
  if (name == "graph") return Protocol::graph;
  return std::nullopt;
}

std::string_view parse_status_name(ParseStatus s) {
  switch (s) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::repaired: return "repaired";
    case ParseStatus::failed: return "failed";
  }
  return "?";
}

std::string_view failure_reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::not_json: return "not-json";
    case FailureReason::schema_violation: return "schema-violation";
    case FailureReason::unknown_bond_type: return "unknown-bond-type";
    case FailureReason::referential_integrity: return "referential-integrity";
    case FailureReason::model_declared_error: return "model-declared-error";
  }
  return "?";
}

std::optional<FailureReason> parse_failure_reason(std::string_view name) {
  for (auto r : {FailureReason::not_json, FailureReason::schema_violation, FailureReason::unknown_bond_type,
                 FailureReason::referential_integrity, FailureReason::model_declared_error}) {
    if (failure_reason_name(r) == name) return r;
  }
  return std::nullopt;
}

const graph::MolGraph* Prediction::graph() const noexcept {
  return payload ? std::get_if<graph::MolGraph>(&*payload) : nullptr;
}

const SmilesText* Prediction::smiles() const noexcept { return payload ? std::get_if<SmilesText>(&*payload) : nullptr; }

Prediction parse_prediction_document(std::string_view raw, Protocol protocol, std::string sample_id) {
  Prediction p;
  p.sample_id = std::move(sample_id);
  p.protocol = protocol;
  p.raw_text = std::string(raw);
  try {
    const std::string text = repair_model_text(raw);
    const Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) fail(FailureReason::not_json, "no JSON object found");
    if (!doc.is_object()) schema("$", "expected a JSON object");
    p.payload = protocol == Protocol::smiles ? read_smiles(doc) : read_graph(doc, protocol);
    p.status = text == raw ? ParseStatus::ok : ParseStatus::repaired;
  } catch (const Failure& f) {
    p.status = ParseStatus::failed;
    p.reason = f.reason;
    p.detail = f.detail;
    p.payload.reset();
  } catch (const std::exception& e) {
    p.status = ParseStatus::failed;
    p.reason = FailureReason::schema_violation;
    p.detail = e.what();
    p.payload.reset();
  }
  return p;
}

}  // namespace ocsrbench::chem

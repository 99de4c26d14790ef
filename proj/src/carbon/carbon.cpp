#include "ocsrbench/carbon/carbon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"

namespace ocsrbench::carbon {
namespace {

using graph::Atom;
using graph::AtomGroup;
using graph::Bond;
using graph::BondMarker;
using graph::BondType;
using graph::Bracket;
using graph::Charge;
using graph::Chirality;
using graph::MolGraph;
using graph::kImplicitHydrogen;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Emission

Json number_json(double v) {
  if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

Json charge_json(const Charge& c) {
  if (c.is_integer()) return c.numerator();
  return c.to_string();
}

std::string marker_text(BondMarker m) { return m == BondMarker::up ? "/" : "\\"; }

std::string pair_key(int a, int b) { return std::to_string(a) + "-" + std::to_string(b); }

// Bond as written: directional bonds keep atom1 first, others start at the lower id.
Bond oriented(const Bond& b) {
  if (graph::is_directional(b.type) || b.atom1 <= b.atom2) return b;
  return Bond{b.atom2, b.atom1, b.type, graph::flip(b.marker)};
}

Json stereo_json(const graph::TetrahedralStereo& st) {
  Json neighbors = Json::array();
  for (int n : st.neighbors) {
    if (n == kImplicitHydrogen) {
      neighbors.push_back("H");
    } else {
      neighbors.push_back(n);
    }
  }
  return Json{{"tag", st.tag == Chirality::anticlockwise ? "@" : "@@"}, {"neighbors", neighbors}};
}

// Ids replaced by canonical rank, atoms in rank order, stereo orders sorted with the tag
// adjusted, brackets and groups sorted: equal graphs become equal values.
MolGraph canonical_copy(const MolGraph& g) {
  const auto rank = graph::canonical_ranking(g, {.alpha_placeholders = false, .coordinates = true});
  std::vector<int> new_ids;
  new_ids.reserve(g.atoms.size());
  for (const Atom& a : g.atoms) new_ids.push_back(rank.at(a.id));
  MolGraph out = graph::relabel_ids(g, new_ids);
  std::sort(out.atoms.begin(), out.atoms.end(), [](const Atom& a, const Atom& b) { return a.id < b.id; });
  for (Atom& a : out.atoms) {
    if (!a.stereo) continue;
    const int sign = graph::permutation_sign(a.stereo->neighbors);
    std::sort(a.stereo->neighbors.begin(), a.stereo->neighbors.end());
    if (sign < 0) {
      a.stereo->tag = a.stereo->tag == Chirality::anticlockwise ? Chirality::clockwise : Chirality::anticlockwise;
    }
  }
  for (Bond& b : out.bonds) b = oriented(b);
  std::sort(out.bonds.begin(), out.bonds.end(), [](const Bond& a, const Bond& b) {
    return std::pair(a.atom1, a.atom2) < std::pair(b.atom1, b.atom2);
  });
  std::sort(out.brackets.begin(), out.brackets.end(), [](const Bracket& a, const Bracket& b) {
    return std::tie(a.atoms, a.mark) < std::tie(b.atoms, b.mark);
  });
  std::sort(out.groups.begin(), out.groups.end(), [](const AtomGroup& a, const AtomGroup& b) {
    return std::tie(a.atoms, a.charge) < std::tie(b.atoms, b.charge);
  });
  return out;
}

Json brackets_json(const MolGraph& g) {
  Json out = Json::array();
  for (const Bracket& br : g.brackets) out.push_back(Json{{"atoms", br.atoms}, {"mark", br.mark}});
  return out;
}

Json groups_json(const MolGraph& g) {
  Json out = Json::array();
  for (const AtomGroup& grp : g.groups) out.push_back(Json{{"atoms", grp.atoms}, {"charge", charge_json(grp.charge)}});
  return out;
}

Json header(CarbonForm form) {
  return Json{{"format", "CARBON"}, {"version", std::string(kCarbonVersion)}, {"form", std::string(form_name(form))}};
}

Json atom_centric_body(const MolGraph& g) {
  Json doc = header(CarbonForm::atom_centric);
  Json atoms = Json::array();
  for (const Atom& a : g.atoms) {
    Json rec{{"id", a.id}, {"atom", a.label.text()}};
    if (a.point_2d) rec["point_2d"] = Json::array({number_json(a.point_2d->x), number_json(a.point_2d->y)});
    if (a.charge) rec["charge"] = charge_json(*a.charge);
    if (a.isotope) rec["isotope"] = *a.isotope;
    if (a.valence) rec["valence"] = *a.valence;
    if (a.radical) rec["radical"] = static_cast<int>(*a.radical);
    if (a.hydrogens) rec["hydrogens"] = *a.hydrogens;
    if (a.aromatic) rec["aromatic"] = true;
    if (a.stereo) rec["stereo"] = stereo_json(*a.stereo);
    Json bonds = Json::array();
    for (const Bond& b : g.bonds) {
      if (b.atom1 != a.id) continue;
      Json bj{{"to", b.atom2}, {"bond_type", std::string(graph::bond_type_name(b.type))}};
      if (b.marker != BondMarker::none) bj["marker"] = marker_text(b.marker);
      bonds.push_back(std::move(bj));
    }
    rec["bonds"] = std::move(bonds);
    atoms.push_back(std::move(rec));
  }
  doc["atoms"] = std::move(atoms);
  doc["brackets"] = brackets_json(g);
  if (!g.groups.empty()) doc["groups"] = groups_json(g);
  return doc;
}

Json attribute_centric_body(const MolGraph& g) {
  Json doc = header(CarbonForm::attribute_centric);
  Json atoms = Json::object();
  Json coordinates = Json::object(), charges = Json::object(), isotopes = Json::object(),
       valences = Json::object(), radicals = Json::object(), hydrogens = Json::object(),
       chirality = Json::object(), aromatic = Json::array();
  for (const Atom& a : g.atoms) {
    const std::string key = std::to_string(a.id);
    atoms[key] = a.label.text();
    if (a.point_2d) coordinates[key] = Json::array({number_json(a.point_2d->x), number_json(a.point_2d->y)});
    if (a.charge) charges[key] = charge_json(*a.charge);
    if (a.isotope) isotopes[key] = *a.isotope;
    if (a.valence) valences[key] = *a.valence;
    if (a.radical) radicals[key] = static_cast<int>(*a.radical);
    if (a.hydrogens) hydrogens[key] = *a.hydrogens;
    if (a.aromatic) aromatic.push_back(a.id);
    if (a.stereo) chirality[key] = stereo_json(*a.stereo);
  }
  Json bonds = Json::object(), markers = Json::object();
  for (const Bond& b : g.bonds) {
    const std::string key = pair_key(b.atom1, b.atom2);
    bonds[key] = std::string(graph::bond_type_name(b.type));
    if (b.marker != BondMarker::none) markers[key] = marker_text(b.marker);
  }
  doc["atoms"] = std::move(atoms);
  doc["bonds"] = std::move(bonds);
  auto put = [&](const char* name, Json& value) {
    if (!value.empty()) doc[name] = std::move(value);
  };
  put("coordinates", coordinates);
  put("charges", charges);
  put("isotopes", isotopes);
  put("valences", valences);
  put("radicals", radicals);
  put("hydrogens", hydrogens);
  put("aromatic", aromatic);
  put("chirality", chirality);
  put("bond_markers", markers);
  doc["brackets"] = brackets_json(g);
  if (!g.groups.empty()) doc["groups"] = groups_json(g);
  return doc;
}

// ---------------------------------------------------------------------------
// Parsing

class Reader {
 public:
  explicit Reader(ParseOptions options) : options_(options) {}

  std::vector<graph::ValidationIssue> take_warnings() { return std::move(warnings_); }

  [[noreturn]] static void fail(const std::string& message, const std::string& path) {
    throw ValidationError(message, path);
  }

  void check_fields(const Json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) != known.end()) continue;
      const std::string where = path.empty() ? key : path + "." + key;
      if (options_.strict) fail("unknown field '" + key + "'", where);
      warnings_.push_back({graph::Severity::warning, "unknown-field", "unknown field '" + key + "' ignored", where});
    }
  }

  static const Json& object_at(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) fail("expected an object", path);
    const auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing required field '") + key + "'", path);
    return *it;
  }

  static int integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) fail("expected an integer", path);
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail("integer out of range", path);
    return static_cast<int>(x);
  }

  static double number(const Json& v, const std::string& path) {
    if (!v.is_number()) fail("expected a number", path);
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number", path);
    return x;
  }

  static std::string string(const Json& v, const std::string& path) {
    if (!v.is_string()) fail("expected a string", path);
    return v.get<std::string>();
  }

  static graph::AtomLabel label(const Json& v, const std::string& path) {
    const std::string text = string(v, path);
    try {
      return graph::AtomLabel::parse(text);
    } catch (const ParseError& e) {
      fail(std::string("invalid atom label: ") + e.what(), path);
    }
  }

  static graph::Point2d point(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail("expected [x, y]", path);
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  static Charge charge(const Json& v, const std::string& path) {
    if (v.is_number_integer()) return Charge(v.get<std::int64_t>());
    if (v.is_string()) {
      try {
        return Charge::parse(v.get<std::string>());
      } catch (const Error& e) {
        fail(std::string("invalid charge: ") + e.what(), path);
      } catch (const ContractViolation& e) {
        fail(std::string("invalid charge: ") + e.what(), path);
      }
    }
    fail("charge must be an integer or a \"p/q\" string", path);
  }

  static graph::Radical radical(const Json& v, const std::string& path) {
    const int r = integer(v, path);
    if (r < 1 || r > 3) fail("radical must be 1 (doublet), 2 (singlet) or 3 (triplet)", path);
    return static_cast<graph::Radical>(r);
  }

  static BondType bond_type(const Json& v, const std::string& path) {
    const std::string name = string(v, path);
    const auto t = graph::parse_bond_type(name);
    if (!t) fail("unknown bond type '" + name + "'", path);
    return *t;
  }

  static BondMarker marker(const Json& v, const std::string& path) {
    const std::string m = string(v, path);
    if (m == "/") return BondMarker::up;
    if (m == "\\") return BondMarker::down;
    fail("bond marker must be \"/\" or \"\\\"", path);
  }

  graph::TetrahedralStereo stereo(const Json& v, const std::string& path) {
    if (!v.is_object()) fail("expected an object", path);
    check_fields(v, path, {"tag", "neighbors"});
    graph::TetrahedralStereo st;
    const std::string tag = string(object_at(v, "tag", path), path + ".tag");
    if (tag == "@") {
      st.tag = Chirality::anticlockwise;
    } else if (tag == "@@") {
      st.tag = Chirality::clockwise;
    } else {
      fail("stereo tag must be \"@\" or \"@@\"", path + ".tag");
    }
    const Json& ns = object_at(v, "neighbors", path);
    if (!ns.is_array()) fail("expected an array", path + ".neighbors");
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const std::string where = path + ".neighbors[" + std::to_string(k) + "]";
      if (ns[k].is_string() && ns[k].get<std::string>() == "H") {
        st.neighbors.push_back(kImplicitHydrogen);
      } else {
        st.neighbors.push_back(integer(ns[k], where));
      }
    }
    return st;
  }

  static std::vector<int> id_list(const Json& v, const std::string& path) {
    if (!v.is_array()) fail("expected an array of atom ids", path);
    std::vector<int> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(integer(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
  }

  void sets(const Json& doc, MolGraph& g, const std::set<int>& ids) {
    if (const auto it = doc.find("brackets"); it != doc.end()) {
      if (!it->is_array()) fail("expected an array", "brackets");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string path = "brackets[" + std::to_string(k) + "]";
        const Json& br = (*it)[k];
        if (!br.is_object()) fail("expected an object", path);
        check_fields(br, path, {"atoms", "mark"});
        Bracket b;
        b.atoms = id_list(object_at(br, "atoms", path), path + ".atoms");
        require_known(b.atoms, ids, path + ".atoms", "bracket");
        const Json& mark = object_at(br, "mark", path);
        b.mark = mark.is_number_integer() ? std::to_string(mark.get<std::int64_t>()) : string(mark, path + ".mark");
        std::sort(b.atoms.begin(), b.atoms.end());
        g.brackets.push_back(std::move(b));
      }
    }
    if (const auto it = doc.find("groups"); it != doc.end()) {
      if (!it->is_array()) fail("expected an array", "groups");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string path = "groups[" + std::to_string(k) + "]";
        const Json& gr = (*it)[k];
        if (!gr.is_object()) fail("expected an object", path);
        check_fields(gr, path, {"atoms", "charge"});
        AtomGroup grp;
        grp.atoms = id_list(object_at(gr, "atoms", path), path + ".atoms");
        require_known(grp.atoms, ids, path + ".atoms", "group");
        grp.charge = charge(object_at(gr, "charge", path), path + ".charge");
        std::sort(grp.atoms.begin(), grp.atoms.end());
        g.groups.push_back(std::move(grp));
      }
    }
  }

  static void require_known(const std::vector<int>& list, const std::set<int>& ids, const std::string& path,
                            const char* what) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (!ids.count(list[k])) {
        fail(std::string(what) + " references unknown atom id " + std::to_string(list[k]),
             path + "[" + std::to_string(k) + "]");
      }
    }
  }

 private:
  ParseOptions options_;
  std::vector<graph::ValidationIssue> warnings_;
};

MolGraph read_atom_centric(const Json& doc, Reader& r) {
  r.check_fields(doc, "", {"format", "version", "form", "atoms", "brackets", "groups"});
  const Json& atoms = Reader::object_at(doc, "atoms", "");
  if (!atoms.is_array()) Reader::fail("expected an array", "atoms");

  MolGraph g;
  std::set<int> ids;
  struct PendingBond {
    Bond bond;
    std::string path;
  };
  std::vector<PendingBond> pending;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string path = "atoms[" + std::to_string(i) + "]";
    const Json& rec = atoms[i];
    if (!rec.is_object()) Reader::fail("expected an object", path);
    r.check_fields(rec, path, {"id", "atom", "point_2d", "charge", "isotope", "valence", "radical", "hydrogens",
                               "aromatic", "stereo", "bonds"});
    Atom a;
    a.id = Reader::integer(Reader::object_at(rec, "id", path), path + ".id");
    if (!ids.insert(a.id).second) Reader::fail("duplicate atom id " + std::to_string(a.id), path + ".id");
    a.label = Reader::label(Reader::object_at(rec, "atom", path), path + ".atom");
    if (auto it = rec.find("point_2d"); it != rec.end()) a.point_2d = Reader::point(*it, path + ".point_2d");
    if (auto it = rec.find("charge"); it != rec.end()) a.charge = Reader::charge(*it, path + ".charge");
    if (auto it = rec.find("isotope"); it != rec.end()) a.isotope = Reader::integer(*it, path + ".isotope");
    if (auto it = rec.find("valence"); it != rec.end()) a.valence = Reader::integer(*it, path + ".valence");
    if (auto it = rec.find("radical"); it != rec.end()) a.radical = Reader::radical(*it, path + ".radical");
    if (auto it = rec.find("hydrogens"); it != rec.end()) a.hydrogens = Reader::integer(*it, path + ".hydrogens");
    if (auto it = rec.find("aromatic"); it != rec.end()) {
      if (!it->is_boolean()) Reader::fail("expected a boolean", path + ".aromatic");
      a.aromatic = it->get<bool>();
    }
    if (auto it = rec.find("stereo"); it != rec.end()) a.stereo = r.stereo(*it, path + ".stereo");
    if (auto it = rec.find("bonds"); it != rec.end()) {
      if (!it->is_array()) Reader::fail("expected an array", path + ".bonds");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string bpath = path + ".bonds[" + std::to_string(k) + "]";
        const Json& bj = (*it)[k];
        if (!bj.is_object()) Reader::fail("expected an object", bpath);
        r.check_fields(bj, bpath, {"to", "bond_type", "marker"});
        Bond b;
        b.atom1 = a.id;
        b.atom2 = Reader::integer(Reader::object_at(bj, "to", bpath), bpath + ".to");
        b.type = Reader::bond_type(Reader::object_at(bj, "bond_type", bpath), bpath + ".bond_type");
        if (auto m = bj.find("marker"); m != bj.end()) b.marker = Reader::marker(*m, bpath + ".marker");
        pending.push_back({b, bpath});
      }
    }
    g.atoms.push_back(std::move(a));
  }
  for (const auto& [bond, path] : pending) {
    if (!ids.count(bond.atom2)) Reader::fail("bond references unknown atom id " + std::to_string(bond.atom2), path + ".to");
    g.bonds.push_back(bond);
  }
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (!g.atoms[i].stereo) continue;
    for (int n : g.atoms[i].stereo->neighbors) {
      if (n != kImplicitHydrogen && !ids.count(n)) {
        Reader::fail("stereo references unknown atom id " + std::to_string(n), "atoms[" + std::to_string(i) + "].stereo");
      }
    }
  }
  r.sets(doc, g, ids);
  return g;
}

int key_id(const std::string& key, const std::string& path) {
  int v = 0;
  const auto res = std::from_chars(key.data(), key.data() + key.size(), v);
  if (res.ec != std::errc{} || res.ptr != key.data() + key.size() || key.empty()) {
    Reader::fail("key '" + key + "' is not an atom id", path);
  }
  return v;
}

std::pair<int, int> pair_from_key(const std::string& key, const std::string& path) {
  const auto dash = key.find('-', 1);
  if (dash == std::string::npos) Reader::fail("bond key '" + key + "' is not of the form \"a1-a2\"", path);
  return {key_id(key.substr(0, dash), path), key_id(key.substr(dash + 1), path)};
}

MolGraph read_attribute_centric(const Json& doc, Reader& r) {
  r.check_fields(doc, "", {"format", "version", "form", "atoms", "bonds", "coordinates", "charges", "isotopes",
                           "valences", "radicals", "hydrogens", "aromatic", "chirality", "bond_markers", "brackets",
                           "groups"});
  const Json& atoms = Reader::object_at(doc, "atoms", "");
  if (!atoms.is_object()) Reader::fail("expected an object keyed by atom id", "atoms");

  MolGraph g;
  std::map<int, std::size_t> index;
  for (const auto& [key, value] : atoms.items()) {
    const std::string path = "atoms." + key;
    Atom a;
    a.id = key_id(key, path);
    if (index.count(a.id)) Reader::fail("duplicate atom id " + std::to_string(a.id), path);
    a.label = Reader::label(value, path);
    index.emplace(a.id, g.atoms.size());
    g.atoms.push_back(std::move(a));
  }
  std::set<int> ids;
  for (const auto& [id, i] : index) ids.insert(id);

  std::map<std::string, std::size_t> bond_index;
  if (const auto it = doc.find("bonds"); it != doc.end()) {
    if (!it->is_object()) Reader::fail("expected an object keyed by \"a1-a2\"", "bonds");
    for (const auto& [key, value] : it->items()) {
      const std::string path = "bonds." + key;
      const auto [a1, a2] = pair_from_key(key, path);
      for (int id : {a1, a2}) {
        if (!ids.count(id)) Reader::fail("bond references unknown atom id " + std::to_string(id), path);
      }
      bond_index.emplace(key, g.bonds.size());
      g.bonds.push_back(Bond{a1, a2, Reader::bond_type(value, path), BondMarker::none});
    }
  }

  auto each = [&](const char* name, auto&& apply) {
    const auto it = doc.find(name);
    if (it == doc.end()) return;
    if (!it->is_object()) Reader::fail("expected an object keyed by atom id", name);
    for (const auto& [key, value] : it->items()) {
      const std::string path = std::string(name) + "." + key;
      const int id = key_id(key, path);
      const auto found = index.find(id);
      if (found == index.end()) {
        Reader::fail(std::string(name) + " names unknown atom id " + std::to_string(id), path);
      }
      apply(g.atoms[found->second], value, path);
    }
  };
  each("coordinates", [](Atom& a, const Json& v, const std::string& p) { a.point_2d = Reader::point(v, p); });
  each("charges", [](Atom& a, const Json& v, const std::string& p) { a.charge = Reader::charge(v, p); });
  each("isotopes", [](Atom& a, const Json& v, const std::string& p) { a.isotope = Reader::integer(v, p); });
  each("valences", [](Atom& a, const Json& v, const std::string& p) { a.valence = Reader::integer(v, p); });
  each("radicals", [](Atom& a, const Json& v, const std::string& p) { a.radical = Reader::radical(v, p); });
  each("hydrogens", [](Atom& a, const Json& v, const std::string& p) { a.hydrogens = Reader::integer(v, p); });
  each("chirality", [&](Atom& a, const Json& v, const std::string& p) {
    a.stereo = r.stereo(v, p);
    for (int n : a.stereo->neighbors) {
      if (n != kImplicitHydrogen && !ids.count(n)) Reader::fail("stereo references unknown atom id " + std::to_string(n), p);
    }
  });
  if (const auto it = doc.find("aromatic"); it != doc.end()) {
    const auto list = Reader::id_list(*it, "aromatic");
    Reader::require_known(list, ids, "aromatic", "aromatic list");
    for (int id : list) g.atoms[index.at(id)].aromatic = true;
  }
  if (const auto it = doc.find("bond_markers"); it != doc.end()) {
    if (!it->is_object()) Reader::fail("expected an object keyed by \"a1-a2\"", "bond_markers");
    for (const auto& [key, value] : it->items()) {
      const std::string path = "bond_markers." + key;
      const auto found = bond_index.find(key);
      if (found == bond_index.end()) Reader::fail("bond_markers names unknown bond " + key, path);
      g.bonds[found->second].marker = Reader::marker(value, path);
    }
  }
  r.sets(doc, g, ids);
  return g;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

CarbonForm form_from_name(const std::string& name) {
  if (name == "atom-centric") return CarbonForm::atom_centric;
  if (name == "attribute-centric") return CarbonForm::attribute_centric;
  throw ParseError("unknown CARBON form '" + name + "'");
}

}  // namespace

std::string_view form_name(CarbonForm form) {
  return form == CarbonForm::atom_centric ? "atom-centric" : "attribute-centric";
}

CarbonDocument to_document(const MolGraph& g, CarbonForm form) {
  graph::require_valid(g, "emit_carbon");
  const MolGraph c = canonical_copy(g);
  CarbonDocument doc;
  doc.form = form;
  doc.body = form == CarbonForm::atom_centric ? atom_centric_body(c) : attribute_centric_body(c);
  return doc;
}

std::string to_text(const CarbonDocument& doc) { return doc.body.dump(2) + "\n"; }

std::string emit_carbon(const MolGraph& g, CarbonForm form) { return to_text(to_document(g, form)); }

CarbonDocument parse_document(std::string_view text) {
  Json body;
  try {
    body = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ParseError(std::string("malformed CARBON text: ") + e.what(), line, column);
  }
  if (!body.is_object()) throw ParseError("CARBON document must be a JSON object", 1, 1);
  auto header_string = [&](const char* key) -> std::string {
    const auto it = body.find(key);
    if (it == body.end()) throw ParseError(std::string("CARBON header is missing '") + key + "'");
    if (!it->is_string()) throw ParseError(std::string("CARBON header field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  if (header_string("format") != "CARBON") throw ParseError("not a CARBON document (format must be \"CARBON\")");
  CarbonDocument doc;
  doc.version = header_string("version");
  if (doc.version != kCarbonVersion) throw ParseError("unsupported CARBON version '" + doc.version + "'");
  doc.form = form_from_name(header_string("form"));
  doc.body = std::move(body);
  return doc;
}

ParsedCarbon parse_carbon(const CarbonDocument& doc, ParseOptions options) {
  Reader reader(options);
  ParsedCarbon out;
  out.form = doc.form;
  out.graph = doc.form == CarbonForm::atom_centric ? read_atom_centric(doc.body, reader)
                                                   : read_attribute_centric(doc.body, reader);
  const auto report = graph::validate_graph(out.graph);
  if (!report.ok) {
    const auto first = report.errors().front();
    throw ValidationError(first.message, first.location);
  }
  out.warnings = reader.take_warnings();
  return out;
}

ParsedCarbon parse_carbon(std::string_view text, ParseOptions options) {
  return parse_carbon(parse_document(text), options);
}

CarbonDocument convert_form(const CarbonDocument& doc, CarbonForm target, ParseOptions options) {
  return to_document(parse_carbon(doc, options).graph, target);
}

}  // namespace ocsrbench::carbon

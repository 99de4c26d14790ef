#include "ocsrbench/graph/transform.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"

namespace ocsrbench::graph {

BondMapping BondMapping::default_mapping() {
  std::array<BondType, kBondTypeCount> table{};
  for (BondType t : all_bond_types()) table[static_cast<std::size_t>(t)] = t;
  auto set = [&](BondType from, BondType to) { table[static_cast<std::size_t>(from)] = to; };
  for (BondType t : {BondType::bold, BondType::dashed_bold, BondType::wavy, BondType::any,
                     BondType::single_or_double, BondType::single_or_aromatic, BondType::dative,
                     BondType::dashed_dative, BondType::hydrogen, BondType::attachment_point}) {
    set(t, BondType::single);
  }
  for (BondType t : {BondType::dashed_double, BondType::bold_double, BondType::double_either,
                     BondType::double_or_aromatic}) {
    set(t, BondType::double_);
  }
  set(BondType::dashed_triple, BondType::triple);
  set(BondType::triple_with_single_dash, BondType::triple);
  set(BondType::hollow_wedge, BondType::solid_wedge);
  return from_table(table);
}

BondMapping BondMapping::from_table(const std::array<BondType, kBondTypeCount>& table) {
  for (BondType t : all_bond_types()) {
    const BondType image = table[static_cast<std::size_t>(t)];
    if (!is_basic(image)) {
      throw ConfigError("bond mapping sends '" + std::string(bond_type_name(t)) + "' to non-basic type '" +
                        std::string(bond_type_name(image)) + "'");
    }
    if (is_basic(t) && image != t) {
      throw ConfigError("bond mapping must fix basic type '" + std::string(bond_type_name(t)) + "'");
    }
  }
  BondMapping m;
  m.table_ = table;
  return m;
}

BondMapping BondMapping::from_json(std::string_view text, bool require_total) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bond mapping is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("bond mapping must be a JSON object");

  auto table = default_mapping().table_;
  std::vector<bool> named(kBondTypeCount, false);
  for (const auto& [key, value] : doc.items()) {
    const auto from = parse_bond_type(key);
    if (!from) throw ConfigError("bond mapping names unknown bond type '" + key + "'");
    if (!value.is_string()) throw ConfigError("bond mapping image for '" + key + "' must be a string");
    const auto to = parse_bond_type(value.get<std::string>());
    if (!to) throw ConfigError("bond mapping sends '" + key + "' to unknown type '" + value.get<std::string>() + "'");
    table[static_cast<std::size_t>(*from)] = *to;
    named[static_cast<std::size_t>(*from)] = true;
  }
  if (require_total) {
    for (BondType t : all_bond_types()) {
      if (!is_basic(t) && !named[static_cast<std::size_t>(t)]) {
        throw ConfigError("bond mapping is not total: missing '" + std::string(bond_type_name(t)) + "'");
      }
    }
  }
  return from_table(table);
}

std::string BondMapping::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (BondType t : all_bond_types()) {
    if (is_basic(t)) continue;
    doc[std::string(bond_type_name(t))] = std::string(bond_type_name((*this)(t)));
  }
  return doc.dump(2) + "\n";
}

MolGraph normalize_placeholder_labels(const MolGraph& g) {
  const auto order = canonical_order(g, RankingOptions{.alpha_placeholders = true});
  std::map<int, int> r_rename;
  std::map<int, int> group_rename;
  for (std::size_t idx : order) {
    const AtomLabel& label = g.atoms[idx].label;
    if (const auto* r = label.get_if<RGroupLabel>(); r && r->kind == SuffixKind::greek) {
      r_rename.emplace(r->value, static_cast<int>(r_rename.size()));
    } else if (const auto* grp = label.get_if<GroupPlaceholderLabel>()) {
      group_rename.emplace(grp->greek, static_cast<int>(group_rename.size()));
    }
  }
  MolGraph out = g;
  for (Atom& atom : out.atoms) {
    if (const auto* r = atom.label.get_if<RGroupLabel>(); r && r->kind == SuffixKind::greek) {
      atom.label = AtomLabel::r_greek(r_rename.at(r->value));
    } else if (const auto* grp = atom.label.get_if<GroupPlaceholderLabel>()) {
      atom.label = AtomLabel::group(group_rename.at(grp->greek));
    }
  }
  return out;
}

MolGraph simplify_bonds(const MolGraph& g, const BondMapping& mapping) {
  MolGraph out = g;
  for (Bond& b : out.bonds) b.type = mapping(b.type);
  return out;
}

MolGraph project_simplified(const MolGraph& g) {
  return project_simplified(g, BondMapping::default_mapping());
}

MolGraph project_simplified(const MolGraph& g, const BondMapping& mapping) {
  MolGraph out = simplify_bonds(g, mapping);
  for (Atom& a : out.atoms) {
    a.charge.reset();
    a.isotope.reset();
    a.valence.reset();
    a.radical.reset();
  }
  out.brackets.clear();
  out.groups.clear();
  return out;
}

MolGraph fold_deuterium(const MolGraph& g) {
  MolGraph out = g;
  for (Atom& a : out.atoms) {
    if (a.label.is<DeuteriumLabel>()) {
      a.label = AtomLabel::element("H");
      a.isotope = 2;
    }
  }
  return out;
}

MolGraph shuffle_ids(const MolGraph& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<int> ids;
  ids.reserve(g.atoms.size());
  for (const Atom& a : g.atoms) ids.push_back(a.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  MolGraph out = relabel_ids(g, ids);

  std::vector<std::size_t> order(out.atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  out = reorder_atoms(out, order);

  std::shuffle(out.bonds.begin(), out.bonds.end(), rng);
  std::bernoulli_distribution coin(0.5);
  for (Bond& b : out.bonds) {
    if (!is_directional(b.type) && coin(rng)) {
      std::swap(b.atom1, b.atom2);
      b.marker = flip(b.marker);
    }
  }
  std::shuffle(out.brackets.begin(), out.brackets.end(), rng);
  return out;
}

}  // namespace ocsrbench::graph

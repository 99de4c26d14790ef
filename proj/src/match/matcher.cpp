#include "ocsrbench/match/matcher.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"
#include "ocsrbench/graph/stereo.hpp"
#include "ocsrbench/graph/topology.hpp"
#include "ocsrbench/graph/validate.hpp"
#include "ocsrbench/match/aromatic.hpp"

namespace ocsrbench::match {
namespace {

using graph::AtomMapping;
using graph::AttributeComparison;
using graph::MolGraph;

std::string optional_text(bool compared, const std::optional<int>& v) {
  if (!compared) return "*";
  return v ? std::to_string(*v) : "-";
}

// Refinement seed: only attributes that compare by plain equality under `cmp`.
std::string atom_key(const graph::Atom& a, const AttributeComparison& cmp) {
  std::string key = cmp.labels ? a.label.text() : "*";
  key += "|c" + (cmp.charge ? a.effective_charge().to_string() : "*");
  key += "|i" + optional_text(cmp.isotope, a.isotope);
  key += "|r" + optional_text(cmp.radical, a.radical ? std::optional<int>(static_cast<int>(*a.radical)) : std::nullopt);
  key += "|h" + (cmp.hydrogens ? std::to_string(a.hydrogens.value_or(0)) : "*");
  key += cmp.aromatic ? (a.aromatic ? "|a" : "|-") : "|*";
  if (cmp.stereo) key += a.stereo ? "|s" : "|-";
  return key;
}

int edge_color(const graph::Bond& b, bool from_atom1, const AttributeComparison& cmp) {
  if (!cmp.bond_types) return 0;
  int dir = 0;
  if (cmp.bond_direction && graph::is_directional(b.type)) dir = from_atom1 ? 1 : 2;
  return static_cast<int>(b.type) * 3 + dir;
}

// Both graphs live in one index space: a's atoms first, then b's.
class IsomorphismSearch {
 public:
  IsomorphismSearch(const MolGraph& a, const MolGraph& b, const AttributeComparison& cmp)
      : a_(a), b_(b), cmp_(cmp), na_(a.atoms.size()) {}

  std::optional<AtomMapping> run() {
    if (a_.atoms.size() != b_.atoms.size() || a_.bonds.size() != b_.bonds.size()) return std::nullopt;
    if (cmp_.brackets && a_.brackets.size() != b_.brackets.size()) return std::nullopt;
    build(a_, 0);
    build(b_, na_);
    auto colors = graph::equitable_refinement(adjacency_, graph::dense_ranks(keys_));
    if (search(colors)) return result_;
    return std::nullopt;
  }

 private:
  void build(const MolGraph& g, std::size_t offset) {
    const graph::Topology topo(g);
    std::vector<std::vector<std::string>> memberships(g.atoms.size());
    if (cmp_.brackets) {
      for (const auto& br : g.brackets) {
        for (int id : br.atoms) {
          memberships[topo.index_of(id)].push_back(std::to_string(br.atoms.size()) + ":" + graph::collapse_whitespace(br.mark));
        }
      }
    }
    adjacency_.resize(offset + g.atoms.size());
    keys_.resize(offset + g.atoms.size());
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
      std::string key = atom_key(g.atoms[i], cmp_);
      std::sort(memberships[i].begin(), memberships[i].end());
      for (const auto& m : memberships[i]) key += "|b" + m;
      keys_[offset + i] = std::move(key);
      for (const auto& nb : topo.neighbors(i)) {
        const bool from_atom1 = topo.bond_atom1(nb.bond) == i;
        adjacency_[offset + i].emplace_back(offset + nb.atom, edge_color(g.bonds[nb.bond], from_atom1, cmp_));
      }
    }
  }

  bool balanced(const std::vector<int>& colors) const {
    const std::size_t k = colors.empty() ? 0 : static_cast<std::size_t>(*std::max_element(colors.begin(), colors.end()) + 1);
    std::vector<int> count(k, 0);
    for (std::size_t i = 0; i < colors.size(); ++i) count[static_cast<std::size_t>(colors[i])] += i < na_ ? 1 : -1;
    return std::all_of(count.begin(), count.end(), [](int c) { return c == 0; });
  }

  static std::vector<int> individualize(const std::vector<int>& colors, std::size_t x, std::size_t y) {
    std::vector<int> keyed(colors.size());
    for (std::size_t j = 0; j < colors.size(); ++j) {
      keyed[j] = 2 * colors[j] + ((colors[j] == colors[x] && j != x && j != y) ? 1 : 0);
    }
    return graph::dense_ranks(keyed);
  }

  bool leaf(const std::vector<int>& colors) {
    std::vector<std::size_t> b_of_color(colors.size(), 0);
    for (std::size_t j = na_; j < colors.size(); ++j) b_of_color[static_cast<std::size_t>(colors[j])] = j - na_;
    AtomMapping m;
    for (std::size_t i = 0; i < na_; ++i) {
      const std::size_t j = b_of_color[static_cast<std::size_t>(colors[i])];
      if (!graph::atoms_compatible(a_.atoms[i], b_.atoms[j], cmp_)) return false;
      m.emplace(a_.atoms[i].id, b_.atoms[j].id);
    }
    if (!graph::mapping_preserves_bonds(a_, b_, m, cmp_)) return false;
    if (cmp_.brackets && !graph::mapping_preserves_brackets(a_, b_, m)) return false;
    if (cmp_.stereo) {
      try {
        if (!graph::mapping_preserves_stereo(a_, b_, m)) return false;
      } catch (const ValidationError&) {
        return false;
      }
    }
    result_ = std::move(m);
    return true;
  }

  bool search(const std::vector<int>& colors) {
    if (!balanced(colors)) return false;
    // Smallest non-singleton cell; ties go to the lowest color.
    std::map<int, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < colors.size(); ++i) cells[colors[i]].push_back(i);
    const std::vector<std::size_t>* target = nullptr;
    for (const auto& [color, members] : cells) {
      if (members.size() > 2 && (!target || members.size() < target->size())) target = &members;
    }
    if (!target) return leaf(colors);
    const auto cell = *target;
    const std::size_t x = cell.front();  // a-side members precede b-side ones
    for (std::size_t y : cell) {
      if (y < na_) continue;
      if (!graph::atoms_compatible(a_.atoms[x], b_.atoms[y - na_], cmp_)) continue;
      if (search(graph::equitable_refinement(adjacency_, individualize(colors, x, y)))) return true;
    }
    return false;
  }

  const MolGraph& a_;
  const MolGraph& b_;
  AttributeComparison cmp_;
  std::size_t na_;
  graph::ColoredAdjacency adjacency_;
  std::vector<std::string> keys_;
  AtomMapping result_;
};

template <class Key>
std::vector<Key> sorted(std::vector<Key> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<std::string> label_multiset(const MolGraph& g) {
  std::vector<std::string> out;
  for (const auto& a : g.atoms) out.push_back(a.label.text());
  return sorted(std::move(out));
}

std::vector<int> bond_multiset(const MolGraph& g) {
  std::vector<int> out;
  for (const auto& b : g.bonds) out.push_back(static_cast<int>(b.type));
  return sorted(std::move(out));
}

std::string describe_labels(const std::vector<std::string>& labels) {
  std::map<std::string, int> counts;
  for (const auto& l : labels) ++counts[l];
  std::string s;
  for (const auto& [l, c] : counts) s += (s.empty() ? "" : " ") + l + "x" + std::to_string(c);
  return s.empty() ? "(none)" : s;
}

MatchOutcome unmatched(MismatchReason reason, std::string detail) {
  MatchOutcome out;
  out.reason = reason;
  out.detail = std::move(detail);
  return out;
}

// Runs the full comparison, then relaxes it step by step to name the first failing layer.
MatchOutcome compare(const MolGraph& pred, const MolGraph& gt, const AttributeComparison& full) {
  if (auto m = find_isomorphism(pred, gt, full)) {
    MatchOutcome out;
    out.matched = true;
    out.witness = std::move(*m);
    return out;
  }
  const auto pl = label_multiset(pred);
  const auto gl = label_multiset(gt);
  if (full.labels && pl != gl) {
    return unmatched(MismatchReason::atom_set_mismatch,
                     "prediction atoms " + describe_labels(pl) + "; ground truth atoms " + describe_labels(gl));
  }
  if (pred.bonds.size() != gt.bonds.size() || (full.bond_types && bond_multiset(pred) != bond_multiset(gt))) {
    return unmatched(MismatchReason::bond_mismatch, "bond counts by type differ (" + std::to_string(pred.bonds.size()) +
                                                        " predicted, " + std::to_string(gt.bonds.size()) + " expected)");
  }
  AttributeComparison step = full;
  step.charge = step.isotope = step.radical = step.valence = step.hydrogens = step.aromatic = false;
  step.brackets = step.stereo = false;
  if (!find_isomorphism(pred, gt, step)) {
    return unmatched(MismatchReason::no_isomorphism, "no bijection preserves labels and bonds");
  }
  step.charge = full.charge;
  step.isotope = full.isotope;
  step.radical = full.radical;
  step.valence = full.valence;
  step.hydrogens = full.hydrogens;
  step.aromatic = full.aromatic;
  if (!find_isomorphism(pred, gt, step)) {
    return unmatched(MismatchReason::attribute_mismatch, "atom attributes differ under every structural match");
  }
  step.brackets = full.brackets;
  if (!find_isomorphism(pred, gt, step)) {
    return unmatched(MismatchReason::bracket_mismatch, "brackets or marks differ under every structural match");
  }
  if (full.stereo) {
    return unmatched(MismatchReason::stereo_mismatch, "stereo configuration differs under every structural match");
  }
  return unmatched(MismatchReason::no_isomorphism, "no attributed isomorphism");
}

// Progress of a failed comparison through the diagnosis layers; larger got further.
int diagnosis_depth(MismatchReason r) {
  switch (r) {
    case MismatchReason::parse_failed: return 0;
    case MismatchReason::atom_set_mismatch: return 1;
    case MismatchReason::bond_mismatch: return 2;
    case MismatchReason::no_isomorphism: return 3;
    case MismatchReason::attribute_mismatch: return 4;
    case MismatchReason::bracket_mismatch: return 5;
    case MismatchReason::stereo_mismatch: return 6;
  }
  return 0;
}

// Greek placeholder family and index of a label, if any (0 = R group, 1 = GROUP).
std::optional<std::pair<int, int>> greek_name(const graph::AtomLabel& label) {
  if (const auto* r = label.get_if<graph::RGroupLabel>(); r && r->kind == graph::SuffixKind::greek) {
    return std::pair{0, r->value};
  }
  if (const auto* g = label.get_if<graph::GroupPlaceholderLabel>()) return std::pair{1, g->greek};
  return std::nullopt;
}

using NameCounts = std::map<std::pair<int, int>, int>;

NameCounts greek_counts(const MolGraph& g) {
  NameCounts out;
  for (const auto& a : g.atoms) {
    if (auto n = greek_name(a.label)) ++out[*n];
  }
  return out;
}

// Per-bucket candidates: predicted names and ground-truth names sharing family and count.
using Bucket = std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>;

constexpr std::size_t kMaxRenamings = 40320;

// Every renaming of predicted greek names onto ground-truth names that preserves family and
// occurrence count. Empty when the count profiles differ or the enumeration exceeds the cap.
std::vector<std::map<std::pair<int, int>, int>> greek_renamings(const MolGraph& pred, const MolGraph& gt) {
  std::map<std::pair<int, int>, Bucket> buckets;  // (family, count) -> names
  for (const auto& [name, count] : greek_counts(pred)) buckets[{name.first, count}].first.push_back(name);
  for (const auto& [name, count] : greek_counts(gt)) buckets[{name.first, count}].second.push_back(name);
  std::size_t total = 1;
  for (const auto& [key, b] : buckets) {
    if (b.first.size() != b.second.size()) return {};
    for (std::size_t k = 2; k <= b.first.size(); ++k) {
      total *= k;
      if (total > kMaxRenamings) return {};
    }
  }
  std::vector<std::map<std::pair<int, int>, int>> out{{}};
  for (auto& [key, b] : buckets) {
    auto targets = b.second;
    std::sort(targets.begin(), targets.end());
    std::vector<std::map<std::pair<int, int>, int>> next;
    do {
      for (const auto& partial : out) {
        auto m = partial;
        for (std::size_t i = 0; i < b.first.size(); ++i) m[b.first[i]] = targets[i].second;
        next.push_back(std::move(m));
      }
    } while (std::next_permutation(targets.begin(), targets.end()));
    out = std::move(next);
  }
  return out;
}

MolGraph rename_greek(const MolGraph& g, const std::map<std::pair<int, int>, int>& renaming) {
  MolGraph out = g;
  for (auto& a : out.atoms) {
    const auto n = greek_name(a.label);
    if (!n) continue;
    const int to = renaming.at(*n);
    a.label = n->first == 0 ? graph::AtomLabel::r_greek(to) : graph::AtomLabel::group(to);
  }
  return out;
}

// Match up to a consistent bijective renaming of greek placeholders within each family.
// Without any count-preserving renaming, both sides are normalized so the diagnosis reports
// the label difference.
MatchOutcome compare_alpha(const MolGraph& pred, const MolGraph& gt, const AttributeComparison& full) {
  const auto renamings = greek_renamings(pred, gt);
  if (renamings.empty()) {
    return compare(graph::normalize_placeholder_labels(pred), graph::normalize_placeholder_labels(gt), full);
  }
  std::vector<MolGraph> candidates;
  candidates.reserve(renamings.size());
  for (const auto& r : renamings) {
    candidates.push_back(rename_greek(pred, r));
    if (auto m = find_isomorphism(candidates.back(), gt, full)) {
      MatchOutcome out;
      out.matched = true;
      out.witness = std::move(*m);
      return out;
    }
  }
  MatchOutcome best = compare(candidates.front(), gt, full);
  for (std::size_t i = 1; i < candidates.size() && best.reason != MismatchReason::stereo_mismatch; ++i) {
    auto o = compare(candidates[i], gt, full);
    if (diagnosis_depth(*o.reason) > diagnosis_depth(*best.reason)) best = std::move(o);
  }
  return best;
}

MolGraph fold_explicit_hydrogens(const MolGraph& g) {
  const graph::Topology topo(g);
  std::vector<bool> drop(g.atoms.size(), false);
  MolGraph out = g;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const auto& h = g.atoms[i];
    if (!h.label.is_element("H") || h.isotope || !h.effective_charge().is_zero() || h.radical || h.stereo) continue;
    if (topo.degree(i) != 1) continue;
    const auto nb = topo.neighbors(i).front();
    if (g.bonds[nb.bond].type != graph::BondType::single || g.atoms[nb.atom].label.is_element("H")) continue;
    drop[i] = true;
    auto& heavy = out.atoms[nb.atom];
    heavy.hydrogens = heavy.hydrogens.value_or(0) + 1;
    if (heavy.stereo) {
      for (int& id : heavy.stereo->neighbors) {
        if (id == h.id) id = graph::kImplicitHydrogen;
      }
    }
  }
  MolGraph kept;
  std::vector<int> dropped_ids;
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    if (drop[i]) {
      dropped_ids.push_back(out.atoms[i].id);
    } else {
      kept.atoms.push_back(std::move(out.atoms[i]));
    }
  }
  std::sort(dropped_ids.begin(), dropped_ids.end());
  for (auto& b : out.bonds) {
    if (!std::binary_search(dropped_ids.begin(), dropped_ids.end(), b.atom1) &&
        !std::binary_search(dropped_ids.begin(), dropped_ids.end(), b.atom2)) {
      kept.bonds.push_back(b);
    }
  }
  // Two folded hydrogens on one center leave a duplicate implicit-H entry; such a center is
  // not a stereocenter.
  for (auto& a : kept.atoms) {
    if (a.stereo && std::count(a.stereo->neighbors.begin(), a.stereo->neighbors.end(), graph::kImplicitHydrogen) > 1) {
      a.stereo.reset();
    }
  }
  kept.brackets = std::move(out.brackets);
  kept.groups = std::move(out.groups);
  return kept;
}

}  // namespace

MatchConfig MatchConfig::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("match configuration is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("match configuration must be a JSON object");
  MatchConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    auto flag = [&](bool& target) {
      if (!value.is_boolean()) throw ConfigError("match." + key + " must be a boolean");
      target = value.get<bool>();
    };
    if (key == "compare_stereo") {
      flag(cfg.compare_stereo);
    } else if (key == "aromatic_normalize_smiles") {
      flag(cfg.aromatic_normalize_smiles);
    } else if (key == "placeholder_alpha_equivalence") {
      flag(cfg.placeholder_alpha_equivalence);
    } else if (key == "bond_simplification") {
      if (!value.is_object()) throw ConfigError("match.bond_simplification must be an object");
      cfg.simplification = graph::BondMapping::from_json(value.dump());
    } else {
      throw ConfigError("unknown match configuration key '" + key + "'");
    }
  }
  return cfg;
}

std::string_view mismatch_reason_name(MismatchReason r) {
  switch (r) {
    case MismatchReason::parse_failed: return "parse-failed";
    case MismatchReason::atom_set_mismatch: return "atom-set-mismatch";
    case MismatchReason::bond_mismatch: return "bond-mismatch";
    case MismatchReason::attribute_mismatch: return "attribute-mismatch";
    case MismatchReason::bracket_mismatch: return "bracket-mismatch";
    case MismatchReason::stereo_mismatch: return "stereo-mismatch";
    case MismatchReason::no_isomorphism: return "no-isomorphism";
  }
  return "?";
}

std::optional<MismatchReason> parse_mismatch_reason(std::string_view name) {
  for (int r = 0; r <= static_cast<int>(MismatchReason::no_isomorphism); ++r) {
    if (mismatch_reason_name(static_cast<MismatchReason>(r)) == name) return static_cast<MismatchReason>(r);
  }
  return std::nullopt;
}

std::optional<AtomMapping> find_isomorphism(const MolGraph& a, const MolGraph& b, const AttributeComparison& cmp) {
  graph::require_valid(a, "find_isomorphism");
  graph::require_valid(b, "find_isomorphism");
  return IsomorphismSearch(a, b, cmp).run();
}

MatchOutcome graph_exact_match(const MolGraph& pred, const MolGraph& gt, const MatchConfig& cfg) {
  graph::require_valid(pred, "graph_exact_match");
  graph::require_valid(gt, "graph_exact_match");
  if (cfg.placeholder_alpha_equivalence) {
    return compare_alpha(pred, gt, AttributeComparison::graph_protocol());
  }
  return compare(pred, gt, AttributeComparison::graph_protocol());
}

MatchOutcome simplified_graph_match(const MolGraph& pred, const MolGraph& gt, const MatchConfig& cfg) {
  graph::require_valid(pred, "simplified_graph_match");
  graph::require_valid(gt, "simplified_graph_match");
  return graph_exact_match(graph::project_simplified(pred, cfg.simplification),
                           graph::project_simplified(gt, cfg.simplification), cfg);
}

MolGraph prepare_smiles_graph(const MolGraph& parsed, const MatchConfig& cfg) {
  MolGraph g = fold_explicit_hydrogens(graph::fold_deuterium(parsed));
  graph::drop_invalid_stereocenters(g);
  if (cfg.aromatic_normalize_smiles) g = aromatic_normalize(g);
  return g;
}

MatchOutcome smiles_match(std::string_view pred, std::string_view gt, const MatchConfig& cfg) {
  MolGraph p, q;
  try {
    p = chem::parse_smiles(pred);
  } catch (const Error& e) {
    return unmatched(MismatchReason::parse_failed, std::string("prediction: ") + e.what());
  }
  try {
    q = chem::parse_smiles(gt);
  } catch (const Error& e) {
    return unmatched(MismatchReason::parse_failed, std::string("ground truth: ") + e.what());
  }
  const auto cmp = AttributeComparison::smiles_protocol(cfg.compare_stereo);
  if (cfg.placeholder_alpha_equivalence) return compare_alpha(prepare_smiles_graph(p, cfg), prepare_smiles_graph(q, cfg), cmp);
  return compare(prepare_smiles_graph(p, cfg), prepare_smiles_graph(q, cfg), cmp);
}

}  // namespace ocsrbench::match

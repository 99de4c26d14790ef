#include "ocsrbench/graph/validate.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/elements.hpp"

namespace ocsrbench::graph {
namespace {

std::string at(std::string_view section, std::size_t index) {
  return std::string(section) + "[" + std::to_string(index) + "]";
}

class Collector {
 public:
  void error(std::string code, std::string message, std::string location) {
    report_.ok = false;
    report_.issues.push_back({Severity::error, std::move(code), std::move(message), std::move(location)});
  }
  void warning(std::string code, std::string message, std::string location) {
    report_.issues.push_back({Severity::warning, std::move(code), std::move(message), std::move(location)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

void check_label(const AtomLabel& label, const std::string& where, Collector& out) {
  if (const auto* e = label.get_if<ElementLabel>()) {
    if (!is_element_symbol(e->symbol)) {
      out.error("invalid-label", "unknown element symbol '" + e->symbol + "'", where);
    }
  } else if (const auto* s = label.get_if<SuperatomLabel>()) {
    const bool blank = s->text.empty();
    const bool spaced = std::any_of(s->text.begin(), s->text.end(),
                                    [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank || spaced) {
      out.error("invalid-label", "superatom text must be non-empty without whitespace", where);
    } else if (!AtomLabel::parse(s->text).is<SuperatomLabel>()) {
      out.warning("ambiguous-superatom",
                  "superatom text '" + s->text + "' reads back as a different label kind", where);
    }
  } else if (const auto* r = label.get_if<RGroupLabel>()) {
    if ((r->kind == SuffixKind::numeric && r->value < 1) ||
        (r->kind == SuffixKind::greek && r->value < 0)) {
      out.error("invalid-label", "invalid R-group suffix", where);
    }
  } else if (const auto* g = label.get_if<GroupPlaceholderLabel>()) {
    if (g->greek < 0) out.error("invalid-label", "invalid GROUP suffix", where);
  }
}

}  // namespace

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.code == code; });
}

std::vector<ValidationIssue> ValidationReport::errors() const {
  std::vector<ValidationIssue> out;
  std::copy_if(issues.begin(), issues.end(), std::back_inserter(out),
               [](const auto& i) { return i.severity == Severity::error; });
  return out;
}

ValidationReport validate_graph(const MolGraph& g) {
  Collector out;
  std::unordered_set<int> ids;

  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& atom = g.atoms[i];
    const std::string where = at("atoms", i);
    if (atom.id < 0) out.error("negative-atom-id", "atom id must be non-negative", where + ".id");
    if (!ids.insert(atom.id).second) {
      out.error("duplicate-atom-id", "duplicate atom id " + std::to_string(atom.id), where + ".id");
    }
    check_label(atom.label, where + ".atom", out);
    if (atom.isotope && *atom.isotope < 1) {
      out.error("invalid-isotope", "isotope mass number must be >= 1", where + ".isotope");
    }
    if (atom.valence && *atom.valence < 1) {
      out.error("invalid-valence", "valence must be a positive integer", where + ".valence");
    }
    if (atom.hydrogens && *atom.hydrogens < 0) {
      out.error("invalid-hydrogens", "hydrogen count must be non-negative", where + ".hydrogens");
    }
  }

  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& atom = g.atoms[i];
    if (!atom.stereo) continue;
    for (int n : atom.stereo->neighbors) {
      if (n != kImplicitHydrogen && !ids.contains(n)) {
        out.error("stereo-unknown-atom", "stereo neighbor references unknown atom id " + std::to_string(n),
                  at("atoms", i) + ".stereo");
      }
    }
  }

  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    const Bond& b = g.bonds[i];
    const std::string where = at("bonds", i);
    if (b.atom1 == b.atom2) {
      out.error("bond-self-loop", "bond joins atom " + std::to_string(b.atom1) + " to itself", where);
      continue;
    }
    bool known = true;
    for (int id : {b.atom1, b.atom2}) {
      if (!ids.contains(id)) {
        out.error("bond-unknown-atom", "bond references unknown atom id " + std::to_string(id), where);
        known = false;
      }
    }
    if (!known) continue;
    const auto key = std::minmax(b.atom1, b.atom2);
    if (!pairs.insert(key).second) {
      out.error("duplicate-bond",
                "duplicate bond for atom pair " + std::to_string(key.first) + "-" + std::to_string(key.second),
                where);
    }
  }

  std::vector<std::set<int>> bracket_sets;
  for (std::size_t i = 0; i < g.brackets.size(); ++i) {
    const Bracket& br = g.brackets[i];
    const std::string where = at("brackets", i);
    if (br.atoms.empty()) out.error("bracket-empty", "bracket encloses no atoms", where + ".atoms");
    bool known = true;
    for (std::size_t k = 0; k < br.atoms.size(); ++k) {
      if (!ids.contains(br.atoms[k])) {
        out.error("bracket-unknown-atom",
                  "bracket references unknown atom id " + std::to_string(br.atoms[k]),
                  where + ".atoms[" + std::to_string(k) + "]");
        known = false;
      }
    }
    bracket_sets.emplace_back(br.atoms.begin(), br.atoms.end());
    if (!known) continue;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = bracket_sets[j];
      const auto& b = bracket_sets[i];
      std::vector<int> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      if (common.empty()) continue;
      if (a == b) {
        out.warning("duplicate-bracket", "bracket repeats the atom set of " + at("brackets", j), where);
      } else if (common.size() != a.size() && common.size() != b.size()) {
        out.error("bracket-partial-overlap", "bracket partially overlaps " + at("brackets", j), where);
      }
    }
  }

  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    const AtomGroup& grp = g.groups[i];
    const std::string where = at("groups", i);
    if (grp.atoms.empty()) out.error("group-empty", "atom group encloses no atoms", where + ".atoms");
    for (int id : grp.atoms) {
      if (!ids.contains(id)) {
        out.error("group-unknown-atom", "atom group references unknown atom id " + std::to_string(id),
                  where + ".atoms");
      }
    }
  }

  return out.take();
}

void require_valid(const MolGraph& g, std::string_view operation) {
  const auto report = validate_graph(g);
  if (report.ok) return;
  const auto first = report.errors().front();
  throw ContractViolation(std::string(operation) + ": invalid graph: " + first.message + " (" +
                          first.code + " at " + first.location + ")");
}

}  // namespace ocsrbench::graph

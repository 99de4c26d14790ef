#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"
#include "ocsrbench/graph/elements.hpp"
#include "ocsrbench/graph/topology.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::chem {
namespace {

using graph::Atom;
using graph::Bond;
using graph::BondMarker;
using graph::BondType;
using graph::kImplicitHydrogen;
using graph::MolGraph;
using graph::Topology;

[[noreturn]] void refuse(const std::string& feature) { throw RefusalError("not SMILES-expressible: " + feature); }

bool is_organic(std::string_view symbol, bool aromatic) {
  static const std::set<std::string_view> plain = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  static const std::set<std::string_view> aro = {"B", "C", "N", "O", "P", "S"};
  return aromatic ? aro.count(symbol) > 0 : plain.count(symbol) > 0;
}

int bond_order(BondType t) { return t == BondType::double_ ? 2 : t == BondType::triple ? 3 : 1; }

void check_expressible(const MolGraph& g, const Topology& topo) {
  if (!g.brackets.empty()) refuse("brackets");
  if (!g.groups.empty()) refuse("atom groups");
  for (const Bond& b : g.bonds) {
    if (b.type != BondType::single && b.type != BondType::double_ && b.type != BondType::triple &&
        b.type != BondType::aromatic) {
      refuse(std::string(graph::bond_type_name(b.type)));
    }
    if (b.marker != BondMarker::none && b.type != BondType::single) {
      refuse("direction marker on " + std::string(graph::bond_type_name(b.type)) + " bond");
    }
  }
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& a = g.atoms[i];
    if (a.radical) refuse("radical");
    if (a.valence) refuse("explicit valence");
    if (a.charge && !a.charge->is_integer()) refuse("fractional charge");
    if (a.label.is<graph::RGroupLabel>()) refuse("R-group label " + a.label.text());
    if (a.label.is<graph::GroupPlaceholderLabel>()) refuse("GROUP placeholder " + a.label.text());
    if (a.label.is<graph::WildcardLabel>()) refuse("wildcard atom");
    const bool attributes = !a.effective_charge().is_zero() || a.isotope || a.hydrogens.value_or(0) != 0 || a.stereo;
    if (const auto* sup = a.label.get_if<graph::SuperatomLabel>()) {
      // Must read back through the bracket grammar as the same superatom.
      bool round_trips = false;
      if (sup->text.find_first_of("[]") == std::string::npos) {
        try {
          round_trips = parse_smiles("[" + sup->text + "]").atoms.front().label == a.label;
        } catch (const ParseError&) {
        }
      }
      if (!round_trips) refuse("superatom text " + sup->text);
      if (attributes || a.aromatic) refuse("attributes on superatom " + sup->text);
    }
    if (a.label.is<graph::DeuteriumLabel>() && (attributes || a.aromatic)) refuse("attributes on deuterium");
    if (const auto* el = a.label.get_if<graph::ElementLabel>()) {
      if (a.aromatic && !graph::is_smiles_aromatic_symbol(el->symbol)) refuse("aromatic " + el->symbol);
    }
    if (a.stereo) {
      std::multiset<int> want;
      for (const auto& nb : topo.neighbors(i)) want.insert(g.atoms[nb.atom].id);
      if (a.hydrogens.value_or(0) > 0) want.insert(kImplicitHydrogen);
      const std::multiset<int> have(a.stereo->neighbors.begin(), a.stereo->neighbors.end());
      if (want != have) refuse("stereo neighbor list of atom " + std::to_string(a.id));
    }
  }
}

// Only what the SMILES text carries may influence the traversal order.
MolGraph written_content(const MolGraph& g) {
  MolGraph out = g;
  for (Atom& a : out.atoms) {
    a.point_2d.reset();
    if (a.charge && a.charge->is_zero()) a.charge.reset();
    a.hydrogens = a.hydrogens.value_or(0);
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const MolGraph& g) : g_(g), topo_(g), rank_(g.atoms.size()) {
    check_expressible(g_, topo_);
    const auto ranking = graph::canonical_ranking(written_content(g_));
    for (std::size_t i = 0; i < g_.atoms.size(); ++i) rank_[i] = ranking.at(g_.atoms[i].id);
    order_sum_.assign(g_.atoms.size(), 0);
    for (std::size_t b = 0; b < g_.bonds.size(); ++b) {
      order_sum_[topo_.bond_atom1(b)] += bond_order(g_.bonds[b].type);
      order_sum_[topo_.bond_atom2(b)] += bond_order(g_.bonds[b].type);
    }
  }

  std::string run() {
    const std::size_t n = g_.atoms.size();
    std::vector<std::size_t> by_rank(n);
    for (std::size_t i = 0; i < n; ++i) by_rank[static_cast<std::size_t>(rank_[i])] = i;
    visited_.assign(n, false);
    children_.assign(n, {});
    opens_.assign(n, {});
    closes_.assign(n, {});
    edge_done_.assign(g_.bonds.size(), false);
    parent_bond_.assign(n, kNone);

    std::string out;
    for (std::size_t root : by_rank) {
      if (visited_[root]) continue;
      discover(root);
      if (!out.empty()) out += '.';
      write(root, out);
    }
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<graph::Neighbor> sorted_neighbors(std::size_t v) const {
    auto nbs = std::vector<graph::Neighbor>(topo_.neighbors(v).begin(), topo_.neighbors(v).end());
    std::sort(nbs.begin(), nbs.end(), [&](const auto& a, const auto& b) { return rank_[a.atom] < rank_[b.atom]; });
    return nbs;
  }

  // Spanning forest in rank order; non-tree edges become ring closures opened at the
  // earlier-visited end.
  void discover(std::size_t v) {
    visited_[v] = true;
    for (const auto& nb : sorted_neighbors(v)) {
      if (edge_done_[nb.bond]) continue;
      edge_done_[nb.bond] = true;
      if (visited_[nb.atom]) {
        opens_[nb.atom].push_back({v, nb.bond});
        closes_[v].push_back({nb.atom, nb.bond});
      } else {
        parent_bond_[nb.atom] = nb.bond;
        children_[v].push_back(nb.atom);
        discover(nb.atom);
      }
    }
  }

  std::string bond_symbol(std::size_t bond, std::size_t from) const {
    const Bond& b = g_.bonds[bond];
    const bool both_aromatic =
        g_.atoms[topo_.bond_atom1(bond)].aromatic && g_.atoms[topo_.bond_atom2(bond)].aromatic;
    switch (b.type) {
      case BondType::double_: return "=";
      case BondType::triple: return "#";
      case BondType::aromatic: return both_aromatic ? "" : ":";
      default: break;
    }
    if (b.marker != BondMarker::none) {
      const BondMarker m = topo_.bond_atom1(bond) == from ? b.marker : graph::flip(b.marker);
      return m == BondMarker::up ? "/" : "\\";
    }
    return both_aromatic ? "-" : "";
  }

  std::string atom_text(std::size_t v, const std::vector<int>& out_order) const {
    const Atom& a = g_.atoms[v];
    if (a.label.is<graph::DeuteriumLabel>()) return "[D]";
    if (const auto* sup = a.label.get_if<graph::SuperatomLabel>()) return "[" + sup->text + "]";
    const std::string& symbol = a.label.get_if<graph::ElementLabel>()->symbol;
    std::string sym = symbol;
    if (a.aromatic) sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
    const int h = a.hydrogens.value_or(0);
    const auto charge = a.effective_charge().numerator();
    if (is_organic(symbol, a.aromatic) && !a.isotope && charge == 0 && !a.stereo &&
        h == graph::organic_implicit_hydrogens(symbol, order_sum_[v], a.aromatic)) {
      return sym;
    }
    std::string s = "[";
    if (a.isotope) s += std::to_string(*a.isotope);
    s += sym;
    if (a.stereo) {
      std::vector<int> stored = a.stereo->neighbors;
      const int parity = graph::permutation_sign(stored) * graph::permutation_sign(out_order);
      const bool anticlockwise = (a.stereo->tag == graph::Chirality::anticlockwise) == (parity > 0);
      s += anticlockwise ? "@" : "@@";
    }
    if (h > 0) s += h == 1 ? "H" : "H" + std::to_string(h);
    if (charge != 0) {
      s += charge > 0 ? "+" : "-";
      if (std::abs(charge) != 1) s += std::to_string(std::abs(charge));
    }
    return s + "]";
  }

  static std::string ring_label(int digit) {
    return digit < 10 ? std::to_string(digit) : "%" + std::to_string(digit);
  }

  void write(std::size_t v, std::string& out) {
    const Atom& a = g_.atoms[v];
    std::vector<int> out_order;
    if (parent_bond_[v] != kNone) {
      const std::size_t b = parent_bond_[v];
      const std::size_t parent = topo_.bond_atom1(b) == v ? topo_.bond_atom2(b) : topo_.bond_atom1(b);
      out += bond_symbol(b, parent);
      out_order.push_back(g_.atoms[parent].id);
    }
    if (a.stereo && a.hydrogens.value_or(0) > 0) out_order.push_back(kImplicitHydrogen);

    // Closings first (their digits already exist), then openings in partner rank order.
    std::string rings;
    std::vector<int> freed;
    auto by_partner = [&](auto& list) {
      std::sort(list.begin(), list.end(), [&](const auto& x, const auto& y) { return rank_[x.first] < rank_[y.first]; });
    };
    by_partner(closes_[v]);
    by_partner(opens_[v]);
    for (const auto& [partner, bond] : closes_[v]) {
      const int digit = digit_of_.at(bond);
      rings += ring_label(digit);
      freed.push_back(digit);
      out_order.push_back(g_.atoms[partner].id);
    }
    for (const auto& [partner, bond] : opens_[v]) {
      int digit = 1;
      while (in_use_.count(digit)) ++digit;
      if (digit > 99) refuse("more than 99 simultaneous ring closures");
      in_use_.insert(digit);
      digit_of_[bond] = digit;
      rings += bond_symbol(bond, v) + ring_label(digit);
      out_order.push_back(g_.atoms[partner].id);
    }
    for (int d : freed) in_use_.erase(d);
    for (std::size_t c : children_[v]) out_order.push_back(g_.atoms[c].id);

    out += atom_text(v, out_order);
    out += rings;
    const auto& kids = children_[v];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (k + 1 < kids.size()) {
        out += '(';
        write(kids[k], out);
        out += ')';
      } else {
        write(kids[k], out);
      }
    }
  }

  const MolGraph& g_;
  Topology topo_;
  std::vector<int> rank_;
  std::vector<int> order_sum_;
  std::vector<bool> visited_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> opens_, closes_;
  std::vector<bool> edge_done_;
  std::vector<std::size_t> parent_bond_;
  std::map<std::size_t, int> digit_of_;
  std::set<int> in_use_;
};

}  // namespace

std::string emit_canonical_smiles(const MolGraph& g) {
  graph::require_valid(g, "emit_canonical_smiles");
  if (g.atoms.empty()) return "";
  return Writer(g).run();
}

}  // namespace ocsrbench::chem

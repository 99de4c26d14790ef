#include "ocsrbench/graph/canonical.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <numeric>
#include <string>

#include "ocsrbench/graph/topology.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::graph {
namespace {

std::string exact_text(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

using Form = std::vector<std::int64_t>;

int edge_code(const Bond& bond, bool from_atom1) {
  const int type = static_cast<int>(bond.type);
  if (!is_directional(bond.type)) return type * 3;
  return type * 3 + (from_atom1 ? 1 : 2);
}

std::string masked_label(const AtomLabel& label, bool alpha) {
  if (alpha && label.is_greek_placeholder()) return label.is<RGroupLabel>() ? "R~" : "GROUP~";
  return label.text();
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

class Canonicalizer {
 public:
  Canonicalizer(const MolGraph& g, RankingOptions options)
      : g_(g), topo_(g), options_(options), adjacency_(g.atoms.size()) {
    const std::size_t n = g.atoms.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (const Neighbor& nb : topo_.neighbors(i)) {
        const Bond& bond = g.bonds[nb.bond];
        adjacency_[i].emplace_back(nb.atom, edge_code(bond, topo_.bond_atom1(nb.bond) == i));
      }
    }
    seed_colors();

    std::vector<std::string> marks;
    for (const Bracket& br : g.brackets) marks.push_back(collapse_whitespace(br.mark));
    mark_class_ = dense_ranks(marks);
    std::vector<Charge> charges;
    for (const AtomGroup& grp : g.groups) charges.push_back(grp.charge);
    group_charge_class_ = dense_ranks(charges);
  }

  std::vector<std::size_t> run() {
    if (g_.atoms.empty()) return {};
    auto colors = equitable_refinement(adjacency_, initial_);
    std::vector<std::size_t> path;
    search(colors, path);
    return best_order_;
  }

 private:
  void seed_colors() {
    const std::size_t n = g_.atoms.size();
    std::vector<std::vector<std::string>> memberships(n);
    for (const Bracket& br : g_.brackets) {
      for (int id : br.atoms) {
        memberships[topo_.index_of(id)].push_back("b" + std::to_string(br.atoms.size()) + ":" +
                                                  collapse_whitespace(br.mark));
      }
    }
    for (const AtomGroup& grp : g_.groups) {
      for (int id : grp.atoms) {
        memberships[topo_.index_of(id)].push_back("g" + std::to_string(grp.atoms.size()) + ":" +
                                                  grp.charge.to_string());
      }
    }

    std::vector<std::string> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& a = g_.atoms[i];
      std::string key = masked_label(a.label, options_.alpha_placeholders);
      key += "|c" + (a.charge ? a.charge->to_string() : std::string("-"));
      key += "|i" + (a.isotope ? std::to_string(*a.isotope) : std::string("-"));
      key += "|v" + (a.valence ? std::to_string(*a.valence) : std::string("-"));
      key += "|r" + (a.radical ? std::to_string(static_cast<int>(*a.radical)) : std::string("-"));
      key += "|h" + (a.hydrogens ? std::to_string(*a.hydrogens) : std::string("-"));
      key += a.aromatic ? "|a" : "|-";
      key += a.stereo ? "|s" : "|-";
      if (options_.coordinates && a.point_2d) key += "|p" + exact_text(a.point_2d->x) + "," + exact_text(a.point_2d->y);
      key += "|d" + std::to_string(topo_.degree(i));
      std::vector<int> codes;
      for (const auto& [nb, code] : adjacency_[i]) codes.push_back(code);
      std::sort(codes.begin(), codes.end());
      for (int c : codes) key += "," + std::to_string(c);
      std::sort(memberships[i].begin(), memberships[i].end());
      for (const auto& m : memberships[i]) key += "|" + m;
      keys[i] = std::move(key);
    }
    initial_ = dense_ranks(keys);
  }

  static std::vector<int> individualize(const std::vector<int>& colors, std::size_t v) {
    std::vector<int> keyed(colors.size());
    for (std::size_t j = 0; j < colors.size(); ++j) {
      keyed[j] = 2 * colors[j] + ((colors[j] == colors[v] && j != v) ? 1 : 0);
    }
    return dense_ranks(keyed);
  }

  Form leaf_form(const std::vector<int>& colors, std::vector<std::size_t>& order) const {
    const std::size_t n = colors.size();
    order.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) order[static_cast<std::size_t>(colors[i])] = i;

    Form form;
    form.reserve(4 * n + 4 * g_.bonds.size());
    std::array<std::vector<int>, 2> family_map;  // greek index -> first-occurrence slot
    for (std::size_t r = 0; r < n; ++r) {
      const Atom& a = g_.atoms[order[r]];
      form.push_back(initial_[order[r]]);
      std::int64_t alpha = -1;
      if (options_.alpha_placeholders && a.label.is_greek_placeholder()) {
        const bool is_r = a.label.is<RGroupLabel>();
        const int greek = is_r ? a.label.get_if<RGroupLabel>()->value
                               : a.label.get_if<GroupPlaceholderLabel>()->greek;
        auto& fam = family_map[is_r ? 0 : 1];
        auto it = std::find(fam.begin(), fam.end(), greek);
        if (it == fam.end()) {
          fam.push_back(greek);
          it = fam.end() - 1;
        }
        alpha = it - fam.begin();
      }
      form.push_back(alpha);
    }

    std::vector<std::array<std::int64_t, 4>> edges;
    edges.reserve(g_.bonds.size());
    for (std::size_t b = 0; b < g_.bonds.size(); ++b) {
      const Bond& bond = g_.bonds[b];
      const auto r1 = colors[topo_.bond_atom1(b)];
      const auto r2 = colors[topo_.bond_atom2(b)];
      const bool forward = r1 < r2;
      const BondMarker marker = forward ? bond.marker : flip(bond.marker);
      edges.push_back({std::min(r1, r2), std::max(r1, r2), edge_code(bond, forward),
                       static_cast<std::int64_t>(marker)});
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) form.insert(form.end(), e.begin(), e.end());

    auto push_sets = [&](const auto& items, const std::vector<int>& classes) {
      std::vector<std::pair<int, std::vector<int>>> sets;
      for (std::size_t k = 0; k < items.size(); ++k) {
        std::vector<int> ranks;
        for (int id : items[k].atoms) ranks.push_back(colors[topo_.index_of(id)]);
        std::sort(ranks.begin(), ranks.end());
        sets.emplace_back(classes[k], std::move(ranks));
      }
      std::sort(sets.begin(), sets.end());
      for (const auto& [cls, ranks] : sets) {
        form.push_back(cls);
        form.push_back(static_cast<std::int64_t>(ranks.size()));
        form.insert(form.end(), ranks.begin(), ranks.end());
      }
    };
    push_sets(g_.brackets, mark_class_);
    push_sets(g_.groups, group_charge_class_);

    for (std::size_t r = 0; r < n; ++r) {
      const Atom& a = g_.atoms[order[r]];
      if (!a.stereo) continue;
      std::vector<int> ranks;
      for (int id : a.stereo->neighbors) {
        ranks.push_back(id == kImplicitHydrogen ? -1 : colors[topo_.index_of(id)]);
      }
      std::sort(ranks.begin(), ranks.end());
      const bool distinct = std::adjacent_find(ranks.begin(), ranks.end()) == ranks.end();
      std::vector<int> raw;
      for (int id : a.stereo->neighbors) {
        raw.push_back(id == kImplicitHydrogen ? -1 : colors[topo_.index_of(id)]);
      }
      const int tag = a.stereo->tag == Chirality::anticlockwise ? 1 : -1;
      form.push_back(static_cast<std::int64_t>(r));
      form.push_back(distinct ? tag * permutation_sign(raw) : 0);
    }
    return form;
  }

  void search(const std::vector<int>& colors, std::vector<std::size_t>& path) {
    const std::size_t n = colors.size();
    std::vector<int> cell_size(n, 0);
    for (int c : colors) ++cell_size[static_cast<std::size_t>(c)];
    int target = -1;
    for (std::size_t c = 0; c < n; ++c) {
      if (cell_size[c] > 1) {
        target = static_cast<int>(c);
        break;
      }
    }

    if (target < 0) {
      std::vector<std::size_t> order;
      Form form = leaf_form(colors, order);
      if (best_order_.empty() || form < best_form_) {
        best_form_ = std::move(form);
        best_order_ = std::move(order);
      } else if (form == best_form_) {
        // Same labeled graph from a different leaf: the two labelings differ by an automorphism.
        std::vector<std::size_t> gamma(n);
        for (std::size_t r = 0; r < n; ++r) gamma[order[r]] = best_order_[r];
        automorphisms_.push_back(std::move(gamma));
      }
      return;
    }

    std::vector<std::size_t> tried;
    for (std::size_t v = 0; v < n; ++v) {
      if (colors[v] != target) continue;
      if (!tried.empty() && equivalent_to_tried(v, tried, path)) continue;
      tried.push_back(v);
      path.push_back(v);
      search(equitable_refinement(adjacency_, individualize(colors, v)), path);
      path.pop_back();
    }
  }

  bool equivalent_to_tried(std::size_t v, const std::vector<std::size_t>& tried,
                           const std::vector<std::size_t>& path) const {
    UnionFind orbits(g_.atoms.size());
    bool any = false;
    for (const auto& gamma : automorphisms_) {
      const bool fixes_path =
          std::all_of(path.begin(), path.end(), [&](std::size_t p) { return gamma[p] == p; });
      if (!fixes_path) continue;
      any = true;
      for (std::size_t i = 0; i < gamma.size(); ++i) orbits.unite(i, gamma[i]);
    }
    if (!any) return false;
    return std::any_of(tried.begin(), tried.end(),
                       [&](std::size_t u) { return orbits.find(u) == orbits.find(v); });
  }

  const MolGraph& g_;
  Topology topo_;
  RankingOptions options_;
  ColoredAdjacency adjacency_;
  std::vector<int> initial_;
  std::vector<int> mark_class_;
  std::vector<int> group_charge_class_;

  Form best_form_;
  std::vector<std::size_t> best_order_;
  std::vector<std::vector<std::size_t>> automorphisms_;
};

}  // namespace

std::vector<int> equitable_refinement(const ColoredAdjacency& adjacency, std::vector<int> colors) {
  const std::size_t n = colors.size();
  std::size_t classes = 0;
  {
    std::vector<int> sorted = colors;
    std::sort(sorted.begin(), sorted.end());
    classes = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }
  while (true) {
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> signatures(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& sig = signatures[i];
      sig.first = colors[i];
      for (const auto& [nb, code] : adjacency[i]) sig.second.emplace_back(colors[nb], code);
      std::sort(sig.second.begin(), sig.second.end());
    }
    auto next = dense_ranks(signatures);
    const auto next_classes =
        n == 0 ? 0 : static_cast<std::size_t>(*std::max_element(next.begin(), next.end()) + 1);
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

int permutation_sign(std::span<const int> values) {
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (values[i] > values[j]) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

std::vector<std::size_t> canonical_order(const MolGraph& g, RankingOptions options) {
  require_valid(g, "canonical_ranking");
  return Canonicalizer(g, options).run();
}

std::map<int, int> canonical_ranking(const MolGraph& g, RankingOptions options) {
  const auto order = canonical_order(g, options);
  std::map<int, int> ranks;
  for (std::size_t r = 0; r < order.size(); ++r) ranks.emplace(g.atoms[order[r]].id, static_cast<int>(r));
  return ranks;
}

}  // namespace ocsrbench::graph

#include "ocsrbench/graph/mol_graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <numeric>
#include <unordered_map>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/elements.hpp"

namespace ocsrbench::graph {
namespace {

constexpr std::array<std::string_view, 24> kGreek = {
    "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ",
    "ν", "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ", "χ", "ψ", "ω",
};

std::optional<int> parse_positive_int(std::string_view digits) {
  if (digits.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value < 1) return std::nullopt;
  return value;
}

// Greek letter plus optional numeric wrap count.
std::optional<int> parse_greek_suffix(std::string_view text) {
  for (std::size_t i = 0; i < kGreek.size(); ++i) {
    if (text.substr(0, kGreek[i].size()) != kGreek[i]) continue;
    const auto tail = text.substr(kGreek[i].size());
    if (tail.empty()) return static_cast<int>(i);
    if (const auto wrap = parse_positive_int(tail)) {
      return static_cast<int>(i) + static_cast<int>(kGreek.size()) * *wrap;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct BondName {
  BondType type;
  std::string_view name;
};

constexpr std::array<BondName, kBondTypeCount> kBondNames = {{
    {BondType::single, "single"},
    {BondType::double_, "double"},
    {BondType::triple, "triple"},
    {BondType::aromatic, "aromatic"},
    {BondType::solid_wedge, "solid wedge"},
    {BondType::dashed_wedge, "dashed wedge"},
    {BondType::hollow_wedge, "hollow wedge"},
    {BondType::wavy, "wavy"},
    {BondType::any, "any"},
    {BondType::bold, "bold"},
    {BondType::dashed_bold, "dashed bold"},
    {BondType::dashed_double, "dashed double"},
    {BondType::dashed_triple, "dashed triple"},
    {BondType::single_or_double, "single or double"},
    {BondType::bold_double, "bold double"},
    {BondType::double_either, "double either"},
    {BondType::single_or_aromatic, "single or aromatic"},
    {BondType::double_or_aromatic, "double or aromatic"},
    {BondType::dative, "dative"},
    {BondType::dashed_dative, "dashed dative"},
    {BondType::hydrogen, "hydrogen"},
    {BondType::attachment_point, "attachment point"},
    {BondType::triple_with_single_dash, "triple with single dash"},
}};

constexpr std::array<BondType, kBondTypeCount> kAllBondTypes = [] {
  std::array<BondType, kBondTypeCount> out{};
  for (std::size_t i = 0; i < kBondNames.size(); ++i) out[i] = kBondNames[i].type;
  return out;
}();

std::vector<int> remap_sorted(const std::vector<int>& ids,
                              const std::unordered_map<int, int>& id_map) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) {
    const auto it = id_map.find(id);
    out.push_back(it == id_map.end() ? id : it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

// --- labels ----------------------------------------------------------------

std::span<const std::string_view> greek_alphabet() { return kGreek; }

std::string greek_suffix_text(int index) {
  const int n = static_cast<int>(kGreek.size());
  std::string out(kGreek[static_cast<std::size_t>(index % n)]);
  if (index >= n) out += std::to_string(index / n);
  return out;
}

AtomLabel AtomLabel::parse(std::string_view raw) {
  std::string_view text = trim(raw);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    text = trim(text.substr(1, text.size() - 2));
  }
  if (text.empty()) throw ParseError("empty atom label");
  if (has_whitespace(text)) throw ParseError("atom label contains whitespace: '" + std::string(raw) + "'");

  if (text == "?" || text == "*") return wildcard();
  if (text == "D") return deuterium();
  if (is_element_symbol(text)) return element(std::string(text));
  if (text.front() == 'R') {
    const auto rest = text.substr(1);
    if (rest.empty()) return RGroupLabel{SuffixKind::none, 0};
    if (const auto n = parse_positive_int(rest)) return r_numeric(*n);
    if (const auto g = parse_greek_suffix(rest)) return r_greek(*g);
  }
  if (text.substr(0, 5) == "GROUP") {
    if (const auto g = parse_greek_suffix(text.substr(5))) return group(*g);
  }
  return superatom(std::string(text));
}

bool AtomLabel::is_element(std::string_view symbol) const {
  const auto* e = get_if<ElementLabel>();
  return e != nullptr && e->symbol == symbol;
}

bool AtomLabel::is_greek_placeholder() const {
  if (is<GroupPlaceholderLabel>()) return true;
  const auto* r = get_if<RGroupLabel>();
  return r != nullptr && r->kind == SuffixKind::greek;
}

std::string AtomLabel::text() const {
  struct Visitor {
    std::string operator()(const ElementLabel& e) const { return e.symbol; }
    std::string operator()(const SuperatomLabel& s) const { return "[" + s.text + "]"; }
    std::string operator()(const RGroupLabel& r) const {
      switch (r.kind) {
        case SuffixKind::none: return "R";
        case SuffixKind::numeric: return "R" + std::to_string(r.value);
        case SuffixKind::greek: return "R" + greek_suffix_text(r.value);
      }
      return "R";
    }
    std::string operator()(const GroupPlaceholderLabel& g) const {
      return "GROUP" + greek_suffix_text(g.greek);
    }
    std::string operator()(const WildcardLabel&) const { return "?"; }
    std::string operator()(const DeuteriumLabel&) const { return "D"; }
  };
  return std::visit(Visitor{}, value_);
}

// --- charge ----------------------------------------------------------------

Charge::Charge(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw ContractViolation("charge denominator must be non-zero");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const auto g = std::gcd(numerator < 0 ? -numerator : numerator, denominator);
  num_ = numerator / (g == 0 ? 1 : g);
  den_ = denominator / (g == 0 ? 1 : g);
}

Charge Charge::parse(std::string_view raw) {
  std::string_view text = trim(raw);
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError("invalid charge '" + std::string(raw) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Charge(parse_int(text));
  const auto den = parse_int(text.substr(slash + 1));
  if (den <= 0) throw ParseError("invalid charge denominator in '" + std::string(raw) + "'");
  return Charge(parse_int(text.substr(0, slash)), den);
}

std::string Charge::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Charge Charge::operator+(const Charge& other) const {
  return Charge(num_ * other.den_ + other.num_ * den_, den_ * other.den_);
}

// --- bonds -----------------------------------------------------------------

std::span<const BondType> all_bond_types() { return kAllBondTypes; }

std::string_view bond_type_name(BondType type) {
  return kBondNames[static_cast<std::size_t>(type)].name;
}

std::optional<BondType> parse_bond_type(std::string_view name) {
  std::string normalized(trim(name));
  std::replace(normalized.begin(), normalized.end(), '_', ' ');
  for (const auto& entry : kBondNames) {
    if (entry.name == normalized) return entry.type;
  }
  return std::nullopt;
}

bool is_basic(BondType type) {
  switch (type) {
    case BondType::single:
    case BondType::double_:
    case BondType::triple:
    case BondType::aromatic:
    case BondType::solid_wedge:
    case BondType::dashed_wedge:
      return true;
    default:
      return false;
  }
}

bool is_directional(BondType type) {
  switch (type) {
    case BondType::solid_wedge:
    case BondType::dashed_wedge:
    case BondType::hollow_wedge:
    case BondType::dative:
    case BondType::dashed_dative:
    case BondType::attachment_point:
      return true;
    default:
      return false;
  }
}

BondMarker flip(BondMarker marker) {
  switch (marker) {
    case BondMarker::up: return BondMarker::down;
    case BondMarker::down: return BondMarker::up;
    case BondMarker::none: return BondMarker::none;
  }
  return BondMarker::none;
}

// --- graph -----------------------------------------------------------------

std::optional<std::size_t> MolGraph::index_of(int id) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].id == id) return i;
  }
  return std::nullopt;
}

const Atom* MolGraph::find_atom(int id) const {
  const auto idx = index_of(id);
  return idx ? &atoms[*idx] : nullptr;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char c : trim(text)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

MolGraph relabel_ids(const MolGraph& g, std::span<const int> new_id_of) {
  if (new_id_of.size() != g.atoms.size()) {
    throw ContractViolation("relabel_ids: mapping size differs from atom count");
  }
  std::unordered_map<int, int> id_map;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) id_map.emplace(g.atoms[i].id, new_id_of[i]);
  auto map_id = [&](int id) {
    const auto it = id_map.find(id);
    return it == id_map.end() ? id : it->second;
  };

  MolGraph out = g;
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    Atom& atom = out.atoms[i];
    atom.id = new_id_of[i];
    if (atom.stereo) {
      for (int& n : atom.stereo->neighbors) {
        if (n != kImplicitHydrogen) n = map_id(n);
      }
    }
  }
  for (Bond& b : out.bonds) {
    b.atom1 = map_id(b.atom1);
    b.atom2 = map_id(b.atom2);
  }
  for (Bracket& br : out.brackets) br.atoms = remap_sorted(br.atoms, id_map);
  for (AtomGroup& grp : out.groups) grp.atoms = remap_sorted(grp.atoms, id_map);
  return out;
}

MolGraph reorder_atoms(const MolGraph& g, std::span<const std::size_t> order) {
  if (order.size() != g.atoms.size()) {
    throw ContractViolation("reorder_atoms: order size differs from atom count");
  }
  MolGraph out = g;
  for (std::size_t i = 0; i < order.size(); ++i) out.atoms[i] = g.atoms[order[i]];
  return out;
}

}  // namespace ocsrbench::graph

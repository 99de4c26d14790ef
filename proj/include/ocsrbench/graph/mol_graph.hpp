#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace ocsrbench::graph {

// ---------------------------------------------------------------------------
// Atom labels
// ---------------------------------------------------------------------------

/// Ordered greek alphabet used for placeholder suffixes (alpha = index 0).
std::span<const std::string_view> greek_alphabet();

/// Text of a greek suffix index. Indices past omega wrap with a numeric tail ("α1").
std::string greek_suffix_text(int index);

struct ElementLabel {
  std::string symbol;
  auto operator<=>(const ElementLabel&) const = default;
};

struct SuperatomLabel {
  std::string text;  // without surrounding brackets
  auto operator<=>(const SuperatomLabel&) const = default;
};

enum class SuffixKind { none, numeric, greek };

/// "R", "R1", "Rα". `value` is the number for numeric suffixes, the greek index otherwise.
struct RGroupLabel {
  SuffixKind kind = SuffixKind::none;
  int value = 0;
  auto operator<=>(const RGroupLabel&) const = default;
};

/// "GROUPα", "GROUPβ", ...
struct GroupPlaceholderLabel {
  int greek = 0;
  auto operator<=>(const GroupPlaceholderLabel&) const = default;
};

struct WildcardLabel {
  auto operator<=>(const WildcardLabel&) const = default;
};

struct DeuteriumLabel {
  auto operator<=>(const DeuteriumLabel&) const = default;
};

class AtomLabel {
 public:
  using Value = std::variant<ElementLabel, SuperatomLabel, RGroupLabel, GroupPlaceholderLabel,
                             WildcardLabel, DeuteriumLabel>;

  AtomLabel() : value_(ElementLabel{"C"}) {}
  AtomLabel(Value v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(!std::is_same_v<std::decay_t<T>, AtomLabel> && std::is_constructible_v<Value, T>)
  AtomLabel(T&& alt) : value_(std::forward<T>(alt)) {}  // NOLINT(google-explicit-constructor)

  static AtomLabel element(std::string symbol) { return ElementLabel{std::move(symbol)}; }
  static AtomLabel superatom(std::string text) { return SuperatomLabel{std::move(text)}; }
  static AtomLabel r_numeric(int n) { return RGroupLabel{SuffixKind::numeric, n}; }
  static AtomLabel r_greek(int index) { return RGroupLabel{SuffixKind::greek, index}; }
  static AtomLabel group(int greek_index) { return GroupPlaceholderLabel{greek_index}; }
  static AtomLabel wildcard() { return WildcardLabel{}; }
  static AtomLabel deuterium() { return DeuteriumLabel{}; }

  /// Classify drawn label text: "C", "[Ph]", "MeO", "R2", "Rβ", "GROUPα", "?", "*", "D".
  /// A bracketed element symbol ("[Pb]") is an element. Throws ParseError on empty or
  /// whitespace-bearing text.
  static AtomLabel parse(std::string_view text);

  const Value& value() const noexcept { return value_; }

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(value_);
  }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value_);
  }

  bool is_element(std::string_view symbol) const;
  /// Greek-suffixed R group or GROUP placeholder.
  bool is_greek_placeholder() const;

  /// Canonical text. Superatoms are emitted bracketed ("[Ph]").
  std::string text() const;

  auto operator<=>(const AtomLabel&) const = default;

 private:
  Value value_;
};

// ---------------------------------------------------------------------------
// Charges
// ---------------------------------------------------------------------------

/// Exact rational formal charge; integer charges have denominator 1.
class Charge {
 public:
  constexpr Charge() = default;
  constexpr Charge(std::int64_t integer) : num_(integer) {}  // NOLINT(google-explicit-constructor)
  Charge(std::int64_t numerator, std::int64_t denominator);

  /// "-1", "+2", "1/2", "-2/3".
  static Charge parse(std::string_view text);

  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  bool is_zero() const noexcept { return num_ == 0; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Integer charges print as "-1"; others as "p/q".
  std::string to_string() const;

  Charge operator+(const Charge& other) const;

  friend bool operator==(const Charge&, const Charge&) = default;
  friend std::strong_ordering operator<=>(const Charge& a, const Charge& b) {
    const auto lhs = static_cast<__int128>(a.num_) * b.den_;
    const auto rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

enum class Radical : int { doublet = 1, singlet = 2, triplet = 3 };

/// SMILES tetrahedral tag: '@' is anticlockwise, '@@' clockwise.
enum class Chirality { anticlockwise, clockwise };

/// Sentinel neighbor id standing for the implicit hydrogen of a stereocenter.
inline constexpr int kImplicitHydrogen = -1;

struct TetrahedralStereo {
  Chirality tag = Chirality::anticlockwise;
  /// Neighbor ids in the order the tag refers to; may contain kImplicitHydrogen once.
  std::vector<int> neighbors;
  bool operator==(const TetrahedralStereo&) const = default;
};

struct Point2d {
  double x = 0;
  double y = 0;
  bool operator==(const Point2d&) const = default;
};

struct Atom {
  int id = 0;
  AtomLabel label;
  std::optional<Point2d> point_2d;
  std::optional<Charge> charge;
  std::optional<int> isotope;
  std::optional<int> valence;
  std::optional<Radical> radical;
  /// Implicit hydrogen count (SMILES-derived graphs always carry it).
  std::optional<int> hydrogens;
  bool aromatic = false;
  std::optional<TetrahedralStereo> stereo;

  Charge effective_charge() const { return charge.value_or(Charge{}); }

  bool operator==(const Atom&) const = default;
};

// ---------------------------------------------------------------------------
// Bonds
// ---------------------------------------------------------------------------

enum class BondType {
  single,
  double_,
  triple,
  aromatic,
  solid_wedge,
  dashed_wedge,
  hollow_wedge,
  wavy,
  any,
  bold,
  dashed_bold,
  dashed_double,
  dashed_triple,
  single_or_double,
  bold_double,
  double_either,
  single_or_aromatic,
  double_or_aromatic,
  dative,
  dashed_dative,
  hydrogen,
  attachment_point,
  triple_with_single_dash,
};

inline constexpr int kBondTypeCount = 23;

std::span<const BondType> all_bond_types();
/// Canonical wire name with spaces ("solid wedge").
std::string_view bond_type_name(BondType type);
/// Accepts space or underscore separators; nullopt for anything outside the closed set.
std::optional<BondType> parse_bond_type(std::string_view name);
/// single, double, triple, aromatic, solid wedge, dashed wedge.
bool is_basic(BondType type);
/// Wedges, datives and attachment points: (atom1, atom2) order carries meaning.
bool is_directional(BondType type);

/// SMILES '/' and '\' markers, read from atom1 towards atom2.
enum class BondMarker { none, up, down };

BondMarker flip(BondMarker marker);

struct Bond {
  int atom1 = 0;
  int atom2 = 0;
  BondType type = BondType::single;
  BondMarker marker = BondMarker::none;
  bool operator==(const Bond&) const = default;
};

// ---------------------------------------------------------------------------
// Brackets, groups, graph
// ---------------------------------------------------------------------------

/// Repeat group: atoms enclosed by a bracket and the mark at its lower right.
struct Bracket {
  std::vector<int> atoms;  // sorted, unique
  std::string mark;
  bool operator==(const Bracket&) const = default;
};

/// Reserved "atom group" extension: a set of atoms carrying a total charge.
struct AtomGroup {
  std::vector<int> atoms;  // sorted, unique
  Charge charge;
  bool operator==(const AtomGroup&) const = default;
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<Bracket> brackets;
  std::vector<AtomGroup> groups;

  bool empty() const noexcept { return atoms.empty(); }
  std::size_t size() const noexcept { return atoms.size(); }

  /// Index of the atom with `id`, or nullopt.
  std::optional<std::size_t> index_of(int id) const;
  const Atom* find_atom(int id) const;

  bool operator==(const MolGraph&) const = default;
};

/// Collapse runs of whitespace and trim; used for bracket mark comparison.
std::string collapse_whitespace(std::string_view text);

/// Relabel atom ids through `new_id_of` (indexed by atom position), updating every
/// reference (bonds, brackets, groups, stereo neighbor lists). Atom order is preserved.
MolGraph relabel_ids(const MolGraph& g, std::span<const int> new_id_of);

/// Reorder atoms so that position i holds the atom formerly at `order[i]`; ids unchanged.
MolGraph reorder_atoms(const MolGraph& g, std::span<const std::size_t> order);

}  // namespace ocsrbench::graph

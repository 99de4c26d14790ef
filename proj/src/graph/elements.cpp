#include "ocsrbench/graph/elements.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace ocsrbench::graph {
namespace {

constexpr std::array<std::string_view, 118> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<int, 1> kOne = {1};
constexpr std::array<int, 1> kTwo = {2};
constexpr std::array<int, 1> kThree = {3};
constexpr std::array<int, 1> kFour = {4};
constexpr std::array<int, 2> kNitrogen = {3, 5};
constexpr std::array<int, 3> kSulfur = {2, 4, 6};

}  // namespace

bool is_element_symbol(std::string_view symbol) { return atomic_number(symbol).has_value(); }

std::optional<int> atomic_number(std::string_view symbol) {
  const auto* it = std::find(kSymbols.begin(), kSymbols.end(), symbol);
  if (it == kSymbols.end()) return std::nullopt;
  return static_cast<int>(it - kSymbols.begin()) + 1;
}

std::span<const int> organic_valences(std::string_view symbol) {
  if (symbol == "B") return kThree;
  if (symbol == "C") return kFour;
  if (symbol == "N" || symbol == "P") return kNitrogen;
  if (symbol == "O") return kTwo;
  if (symbol == "S") return kSulfur;
  if (symbol == "F" || symbol == "Cl" || symbol == "Br" || symbol == "I") return kOne;
  return {};
}

int organic_implicit_hydrogens(std::string_view symbol, int bond_order_sum, bool aromatic) {
  for (int v : organic_valences(symbol)) {
    if (v >= bond_order_sum) return std::max(0, v - bond_order_sum - (aromatic ? 1 : 0));
  }
  return 0;
}

bool is_smiles_aromatic_symbol(std::string_view symbol) {
  return symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O" || symbol == "P" ||
         symbol == "S" || symbol == "Se" || symbol == "As";
}

}  // namespace ocsrbench::graph

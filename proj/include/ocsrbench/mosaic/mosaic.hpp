#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocsrbench/mosaic/percent.hpp"

namespace ocsrbench::mosaic {

/// Visual difficulty labels; ids 1-18 are frozen.
enum class VisualLabel : int {
  decorated_text = 1,
  decorated_bond,
  polluted_boundary,
  blurry_image,
  additional_arrow_box_text,
  colored_areas_or_image_background,
  bond_crossing,
  r_represented_by_pattern,
  colored_ar,
  short_bond,
  numbered_atom,
  incomplete_molecule,
  large_molecule,
  large_font,
  long_bond,
  thick_bond,
  thin_bond,
  long_functional_group_name,
};

/// Chemical difficulty labels; ids 1-19 are frozen.
enum class ChemicalLabel : int {
  equal_width_chiral_bond = 1,
  charge_symbol,
  dashed_bond,
  wavy_bond,
  lone_pair_electron_symbol,
  triple_bond,
  hash_bond,
  ionic_bond,
  r_on_ar_uncertain_position,
  abbreviated_structure,
  valence_symbol,
  polymer,
  aromatic_bond,
  multi_group,
  atom_on_ar_uncertain_position,
  transition_state,
  coordination_bond,
  consecutive_double_bond,
  double_dashed_bond,
};

inline constexpr int kVisualLabelCount = 18;
inline constexpr int kChemicalLabelCount = 19;

/// All members in id order.
std::span<const VisualLabel> all_visual_labels();
std::span<const ChemicalLabel> all_chemical_labels();

/// snake_case names ("blurry_image", "polymer").
std::string_view label_name(VisualLabel l);
std::string_view label_name(ChemicalLabel l);
std::optional<VisualLabel> parse_visual_label(std::string_view name);
std::optional<ChemicalLabel> parse_chemical_label(std::string_view name);

struct LabelSet {
  std::set<VisualLabel> visual;
  std::set<ChemicalLabel> chemical;
  bool operator==(const LabelSet&) const = default;
};

/// (|visual|, |chemical|).
struct MosaicScore {
  int n_vis = 0;
  int n_chem = 0;
  auto operator<=>(const MosaicScore&) const = default;
};

MosaicScore mosaic_score(const LabelSet& labels);

/// Invariant: the counts sum to total; no zero entries.
struct DistributionMatrix {
  std::map<MosaicScore, std::size_t> counts;
  std::size_t total = 0;
};

DistributionMatrix distribution_matrix(std::span<const LabelSet> samples);

/// Entry (v, c) counts samples carrying both v and c; zero entries are absent.
using CooccurrenceMatrix = std::map<std::pair<VisualLabel, ChemicalLabel>, std::size_t>;

CooccurrenceMatrix cooccurrence_matrix(std::span<const LabelSet> samples);

struct CoverageStats {
  Percent pct_at_least_one_label;
  Percent pct_both_dimensions;
};

/// Throws UndefinedStatisticError on empty input.
CoverageStats coverage_stats(std::span<const LabelSet> samples);

/// Matched count over population for one difficulty cell.
struct CellAccuracy {
  std::size_t matched = 0;
  std::size_t population = 0;
  double accuracy() const { return population == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(population); }
  bool operator==(const CellAccuracy&) const = default;
};

/// Populated cells only; an empty cell is absent, never 0.
using DifficultyGrid = std::map<MosaicScore, CellAccuracy>;

/// results and labels must share one sample-id key set; otherwise InputError listing the
/// symmetric difference.
DifficultyGrid accuracy_by_difficulty(const std::map<std::string, bool>& results,
                                      const std::map<std::string, LabelSet>& labels);

/// Population-weighted mean of the cell accuracies as an exact percentage. Since each cell
/// contributes accuracy * population = matched, this equals overall matched / total.
/// Throws UndefinedStatisticError on an empty grid.
Percent weighted_grid_accuracy(const DifficultyGrid& grid);

/// Structured statistics: {"total", "coverage": {...}, "distribution": [{n_vis, n_chem,
/// count}], "cooccurrence": [{visual, chemical, count}]}. Rows are sorted; output is
/// deterministic.
std::string stats_report_json(std::span<const LabelSet> samples);

/// "n_vis,n_chem,count" rows for plotting.
std::string distribution_csv(const DistributionMatrix& m);

/// "n_vis,n_chem,matched,population,accuracy" rows; accuracy as an exact 2-decimal percent.
std::string grid_csv(const DifficultyGrid& grid);

}  // namespace ocsrbench::mosaic

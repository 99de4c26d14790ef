#include "ocsrbench/mosaic/mosaic.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"

namespace ocsrbench::mosaic {
namespace {

constexpr std::array<std::string_view, kVisualLabelCount> kVisualNames = {
    "decorated_text",
    "decorated_bond",
    "polluted_boundary",
    "blurry_image",
    "additional_arrow_box_text",
    "colored_areas_or_image_background",
    "bond_crossing",
    "r_represented_by_pattern",
    "colored_ar",
    "short_bond",
    "numbered_atom",
    "incomplete_molecule",
    "large_molecule",
    "large_font",
    "long_bond",
    "thick_bond",
    "thin_bond",
    "long_functional_group_name",
};

constexpr std::array<std::string_view, kChemicalLabelCount> kChemicalNames = {
    "equal_width_chiral_bond",
    "charge_symbol",
    "dashed_bond",
    "wavy_bond",
    "lone_pair_electron_symbol",
    "triple_bond",
    "hash_bond",
    "ionic_bond",
    "r_on_ar_uncertain_position",
    "abbreviated_structure",
    "valence_symbol",
    "polymer",
    "aromatic_bond",
    "multi_group",
    "atom_on_ar_uncertain_position",
    "transition_state",
    "coordination_bond",
    "consecutive_double_bond",
    "double_dashed_bond",
};

template <typename E, std::size_t N>
constexpr std::array<E, N> enumerate() {
  std::array<E, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<E>(static_cast<int>(i) + 1);
  return out;
}

constexpr auto kVisual = enumerate<VisualLabel, kVisualLabelCount>();
constexpr auto kChemical = enumerate<ChemicalLabel, kChemicalLabelCount>();

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<E>(static_cast<int>(i) + 1);
  }
  return std::nullopt;
}

bool has_any(const LabelSet& s) { return !s.visual.empty() || !s.chemical.empty(); }
bool has_both(const LabelSet& s) { return !s.visual.empty() && !s.chemical.empty(); }

}  // namespace

Percent Percent::of(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) throw UndefinedStatisticError("percentage over an empty population");
  // round(10000 n / d) half-up == floor((20000 n + d) / 2d).
  const unsigned __int128 num = static_cast<unsigned __int128>(numerator) * 20000U + denominator;
  const unsigned __int128 den = static_cast<unsigned __int128>(denominator) * 2U;
  return Percent{static_cast<std::int64_t>(num / den)};
}

std::string Percent::to_string() const {
  const std::int64_t mag = hundredths < 0 ? -hundredths : hundredths;
  return fmt::format("{}{}.{:02}", hundredths < 0 ? "-" : "", mag / 100, mag % 100);
}

std::span<const VisualLabel> all_visual_labels() { return kVisual; }
std::span<const ChemicalLabel> all_chemical_labels() { return kChemical; }

std::string_view label_name(VisualLabel l) { return kVisualNames.at(static_cast<std::size_t>(l) - 1); }
std::string_view label_name(ChemicalLabel l) { return kChemicalNames.at(static_cast<std::size_t>(l) - 1); }

std::optional<VisualLabel> parse_visual_label(std::string_view name) {
  return lookup<VisualLabel>(kVisualNames, name);
}
std::optional<ChemicalLabel> parse_chemical_label(std::string_view name) {
  return lookup<ChemicalLabel>(kChemicalNames, name);
}

MosaicScore mosaic_score(const LabelSet& labels) {
  return {static_cast<int>(labels.visual.size()), static_cast<int>(labels.chemical.size())};
}

DistributionMatrix distribution_matrix(std::span<const LabelSet> samples) {
  DistributionMatrix m;
  for (const LabelSet& s : samples) ++m.counts[mosaic_score(s)];
  m.total = samples.size();
  return m;
}

CooccurrenceMatrix cooccurrence_matrix(std::span<const LabelSet> samples) {
  CooccurrenceMatrix m;
  for (const LabelSet& s : samples) {
    for (VisualLabel v : s.visual) {
      for (ChemicalLabel c : s.chemical) ++m[{v, c}];
    }
  }
  return m;
}

CoverageStats coverage_stats(std::span<const LabelSet> samples) {
  if (samples.empty()) throw UndefinedStatisticError("coverage_stats: no samples");
  std::size_t any = 0, both = 0;
  for (const LabelSet& s : samples) {
    any += has_any(s) ? 1 : 0;
    both += has_both(s) ? 1 : 0;
  }
  return {Percent::of(any, samples.size()), Percent::of(both, samples.size())};
}

DifficultyGrid accuracy_by_difficulty(const std::map<std::string, bool>& results,
                                      const std::map<std::string, LabelSet>& labels) {
  std::vector<std::string> only_results, only_labels;
  for (const auto& [id, _] : results) {
    if (!labels.count(id)) only_results.push_back(id);
  }
  for (const auto& [id, _] : labels) {
    if (!results.count(id)) only_labels.push_back(id);
  }
  if (!only_results.empty() || !only_labels.empty()) {
    throw InputError(fmt::format("accuracy_by_difficulty: sample ids differ; results only: [{}]; labels only: [{}]",
                                 fmt::join(only_results, ", "), fmt::join(only_labels, ", ")));
  }
  DifficultyGrid grid;
  for (const auto& [id, matched] : results) {
    CellAccuracy& cell = grid[mosaic_score(labels.at(id))];
    ++cell.population;
    cell.matched += matched ? 1 : 0;
  }
  return grid;
}

Percent weighted_grid_accuracy(const DifficultyGrid& grid) {
  std::uint64_t weighted = 0, population = 0;
  for (const auto& [_, cell] : grid) {
    // accuracy * population, exact in integers.
    weighted += cell.matched;
    population += cell.population;
  }
  if (population == 0) throw UndefinedStatisticError("weighted_grid_accuracy: empty grid");
  return Percent::of(weighted, population);
}

std::string stats_report_json(std::span<const LabelSet> samples) {
  using nlohmann::ordered_json;
  ordered_json out;
  out["total"] = samples.size();
  if (!samples.empty()) {
    const CoverageStats cov = coverage_stats(samples);
    out["coverage"] = {{"pct_at_least_one_label", cov.pct_at_least_one_label.to_string()},
                       {"pct_both_dimensions", cov.pct_both_dimensions.to_string()}};
  } else {
    out["coverage"] = nullptr;
  }
  ordered_json dist = ordered_json::array();
  for (const auto& [score, count] : distribution_matrix(samples).counts) {
    dist.push_back({{"n_vis", score.n_vis}, {"n_chem", score.n_chem}, {"count", count}});
  }
  out["distribution"] = std::move(dist);
  ordered_json co = ordered_json::array();
  for (const auto& [key, count] : cooccurrence_matrix(samples)) {
    co.push_back({{"visual", label_name(key.first)}, {"chemical", label_name(key.second)}, {"count", count}});
  }
  out["cooccurrence"] = std::move(co);
  return out.dump(2) + "\n";
}

std::string distribution_csv(const DistributionMatrix& m) {
  std::string out = "n_vis,n_chem,count\n";
  for (const auto& [score, count] : m.counts) out += fmt::format("{},{},{}\n", score.n_vis, score.n_chem, count);
  return out;
}

std::string grid_csv(const DifficultyGrid& grid) {
  std::string out = "n_vis,n_chem,matched,population,accuracy\n";
  for (const auto& [score, cell] : grid) {
    out += fmt::format("{},{},{},{},{}\n", score.n_vis, score.n_chem, cell.matched, cell.population,
                       Percent::of(cell.matched, cell.population).to_string());
  }
  return out;
}

}  // namespace ocsrbench::mosaic

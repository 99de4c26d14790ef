#pragma once

#include <map>
#include <utility>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::graph {

/// Stereo configuration expressed in a target id space, so that two molecules can be
/// compared under a candidate atom mapping.
struct StereoSignature {
  /// Mapped stereocenter id -> composed sign: the @/@@ sign times the parity of the
  /// permutation sorting its mapped neighbor order (implicit H sorts first).
  std::map<int, int> centers;
  /// Mapped double bond (lower id, higher id) -> +1 trans / -1 cis, taken relative to the
  /// lowest-mapped substituent on each end.
  std::map<std::pair<int, int>, int> double_bonds;

  bool operator==(const StereoSignature&) const = default;
};

/// Signature of `g` with atom ids sent through `mapping` (ids missing from the mapping map to
/// themselves). Throws ValidationError when a stereocenter has fewer than 3 distinct
/// neighbors (implicit H included) or names an atom it is not bonded to.
StereoSignature stereo_parity_signature(const MolGraph& g, const std::map<int, int>& mapping);

/// Signature in g's own id space.
StereoSignature stereo_parity_signature(const MolGraph& g);

/// Remove stereocenter tags that fail the neighbor-count rule; returns how many were dropped.
std::size_t drop_invalid_stereocenters(MolGraph& g);

}  // namespace ocsrbench::graph

#pragma once

#include <string_view>

#include "ocsrbench/graph/mol_graph.hpp"

namespace ocsrbench::chem {

/// Import a V2000 MolFile. Atom ids are the 1-based file atom numbers; x and y become
/// point_2d, z is dropped.
///
/// Bond codes: 1-4 single/double/triple/aromatic, 5 single or double, 6 single or aromatic,
/// 7 double or aromatic, 8 any. Single-bond stereo 1/6/4 gives solid wedge, dashed wedge,
/// wavy; double-bond stereo 3 gives double either. Property lines: CHG (replaces atom-block
/// charges), ISO, RAD (1 singlet, 2 doublet, 3 triplet), RGP, ALS, and S-groups through
/// STY/SAL/SMT, which become brackets (superatom and data groups excepted). "A" alias lines
/// relabel their atom.
///
/// Throws ParseError on a malformed counts line, a truncated block, or an unsupported bond
/// code ("unsupported bond code 9").
graph::MolGraph parse_molfile_v2000(std::string_view text);

}  // namespace ocsrbench::chem

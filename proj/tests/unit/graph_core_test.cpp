#include <gtest/gtest.h>

#include <random>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/canonical.hpp"
#include "ocsrbench/graph/isomorphism.hpp"
#include "ocsrbench/graph/mol_graph.hpp"
#include "ocsrbench/graph/stereo.hpp"
#include "ocsrbench/graph/transform.hpp"
#include "ocsrbench/graph/validate.hpp"
#include "support/canonical_form.hpp"
#include "support/random_graphs.hpp"

namespace {

using namespace ocsrbench;
using namespace ocsrbench::graph;

Atom atom(int id, std::string_view label) {
  Atom a;
  a.id = id;
  a.label = AtomLabel::parse(label);
  return a;
}

Bond bond(int a1, int a2, BondType t = BondType::single, BondMarker m = BondMarker::none) {
  return Bond{a1, a2, t, m};
}

// Five atoms with brackets referencing ids outside the atom list.
MolGraph dangling_bracket_graph() {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "O"), atom(2, "N"), atom(3, "[Ph]"), atom(4, "R1")};
  g.bonds = {bond(0, 1, BondType::double_), bond(0, 2), bond(2, 3)};
  g.brackets = {{{5, 6, 9}, "3"}, {{10, 13}, "n=1,2"}};
  return g;
}

// ---------------------------------------------------------------------------
// Labels and charges

TEST(AtomLabel, ParsesEveryFamily) {
  EXPECT_TRUE(AtomLabel::parse("C").is_element("C"));
  EXPECT_TRUE(AtomLabel::parse("[Pb]").is_element("Pb"));
  EXPECT_EQ(AtomLabel::parse("[Ph]"), AtomLabel::superatom("Ph"));
  EXPECT_EQ(AtomLabel::parse("MeO"), AtomLabel::superatom("MeO"));
  EXPECT_EQ(AtomLabel::parse("R2"), AtomLabel::r_numeric(2));
  EXPECT_EQ(AtomLabel::parse("Rβ"), AtomLabel::r_greek(1));
  EXPECT_EQ(AtomLabel::parse("GROUPα"), AtomLabel::group(0));
  EXPECT_EQ(AtomLabel::parse("?"), AtomLabel::wildcard());
  EXPECT_EQ(AtomLabel::parse("*"), AtomLabel::wildcard());
  EXPECT_EQ(AtomLabel::parse("D"), AtomLabel::deuterium());
  EXPECT_THROW(AtomLabel::parse(""), ParseError);
  EXPECT_THROW(AtomLabel::parse("  "), ParseError);
}

TEST(AtomLabel, TextRoundTrips) {
  for (const char* text : {"C", "Cl", "[Ph]", "[MeO]", "R1", "Rα", "Rγ", "GROUPβ", "?", "D"}) {
    EXPECT_EQ(AtomLabel::parse(text).text(), text) << text;
    EXPECT_EQ(AtomLabel::parse(AtomLabel::parse(text).text()), AtomLabel::parse(text));
  }
  EXPECT_EQ(greek_suffix_text(24), "α1");
  EXPECT_TRUE(AtomLabel::parse("Rα").is_greek_placeholder());
  EXPECT_FALSE(AtomLabel::parse("R1").is_greek_placeholder());
}

TEST(Charge, NormalizesAndOrders) {
  EXPECT_EQ(Charge(2, 4), Charge(1, 2));
  EXPECT_EQ(Charge(1, -2), Charge(-1, 2));
  EXPECT_EQ(Charge::parse("-2/3").to_string(), "-2/3");
  EXPECT_EQ(Charge::parse("+2").to_string(), "2");
  EXPECT_EQ(Charge::parse("4/2"), Charge(2));
  EXPECT_LT(Charge(-1), Charge(1, 2));
  EXPECT_EQ(Charge(1, 2) + Charge(1, 2), Charge(1));
  EXPECT_THROW(Charge(1, 0), ContractViolation);
  EXPECT_THROW(Charge::parse("x"), ParseError);
}

TEST(BondTypes, ClosedSetOfTwentyThree) {
  EXPECT_EQ(all_bond_types().size(), 23u);
  for (BondType t : all_bond_types()) {
    EXPECT_EQ(parse_bond_type(bond_type_name(t)), t);
  }
  EXPECT_EQ(parse_bond_type("solid_wedge"), BondType::solid_wedge);
  EXPECT_EQ(parse_bond_type("quadruple"), std::nullopt);
  int basic = 0;
  for (BondType t : all_bond_types()) basic += is_basic(t) ? 1 : 0;
  EXPECT_EQ(basic, 6);
}

// ---------------------------------------------------------------------------
// validate_graph

TEST(Validate, EmptyGraphIsValid) {
  const auto report = validate_graph(MolGraph{});
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.issues.empty());
}

TEST(Validate, DanglingBracketReferences) {
  const auto report = validate_graph(dangling_bracket_graph());
  EXPECT_FALSE(report.ok);
  ASSERT_TRUE(report.has("bracket-unknown-atom"));
  bool names_id = false;
  for (const auto& issue : report.errors()) {
    if (issue.message.find("unknown atom id 5") != std::string::npos) names_id = true;
  }
  EXPECT_TRUE(names_id);
}

TEST(Validate, DuplicateBondOnePerUnorderedPair) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "C")};
  g.bonds = {bond(0, 1), bond(1, 0, BondType::double_)};
  const auto report = validate_graph(g);
  EXPECT_FALSE(report.ok);
  ASSERT_TRUE(report.has("duplicate-bond"));
  EXPECT_NE(report.errors().front().message.find("0-1"), std::string::npos);
}

TEST(Validate, StructuralErrors) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(0, "O"), atom(-2, "N")};
  g.bonds = {bond(0, 0), bond(0, 7)};
  g.brackets = {{{}, "n"}};
  const auto report = validate_graph(g);
  EXPECT_TRUE(report.has("duplicate-atom-id"));
  EXPECT_TRUE(report.has("negative-atom-id"));
  EXPECT_TRUE(report.has("bond-self-loop"));
  EXPECT_TRUE(report.has("bond-unknown-atom"));
  EXPECT_TRUE(report.has("bracket-empty"));
}

TEST(Validate, BracketsNestOrAreDisjoint) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "C"), atom(2, "C")};
  g.bonds = {bond(0, 1), bond(1, 2)};
  g.brackets = {{{0, 1}, "n"}, {{1}, "2"}};
  EXPECT_TRUE(validate_graph(g).ok);
  g.brackets = {{{0, 1}, "n"}, {{1, 2}, "2"}};
  EXPECT_TRUE(validate_graph(g).has("bracket-partial-overlap"));
}

TEST(Validate, RequireValidThrowsContractViolation) {
  EXPECT_THROW(require_valid(dangling_bracket_graph(), "op"), ContractViolation);
  EXPECT_NO_THROW(require_valid(MolGraph{}, "op"));
}

// ---------------------------------------------------------------------------
// canonical_ranking

TEST(Canonical, SingleAtom) {
  MolGraph g;
  g.atoms = {atom(0, "C")};
  EXPECT_EQ(canonical_ranking(g), (std::map<int, int>{{0, 0}}));
}

TEST(Canonical, EmptyGraph) { EXPECT_TRUE(canonical_ranking(MolGraph{}).empty()); }

TEST(Canonical, SymmetricEndsShareTheOuterRanks) {
  MolGraph g;
  g.atoms = {atom(10, "C"), atom(4, "O"), atom(7, "C")};
  g.bonds = {bond(10, 4), bond(4, 7)};
  const auto rank = canonical_ranking(g);
  ASSERT_EQ(rank.size(), 3u);
  std::set<int> values;
  for (const auto& [id, r] : rank) values.insert(r);
  EXPECT_EQ(values, (std::set<int>{0, 1, 2}));
  // The oxygen is distinguishable from both carbons, which are equivalent to each other.
  EXPECT_NE(rank.at(4), rank.at(10));
  EXPECT_NE(rank.at(4), rank.at(7));
}

TEST(Canonical, RequiresValidGraph) {
  EXPECT_THROW(canonical_ranking(dangling_bracket_graph()), ContractViolation);
}

TEST(Canonical, RelabelingInvariantOnRandomGraphs) {
  std::mt19937 rng(1234);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 12;
  opt.stereo = true;
  opt.groups = true;
  for (int trial = 0; trial < 200; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    ASSERT_TRUE(validate_graph(g).ok);
    const std::string form = testkit::canonical_form(g);
    for (unsigned s = 0; s < 5; ++s) {
      const MolGraph shuffled = shuffle_ids(g, rng());
      ASSERT_EQ(form, testkit::canonical_form(shuffled)) << "trial " << trial;
    }
  }
}

TEST(Canonical, HighlySymmetricGraphs) {
  // Cycles, a complete graph and a cube all need the branch search to settle ties.
  auto cycle = [](int n) {
    MolGraph g;
    for (int i = 0; i < n; ++i) g.atoms.push_back(atom(i, "C"));
    for (int i = 0; i < n; ++i) g.bonds.push_back(bond(i, (i + 1) % n, i % 2 ? BondType::double_ : BondType::single));
    return g;
  };
  MolGraph k5;
  for (int i = 0; i < 5; ++i) k5.atoms.push_back(atom(i, "N"));
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) k5.bonds.push_back(bond(i, j));
  MolGraph cube;
  for (int i = 0; i < 8; ++i) cube.atoms.push_back(atom(i, "C"));
  for (int i = 0; i < 8; ++i)
    for (int bit : {1, 2, 4})
      if ((i ^ bit) > i) cube.bonds.push_back(bond(i, i ^ bit));
  for (const MolGraph& g : {cycle(6), cycle(10), k5, cube}) {
    const std::string form = testkit::canonical_form(g);
    for (unsigned s = 1; s <= 10; ++s) EXPECT_EQ(form, testkit::canonical_form(shuffle_ids(g, s)));
  }
}

TEST(Canonical, DistinguishesNonIsomorphicGraphs) {
  MolGraph path;
  path.atoms = {atom(0, "C"), atom(1, "C"), atom(2, "C")};
  path.bonds = {bond(0, 1), bond(1, 2)};
  MolGraph tri = path;
  tri.bonds.push_back(bond(2, 0));
  EXPECT_NE(testkit::canonical_form(path), testkit::canonical_form(tri));
}

TEST(Canonical, AlphaPlaceholdersOptionIgnoresGreekLetter) {
  MolGraph a;
  a.atoms = {atom(0, "Rα"), atom(1, "C"), atom(2, "Rβ")};
  a.bonds = {bond(0, 1), bond(1, 2, BondType::double_)};
  MolGraph b = a;
  b.atoms[0].label = AtomLabel::r_greek(5);
  b.atoms[2].label = AtomLabel::r_greek(2);
  const RankingOptions alpha{.alpha_placeholders = true};
  EXPECT_EQ(canonical_ranking(a, alpha), canonical_ranking(b, alpha));
}

TEST(PermutationSign, Parity) {
  EXPECT_EQ(permutation_sign(std::vector<int>{1, 2, 3}), 1);
  EXPECT_EQ(permutation_sign(std::vector<int>{2, 1, 3}), -1);
  EXPECT_EQ(permutation_sign(std::vector<int>{3, 1, 2}), 1);
  EXPECT_EQ(permutation_sign(std::vector<int>{-1, 5, 3}), -1);
}

TEST(EquitableRefinement, SplitsPathByDistanceFromEnds) {
  // Path of 5: ends, next-to-ends, middle.
  ColoredAdjacency adj(5);
  for (std::size_t i = 0; i + 1 < 5; ++i) {
    adj[i].push_back({i + 1, 0});
    adj[i + 1].push_back({i, 0});
  }
  const auto colors = equitable_refinement(adj, std::vector<int>(5, 0));
  EXPECT_EQ(colors[0], colors[4]);
  EXPECT_EQ(colors[1], colors[3]);
  EXPECT_NE(colors[0], colors[1]);
  EXPECT_NE(colors[1], colors[2]);
  EXPECT_NE(colors[0], colors[2]);
}

// ---------------------------------------------------------------------------
// Placeholder normalization

TEST(Placeholders, GreekLettersBecomeContiguous) {
  MolGraph g;
  g.atoms = {atom(0, "Rγ"), atom(1, "C"), atom(2, "Rα")};
  g.bonds = {bond(0, 1), bond(1, 2)};
  const MolGraph n = normalize_placeholder_labels(g);
  std::multiset<std::string> labels;
  for (const Atom& a : n.atoms) labels.insert(a.label.text());
  EXPECT_EQ(labels, (std::multiset<std::string>{"Rα", "Rβ", "C"}));
}

TEST(Placeholders, NumberedRGroupsUntouched) {
  MolGraph g;
  g.atoms = {atom(0, "R1"), atom(1, "C"), atom(2, "R2")};
  g.bonds = {bond(0, 1), bond(1, 2)};
  EXPECT_EQ(normalize_placeholder_labels(g), g);
}

TEST(Placeholders, FamiliesAreIndependentAndSharedLettersStayShared) {
  MolGraph g;
  g.atoms = {atom(0, "Rδ"), atom(1, "C"), atom(2, "Rδ"), atom(3, "GROUPγ")};
  g.bonds = {bond(0, 1), bond(1, 2), bond(1, 3)};
  const MolGraph n = normalize_placeholder_labels(g);
  EXPECT_EQ(n.atoms[0].label, AtomLabel::r_greek(0));
  EXPECT_EQ(n.atoms[2].label, AtomLabel::r_greek(0));
  EXPECT_EQ(n.atoms[3].label, AtomLabel::group(0));
}

TEST(Placeholders, IdempotentAndRenamingInvariant) {
  std::mt19937 rng(77);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 9;
  for (int trial = 0; trial < 150; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    const MolGraph once = normalize_placeholder_labels(g);
    ASSERT_EQ(normalize_placeholder_labels(once), once);

    // Renaming the greek letters of one family by a consistent bijection does not change
    // the normalized graph's canonical form.
    MolGraph renamed = g;
    for (Atom& a : renamed.atoms) {
      if (const auto* r = a.label.get_if<RGroupLabel>(); r && r->kind == SuffixKind::greek) {
        a.label = AtomLabel::r_greek(23 - r->value);
      }
    }
    EXPECT_EQ(testkit::canonical_form(once), testkit::canonical_form(normalize_placeholder_labels(renamed)))
        << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------
// Bond simplification and projection

TEST(Simplify, DefaultMapping) {
  const BondMapping m = BondMapping::default_mapping();
  EXPECT_EQ(m(BondType::bold), BondType::single);
  EXPECT_EQ(m(BondType::hollow_wedge), BondType::solid_wedge);
  EXPECT_EQ(m(BondType::dashed_double), BondType::double_);
  EXPECT_EQ(m(BondType::dashed_triple), BondType::triple);
  for (BondType t : all_bond_types()) {
    EXPECT_TRUE(is_basic(m(t))) << bond_type_name(t);
    if (is_basic(t)) {
      EXPECT_EQ(m(t), t);
    }
  }
}

TEST(Simplify, JsonRoundTripAndErrors) {
  const BondMapping m = BondMapping::default_mapping();
  EXPECT_EQ(BondMapping::from_json(m.to_json(), true), m);
  EXPECT_THROW(BondMapping::from_json(R"({"bold": "wavy"})"), ConfigError);
  EXPECT_THROW(BondMapping::from_json(R"({"single": "double"})"), ConfigError);
  EXPECT_THROW(BondMapping::from_json(R"({"boldish": "single"})"), ConfigError);
  EXPECT_THROW(BondMapping::from_json(R"({"bold": "single"})", true), ConfigError);
  EXPECT_EQ(BondMapping::from_json(R"({"bold": "double"})")(BondType::bold), BondType::double_);
}

TEST(Simplify, RewritesBondsOnly) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "C"), atom(2, "O")};
  g.atoms[2].charge = Charge(-1);
  g.bonds = {bond(0, 1, BondType::bold), bond(1, 2, BondType::hollow_wedge)};
  g.brackets = {{{0}, "n"}};
  const MolGraph s = simplify_bonds(g, BondMapping::default_mapping());
  EXPECT_EQ(s.bonds[0].type, BondType::single);
  EXPECT_EQ(s.bonds[1].type, BondType::solid_wedge);
  EXPECT_EQ(s.atoms, g.atoms);
  EXPECT_EQ(s.brackets, g.brackets);
}

TEST(Project, ExampleGraph) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "O"), atom(2, "N"), atom(3, "[Ph]")};
  g.atoms[1].charge = Charge(-1);
  g.atoms[2].isotope = 15;
  g.atoms[0].valence = 4;
  g.atoms[3].radical = Radical::doublet;
  g.atoms[0].point_2d = Point2d{1.5, 2};
  g.bonds = {bond(0, 1, BondType::dashed_double), bond(0, 2, BondType::bold), bond(2, 3)};
  g.brackets = {{{2, 3}, "n"}};
  const MolGraph p = project_simplified(g);
  ASSERT_EQ(p.atoms.size(), 4u);
  for (const Atom& a : p.atoms) {
    EXPECT_FALSE(a.charge);
    EXPECT_FALSE(a.isotope);
    EXPECT_FALSE(a.valence);
    EXPECT_FALSE(a.radical);
  }
  EXPECT_EQ(p.atoms[3].label, AtomLabel::superatom("Ph"));
  EXPECT_EQ(p.atoms[0].point_2d, (Point2d{1.5, 2}));
  EXPECT_EQ(p.bonds[0].type, BondType::double_);
  EXPECT_EQ(p.bonds[1].type, BondType::single);
  EXPECT_EQ(p.bonds[2].type, BondType::single);
  EXPECT_TRUE(p.brackets.empty());
  EXPECT_EQ(project_simplified(p), p);
}

TEST(Deuterium, FoldsToHydrogenIsotopeTwo) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "D")};
  g.bonds = {bond(0, 1)};
  const MolGraph f = fold_deuterium(g);
  EXPECT_TRUE(f.atoms[1].label.is_element("H"));
  EXPECT_EQ(f.atoms[1].isotope, 2);
}

// ---------------------------------------------------------------------------
// Stereo signature

MolGraph difluoroethene(BondMarker left, BondMarker right) {
  MolGraph g;
  g.atoms = {atom(0, "F"), atom(1, "C"), atom(2, "C"), atom(3, "F")};
  g.bonds = {bond(0, 1, BondType::single, left), bond(1, 2, BondType::double_),
             bond(2, 3, BondType::single, right)};
  return g;
}

TEST(Stereo, DoubleBondConfiguration) {
  const auto trans = stereo_parity_signature(difluoroethene(BondMarker::up, BondMarker::up));
  const auto cis = stereo_parity_signature(difluoroethene(BondMarker::up, BondMarker::down));
  EXPECT_EQ(trans.double_bonds.at({1, 2}), 1);
  EXPECT_EQ(cis.double_bonds.at({1, 2}), -1);

  // C(\F)=C/F: the left bond written from carbon towards fluorine.
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "F"), atom(2, "C"), atom(3, "F")};
  g.bonds = {bond(0, 1, BondType::single, BondMarker::down), bond(0, 2, BondType::double_),
             bond(2, 3, BondType::single, BondMarker::up)};
  EXPECT_EQ(stereo_parity_signature(g).double_bonds.at({0, 2}), 1);
}

TEST(Stereo, TetrahedralParityUnderNeighborPermutation) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "F"), atom(2, "Cl"), atom(3, "Br")};
  g.bonds = {bond(0, 1), bond(0, 2), bond(0, 3)};
  g.atoms[0].stereo = TetrahedralStereo{Chirality::anticlockwise, {1, 2, 3, kImplicitHydrogen}};
  MolGraph swapped = g;
  swapped.atoms[0].stereo = TetrahedralStereo{Chirality::clockwise, {2, 1, 3, kImplicitHydrogen}};
  EXPECT_EQ(stereo_parity_signature(g), stereo_parity_signature(swapped));
  MolGraph mirror = g;
  mirror.atoms[0].stereo->tag = Chirality::clockwise;
  EXPECT_NE(stereo_parity_signature(g), stereo_parity_signature(mirror));
}

TEST(Stereo, InvalidCentersRejectedOrDropped) {
  MolGraph g;
  g.atoms = {atom(0, "C"), atom(1, "F")};
  g.bonds = {bond(0, 1)};
  g.atoms[0].stereo = TetrahedralStereo{Chirality::clockwise, {1, kImplicitHydrogen}};
  EXPECT_THROW(stereo_parity_signature(g), ValidationError);
  EXPECT_EQ(drop_invalid_stereocenters(g), 1u);
  EXPECT_FALSE(g.atoms[0].stereo);
  EXPECT_NO_THROW(stereo_parity_signature(g));
}

// ---------------------------------------------------------------------------
// Brute-force isomorphism oracle

TEST(BruteForce, TriangleVersusPath) {
  MolGraph path;
  path.atoms = {atom(0, "C"), atom(1, "C"), atom(2, "C")};
  path.bonds = {bond(0, 1), bond(1, 2)};
  MolGraph tri = path;
  tri.bonds.push_back(bond(2, 0));
  EXPECT_FALSE(brute_force_isomorphic(path, tri, AttributeComparison::graph_protocol()));
}

TEST(BruteForce, BondTypeMatters) {
  MolGraph a;
  a.atoms = {atom(0, "C"), atom(1, "O")};
  a.bonds = {bond(0, 1, BondType::double_)};
  MolGraph b = a;
  b.bonds[0].type = BondType::single;
  const auto cmp = AttributeComparison::graph_protocol();
  EXPECT_FALSE(brute_force_isomorphic(a, b, cmp));
  EXPECT_TRUE(brute_force_isomorphic(a, a, cmp));
}

TEST(BruteForce, WedgeDirectionMatters) {
  MolGraph a;
  a.atoms = {atom(0, "C"), atom(1, "O")};
  a.bonds = {bond(0, 1, BondType::solid_wedge)};
  MolGraph b = a;
  std::swap(b.bonds[0].atom1, b.bonds[0].atom2);
  EXPECT_FALSE(brute_force_isomorphic(a, b, AttributeComparison::graph_protocol()));
  b.bonds[0].type = BondType::single;
  a.bonds[0].type = BondType::single;
  EXPECT_TRUE(brute_force_isomorphic(a, b, AttributeComparison::graph_protocol()));
}

TEST(BruteForce, ShuffledCopiesMatchWithReturnedMappingValid) {
  std::mt19937 rng(99);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 8;
  opt.stereo = true;
  auto cmp = AttributeComparison::graph_protocol();
  cmp.stereo = true;
  for (int trial = 0; trial < 120; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    const MolGraph s = shuffle_ids(g, rng());
    const auto m = brute_force_isomorphic(g, s, cmp);
    ASSERT_TRUE(m) << "trial " << trial;
    EXPECT_TRUE(mapping_preserves_bonds(g, s, *m, cmp));
    EXPECT_TRUE(mapping_preserves_brackets(g, s, *m));
    EXPECT_TRUE(mapping_preserves_stereo(g, s, *m));
  }
}

TEST(BruteForce, AgreesWithCanonicalFormOnNearIsomorphs) {
  // Without stereo, canonical forms are equal exactly when the oracle finds an isomorphism.
  std::mt19937 rng(5);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 7;
  opt.coordinates = false;
  const auto cmp = AttributeComparison::graph_protocol();
  int agree_equal = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    const MolGraph h = shuffle_ids(testkit::mutate(g, rng), rng());
    if (!validate_graph(h).ok) continue;
    // Strip what the graph protocol ignores or compares leniently (valence, hydrogens,
    // aromatic flags, zero versus absent charge) so the two notions coincide exactly.
    auto strip = [](MolGraph x) {
      for (Atom& a : x.atoms) {
        a.valence.reset();
        a.hydrogens.reset();
        a.aromatic = false;
        if (a.charge && a.charge->is_zero()) a.charge.reset();
      }
      return x;
    };
    const MolGraph g2 = strip(g), h2 = strip(h);
    const bool iso = brute_force_isomorphic(g2, h2, cmp).has_value();
    EXPECT_EQ(iso, testkit::canonical_form(g2) == testkit::canonical_form(h2)) << "trial " << trial;
    agree_equal += iso ? 1 : 0;
  }
  EXPECT_GT(agree_equal, 0);
}

TEST(BruteForce, RefusesLargeGraphs) {
  MolGraph g;
  for (int i = 0; i < 11; ++i) g.atoms.push_back(atom(i, "C"));
  EXPECT_THROW(brute_force_isomorphic(g, g, AttributeComparison::graph_protocol()), RefusalError);
}

TEST(BruteForce, ValenceComparedOnlyWhenBothPresent) {
  MolGraph a;
  a.atoms = {atom(0, "C")};
  MolGraph b = a;
  b.atoms[0].valence = 4;
  const auto cmp = AttributeComparison::graph_protocol();
  EXPECT_TRUE(brute_force_isomorphic(a, b, cmp));
  a.atoms[0].valence = 3;
  EXPECT_FALSE(brute_force_isomorphic(a, b, cmp));
}

// ---------------------------------------------------------------------------
// Helpers

TEST(ShuffleIds, PreservesValidityAndSize) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const MolGraph g = testkit::random_graph(rng, {.stereo = true});
    const MolGraph s = shuffle_ids(g, static_cast<unsigned>(trial));
    EXPECT_TRUE(validate_graph(s).ok);
    EXPECT_EQ(s.atoms.size(), g.atoms.size());
    EXPECT_EQ(s.bonds.size(), g.bonds.size());
  }
}

TEST(CollapseWhitespace, TrimsAndCollapses) {
  EXPECT_EQ(collapse_whitespace("  n =\t1,  2 "), "n = 1, 2");
  EXPECT_EQ(collapse_whitespace(""), "");
}

}  // namespace

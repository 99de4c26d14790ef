#include <gtest/gtest.h>

#include <random>

#include "ocsrbench/carbon/carbon.hpp"
#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/isomorphism.hpp"
#include "ocsrbench/graph/transform.hpp"
#include "support/canonical_form.hpp"
#include "support/random_graphs.hpp"

namespace {

using namespace ocsrbench;
using namespace ocsrbench::graph;
using carbon::CarbonForm;
using Json = nlohmann::ordered_json;

Atom atom(int id, std::string_view label, double x, double y) {
  Atom a;
  a.id = id;
  a.label = AtomLabel::parse(label);
  a.point_2d = Point2d{x, y};
  return a;
}

// The five-atom example with its one in-range bracket.
MolGraph example_graph() {
  MolGraph g;
  g.atoms = {atom(0, "C", 151, 202), atom(1, "O", 255, 221), atom(2, "N", 132, 434), atom(3, "[Ph]", 59, 100),
             atom(4, "C", 276, 348)};
  g.atoms[1].charge = Charge(-1);
  g.atoms[4].isotope = 14;
  g.bonds = {{0, 1, BondType::double_}, {0, 2, BondType::single}, {2, 3, BondType::wavy},
             {0, 4, BondType::solid_wedge}};
  g.brackets = {{{0, 1, 2}, "3"}};
  return g;
}

// Attribute-preserving isomorphism including hydrogens, aromatic flags, stereo and groups.
AttributeComparison full_comparison() {
  AttributeComparison cmp = AttributeComparison::graph_protocol();
  cmp.hydrogens = true;
  cmp.aromatic = true;
  cmp.stereo = true;
  return cmp;
}

bool same_graph(const MolGraph& a, const MolGraph& b) {
  // Coordinates and groups sit outside the oracle's comparison; the coordinate-aware
  // canonical form covers them.
  if (testkit::canonical_form(a, {.coordinates = true}) != testkit::canonical_form(b, {.coordinates = true})) {
    return false;
  }
  if (a.atoms.size() > kBruteForceAtomLimit) return true;
  return brute_force_isomorphic(a, b, full_comparison()).has_value();
}

TEST(Carbon, ExampleAtomCentricRecords) {
  const Json doc = Json::parse(carbon::emit_carbon(example_graph(), CarbonForm::atom_centric));
  EXPECT_EQ(doc["format"], "CARBON");
  EXPECT_EQ(doc["version"], "1.0");
  EXPECT_EQ(doc["form"], "atom-centric");
  ASSERT_EQ(doc["atoms"].size(), 5u);
  int oxygen = 0, isotope_carbon = 0, bonds = 0;
  for (const auto& rec : doc["atoms"]) {
    bonds += static_cast<int>(rec["bonds"].size());
    if (rec["atom"] == "O") {
      EXPECT_EQ(rec["charge"], -1);
      ++oxygen;
    }
    if (rec["atom"] == "C" && rec["point_2d"] == Json::array({276, 348})) {
      EXPECT_EQ(rec["isotope"], 14);
      ++isotope_carbon;
    }
  }
  EXPECT_EQ(oxygen, 1);
  EXPECT_EQ(isotope_carbon, 1);
  EXPECT_EQ(bonds, 4);
  ASSERT_EQ(doc["brackets"].size(), 1u);
  EXPECT_EQ(doc["brackets"][0]["mark"], "3");
}

TEST(Carbon, ExampleAttributeCentricMaps) {
  const Json doc = Json::parse(carbon::emit_carbon(example_graph(), CarbonForm::attribute_centric));
  EXPECT_EQ(doc["form"], "attribute-centric");
  EXPECT_EQ(doc["atoms"].size(), 5u);
  EXPECT_EQ(doc["bonds"].size(), 4u);
  EXPECT_EQ(doc["charges"].size(), 1u);
  EXPECT_EQ(doc["isotopes"].size(), 1u);
  EXPECT_EQ(doc["coordinates"].size(), 5u);
  EXPECT_FALSE(doc.contains("valences"));
  const std::string charged = doc["charges"].begin().key();
  EXPECT_EQ(doc["atoms"][charged], "O");
  // The wedge keeps its origin at the first position of its key.
  int wedges = 0;
  for (const auto& [key, type] : doc["bonds"].items()) {
    if (type != "solid wedge") continue;
    ++wedges;
    const std::string origin = key.substr(0, key.find('-'));
    const std::string tip = key.substr(key.find('-') + 1);
    EXPECT_EQ(doc["atoms"][tip], "C");
    EXPECT_EQ(doc["isotopes"].begin().key(), tip);
    EXPECT_EQ(doc["atoms"][origin], "C");
  }
  EXPECT_EQ(wedges, 1);
}

TEST(Carbon, EmptyGraphBothForms) {
  for (CarbonForm f : {CarbonForm::atom_centric, CarbonForm::attribute_centric}) {
    const std::string text = carbon::emit_carbon(MolGraph{}, f);
    const Json doc = Json::parse(text);
    EXPECT_TRUE(doc["atoms"].empty());
    const auto parsed = carbon::parse_carbon(text);
    EXPECT_TRUE(parsed.graph.empty());
    EXPECT_EQ(parsed.form, f);
  }
}

TEST(Carbon, InvalidGraphIsContractViolation) {
  MolGraph g = example_graph();
  g.brackets.push_back({{6, 9, 10}, "n"});
  EXPECT_THROW(carbon::emit_carbon(g, CarbonForm::atom_centric), ContractViolation);
}

TEST(Carbon, RoundTripRandomGraphs) {
  std::mt19937 rng(2024);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 10;
  opt.stereo = true;
  opt.groups = true;
  for (int trial = 0; trial < 300; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    for (CarbonForm f : {CarbonForm::atom_centric, CarbonForm::attribute_centric}) {
      const std::string first = carbon::emit_carbon(g, f);
      const auto parsed = carbon::parse_carbon(first);
      EXPECT_EQ(parsed.form, f);
      EXPECT_TRUE(same_graph(g, parsed.graph)) << first;
      ASSERT_EQ(carbon::emit_carbon(parsed.graph, f), first) << "trial " << trial;
    }
  }
}

TEST(Carbon, EqualGraphsEmitEqualBytes) {
  std::mt19937 rng(8);
  testkit::GraphGenOptions opt;
  opt.max_atoms = 12;
  opt.stereo = true;
  for (int trial = 0; trial < 100; ++trial) {
    const MolGraph g = testkit::random_graph(rng, opt);
    const MolGraph s = shuffle_ids(g, rng());
    for (CarbonForm f : {CarbonForm::atom_centric, CarbonForm::attribute_centric}) {
      ASSERT_EQ(carbon::emit_carbon(g, f), carbon::emit_carbon(s, f)) << "trial " << trial;
    }
  }
}

TEST(Carbon, ConvertFormRoundTrip) {
  const auto doc = carbon::to_document(example_graph(), CarbonForm::atom_centric);
  const auto attr = carbon::convert_form(doc, CarbonForm::attribute_centric);
  EXPECT_EQ(attr.form, CarbonForm::attribute_centric);
  const auto back = carbon::convert_form(attr, CarbonForm::atom_centric);
  EXPECT_TRUE(same_graph(example_graph(), carbon::parse_carbon(back).graph));
  EXPECT_EQ(carbon::to_text(back), carbon::to_text(doc));
  EXPECT_EQ(carbon::to_text(carbon::convert_form(doc, CarbonForm::atom_centric)), carbon::to_text(doc));
}

TEST(Carbon, UnknownBondType) {
  const std::string text = R"({"format":"CARBON","version":"1.0","form":"atom-centric",
    "atoms":[{"id":0,"atom":"C","bonds":[{"to":1,"bond_type":"quadruple"}]},{"id":1,"atom":"C","bonds":[]}],
    "brackets":[]})";
  try {
    carbon::parse_carbon(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown bond type"), std::string::npos);
    EXPECT_EQ(e.path(), "atoms[0].bonds[0].bond_type");
  }
}

TEST(Carbon, MissingVersionIsParseError) {
  EXPECT_THROW(carbon::parse_carbon(R"({"format":"CARBON","form":"atom-centric","atoms":[]})"), ParseError);
  EXPECT_THROW(carbon::parse_carbon(R"({"format":"CARBON","version":"9.9","form":"atom-centric","atoms":[]})"),
               ParseError);
  EXPECT_THROW(carbon::parse_carbon(R"({"format":"CARBON","version":"1.0","form":"sideways","atoms":[]})"),
               ParseError);
}

TEST(Carbon, MalformedTextReportsLineAndColumn) {
  try {
    carbon::parse_carbon("{\n  \"format\": \"CARBON\",\n  \"version\": 1.0.0\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Carbon, ChargesNamingAbsentAtom) {
  const std::string text = R"({"format":"CARBON","version":"1.0","form":"attribute-centric",
    "atoms":{"0":"C","1":"O"},"bonds":{"0-1":"single"},"charges":{"7":-1},"brackets":[]})";
  try {
    carbon::parse_carbon(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "charges.7");
  }
}

TEST(Carbon, UnknownFieldStrictVersusLenient) {
  const std::string text = R"({"format":"CARBON","version":"1.0","form":"atom-centric",
    "atoms":[{"id":0,"atom":"C","bonds":[],"oxidation_state":2}],"brackets":[],"provenance":"x"})";
  EXPECT_THROW(carbon::parse_carbon(text), ValidationError);
  const auto lenient = carbon::parse_carbon(text, {.strict = false});
  EXPECT_EQ(lenient.graph.atoms.size(), 1u);
  ASSERT_EQ(lenient.warnings.size(), 2u);
  EXPECT_EQ(lenient.warnings[0].code, "unknown-field");
  EXPECT_EQ(lenient.warnings[0].location, "provenance");
  EXPECT_EQ(lenient.warnings[1].location, "atoms[0].oxidation_state");
}

TEST(Carbon, ReferentialErrorsCarryPaths) {
  const std::string dangling_bond = R"({"format":"CARBON","version":"1.0","form":"atom-centric",
    "atoms":[{"id":0,"atom":"C","bonds":[{"to":5,"bond_type":"single"}]}],"brackets":[]})";
  try {
    carbon::parse_carbon(dangling_bond);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "atoms[0].bonds[0].to");
  }
  const std::string dangling_bracket = R"({"format":"CARBON","version":"1.0","form":"atom-centric",
    "atoms":[{"id":0,"atom":"C","bonds":[]}],"brackets":[{"atoms":[0,6],"mark":"n"}]})";
  try {
    carbon::parse_carbon(dangling_bracket);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "brackets[0].atoms[1]");
  }
}

TEST(Carbon, FractionalChargeAndRadicalSurvive) {
  MolGraph g;
  g.atoms = {atom(0, "Ir", 0, 0), atom(1, "C", 1.25, -3.5)};
  g.atoms[0].charge = Charge(1, 2);
  g.atoms[1].radical = Radical::triplet;
  g.bonds = {{0, 1, BondType::dative}};
  for (CarbonForm f : {CarbonForm::atom_centric, CarbonForm::attribute_centric}) {
    const auto parsed = carbon::parse_carbon(carbon::emit_carbon(g, f)).graph;
    EXPECT_TRUE(same_graph(g, parsed));
  }
  const Json doc = Json::parse(carbon::emit_carbon(g, CarbonForm::attribute_centric));
  bool saw_fraction = false;
  for (const auto& [k, v] : doc["charges"].items()) saw_fraction |= v == "1/2";
  EXPECT_TRUE(saw_fraction);
}

}  // namespace

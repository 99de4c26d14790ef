#include "ocsrbench/chem/molfile.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/validate.hpp"

namespace ocsrbench::chem {
namespace {

using graph::Atom;
using graph::AtomLabel;
using graph::Bond;
using graph::BondType;
using graph::Charge;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string_view columns(std::string_view line, std::size_t from, std::size_t width) {
  if (from >= line.size()) return {};
  return trim(line.substr(from, width));
}

template <class T>
std::optional<T> number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

struct SGroup {
  std::string type;
  std::vector<int> atoms;
  std::optional<std::string> mark;
};

class MolReader {
 public:
  explicit MolReader(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.push_back(line);
      start = end + 1;
    }
  }

  graph::MolGraph run() {
    if (lines_.size() < 4) fail("MolFile is missing its counts line", lines_.size());
    const std::string_view counts = lines_[3];
    if (counts.find("V3000") != std::string_view::npos) fail("V3000 MolFiles are not supported", 4);
    auto n_atoms = number<int>(columns(counts, 0, 3));
    auto n_bonds = number<int>(columns(counts, 3, 3));
    if (!n_atoms || !n_bonds) {
      const auto t = tokens(counts);
      if (t.size() >= 2) {
        n_atoms = number<int>(t[0]);
        n_bonds = number<int>(t[1]);
      }
    }
    if (!n_atoms || !n_bonds || *n_atoms < 0 || *n_bonds < 0) fail("malformed counts line", 4);

    std::size_t line_no = 4;
    for (int i = 0; i < *n_atoms; ++i, ++line_no) atom_line(line_no, i + 1);
    for (int i = 0; i < *n_bonds; ++i, ++line_no) bond_line(line_no);
    properties(line_no);
    finish();
    const auto report = graph::validate_graph(g_);
    if (!report.ok) fail("invalid structure: " + report.errors().front().message, 0);
    return std::move(g_);
  }

 private:
  [[noreturn]] static void fail(const std::string& message, std::size_t line) { throw ParseError(message, line, line ? 1 : 0); }

  std::string_view line_at(std::size_t index) const {
    if (index >= lines_.size()) fail("MolFile ends before the structure blocks are complete", index + 1);
    return lines_[index];
  }

  static AtomLabel label_for(std::string_view symbol, Atom& a) {
    if (symbol == "R#" || symbol == "R") return graph::RGroupLabel{};
    if (symbol == "A" || symbol == "Q" || symbol == "*" || symbol == "L" || symbol == "LP") return AtomLabel::wildcard();
    if (symbol == "T") {
      a.isotope = 3;
      return AtomLabel::element("H");
    }
    return AtomLabel::parse(symbol);
  }

  void atom_line(std::size_t index, int id) {
    const std::string_view line = line_at(index);
    auto x = number<double>(columns(line, 0, 10));
    auto y = number<double>(columns(line, 10, 10));
    std::string_view symbol = columns(line, 31, 3);
    std::optional<int> charge_code = number<int>(columns(line, 36, 3));
    if (!x || !y || symbol.empty()) {
      const auto t = tokens(line);
      if (t.size() < 4) fail("malformed atom line", index + 1);
      x = number<double>(t[0]);
      y = number<double>(t[1]);
      symbol = t[3];
      charge_code = t.size() > 5 ? number<int>(t[5]) : std::nullopt;
      if (!x || !y) fail("malformed atom coordinates", index + 1);
    }
    Atom a;
    a.id = id;
    a.point_2d = graph::Point2d{*x, *y};
    try {
      a.label = label_for(symbol, a);
    } catch (const ParseError& e) {
      fail(std::string("bad atom symbol: ") + e.what(), index + 1);
    }
    switch (charge_code.value_or(0)) {
      case 1: a.charge = Charge(3); break;
      case 2: a.charge = Charge(2); break;
      case 3: a.charge = Charge(1); break;
      case 4: a.radical = graph::Radical::doublet; break;
      case 5: a.charge = Charge(-1); break;
      case 6: a.charge = Charge(-2); break;
      case 7: a.charge = Charge(-3); break;
      default: break;
    }
    g_.atoms.push_back(std::move(a));
  }

  void bond_line(std::size_t index) {
    const std::string_view line = line_at(index);
    auto a1 = number<int>(columns(line, 0, 3));
    auto a2 = number<int>(columns(line, 3, 3));
    auto code = number<int>(columns(line, 6, 3));
    auto stereo = number<int>(columns(line, 9, 3));
    if (!a1 || !a2 || !code) {
      const auto t = tokens(line);
      if (t.size() < 3) fail("malformed bond line", index + 1);
      a1 = number<int>(t[0]);
      a2 = number<int>(t[1]);
      code = number<int>(t[2]);
      stereo = t.size() > 3 ? number<int>(t[3]) : std::nullopt;
      if (!a1 || !a2 || !code) fail("malformed bond line", index + 1);
    }
    const int n = static_cast<int>(g_.atoms.size());
    if (*a1 < 1 || *a1 > n || *a2 < 1 || *a2 > n) fail("bond references an atom outside the atom block", index + 1);
    BondType type;
    switch (*code) {
      case 1: type = BondType::single; break;
      case 2: type = BondType::double_; break;
      case 3: type = BondType::triple; break;
      case 4: type = BondType::aromatic; break;
      case 5: type = BondType::single_or_double; break;
      case 6: type = BondType::single_or_aromatic; break;
      case 7: type = BondType::double_or_aromatic; break;
      case 8: type = BondType::any; break;
      default: fail("unsupported bond code " + std::to_string(*code), index + 1);
    }
    const int st = stereo.value_or(0);
    if (type == BondType::single) {
      if (st == 1) type = BondType::solid_wedge;
      if (st == 6) type = BondType::dashed_wedge;
      if (st == 4) type = BondType::wavy;
    } else if (type == BondType::double_ && st == 3) {
      type = BondType::double_either;
    }
    g_.bonds.push_back(Bond{*a1, *a2, type, graph::BondMarker::none});
  }

  Atom& atom_number(int number, std::size_t line) {
    if (number < 1 || number > static_cast<int>(g_.atoms.size())) fail("property names unknown atom " + std::to_string(number), line);
    return g_.atoms[static_cast<std::size_t>(number - 1)];
  }

  // "M  XXX  n  a1 v1  a2 v2 ..." pairs.
  std::vector<std::pair<int, int>> pairs(std::string_view line, std::size_t line_no) {
    const auto t = tokens(line.substr(std::min<std::size_t>(6, line.size())));
    if (t.empty()) fail("malformed property line", line_no);
    const auto count = number<int>(t[0]);
    if (!count || t.size() < 1 + 2 * static_cast<std::size_t>(*count)) fail("malformed property line", line_no);
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < *count; ++k) {
      const auto a = number<int>(t[1 + 2 * k]);
      const auto v = number<int>(t[2 + 2 * k]);
      if (!a || !v) fail("malformed property line", line_no);
      out.emplace_back(*a, *v);
    }
    return out;
  }

  void properties(std::size_t index) {
    bool charges_replaced = false;
    for (; index < lines_.size(); ++index) {
      const std::string_view line = lines_[index];
      const std::size_t line_no = index + 1;
      if (line.rfind("M  END", 0) == 0) return;
      if (line.rfind("A  ", 0) == 0) {
        const auto n = number<int>(columns(line, 3, 3));
        if (!n || index + 1 >= lines_.size()) fail("malformed alias", line_no);
        Atom& a = atom_number(*n, line_no);
        try {
          a.label = AtomLabel::parse(trim(lines_[index + 1]));
        } catch (const ParseError& e) {
          fail(std::string("bad alias: ") + e.what(), line_no + 1);
        }
        ++index;
        continue;
      }
      if (line.rfind("M  ", 0) != 0 || line.size() < 6) continue;
      const std::string_view tag = line.substr(3, 3);
      if (tag == "CHG") {
        if (!charges_replaced) {
          for (Atom& a : g_.atoms) a.charge.reset();
          charges_replaced = true;
        }
        for (const auto& [n, v] : pairs(line, line_no)) {
          Atom& a = atom_number(n, line_no);
          if (v != 0) {
            a.charge = Charge(v);
          } else {
            a.charge.reset();
          }
        }
      } else if (tag == "ISO") {
        for (const auto& [n, v] : pairs(line, line_no)) atom_number(n, line_no).isotope = v;
      } else if (tag == "RAD") {
        for (const auto& [n, v] : pairs(line, line_no)) {
          Atom& a = atom_number(n, line_no);
          switch (v) {
            case 0: a.radical.reset(); break;
            case 1: a.radical = graph::Radical::singlet; break;
            case 2: a.radical = graph::Radical::doublet; break;
            case 3: a.radical = graph::Radical::triplet; break;
            default: fail("unsupported radical code " + std::to_string(v), line_no);
          }
        }
      } else if (tag == "RGP") {
        for (const auto& [n, v] : pairs(line, line_no)) atom_number(n, line_no).label = AtomLabel::r_numeric(v);
      } else if (tag == "ALS") {
        const auto n = number<int>(columns(line, 7, 3));
        if (!n) fail("malformed atom list", line_no);
        atom_number(*n, line_no).label = AtomLabel::wildcard();
      } else if (tag == "STY") {
        for (const auto& t : sgroup_pairs(line, line_no)) sgroups_[t.first].type = t.second;
      } else if (tag == "SAL") {
        const auto t = tokens(line.substr(6));
        if (t.size() < 2) fail("malformed S-group atom list", line_no);
        const auto sg = number<int>(t[0]);
        const auto count = number<int>(t[1]);
        if (!sg || !count || t.size() < 2 + static_cast<std::size_t>(*count)) fail("malformed S-group atom list", line_no);
        for (int k = 0; k < *count; ++k) {
          const auto a = number<int>(t[2 + static_cast<std::size_t>(k)]);
          if (!a) fail("malformed S-group atom list", line_no);
          atom_number(*a, line_no);
          sgroups_[*sg].atoms.push_back(*a);
        }
      } else if (tag == "SMT") {
        const auto sg = number<int>(columns(line, 6, 4));
        if (!sg) fail("malformed S-group label", line_no);
        sgroups_[*sg].mark = std::string(trim(line.size() > 10 ? line.substr(10) : std::string_view{}));
      }
    }
  }

  std::vector<std::pair<int, std::string>> sgroup_pairs(std::string_view line, std::size_t line_no) {
    const auto t = tokens(line.substr(6));
    if (t.empty()) fail("malformed S-group type line", line_no);
    const auto count = number<int>(t[0]);
    if (!count || t.size() < 1 + 2 * static_cast<std::size_t>(*count)) fail("malformed S-group type line", line_no);
    std::vector<std::pair<int, std::string>> out;
    for (int k = 0; k < *count; ++k) {
      const auto sg = number<int>(t[1 + 2 * static_cast<std::size_t>(k)]);
      if (!sg) fail("malformed S-group type line", line_no);
      out.emplace_back(*sg, std::string(t[2 + 2 * static_cast<std::size_t>(k)]));
    }
    return out;
  }

  void finish() {
    for (auto& [index, sg] : sgroups_) {
      if (sg.type == "SUP" || sg.type == "DAT" || sg.atoms.empty()) continue;
      graph::Bracket br;
      br.atoms = sg.atoms;
      std::sort(br.atoms.begin(), br.atoms.end());
      br.atoms.erase(std::unique(br.atoms.begin(), br.atoms.end()), br.atoms.end());
      br.mark = sg.mark.value_or(sg.type == "SRU" ? "n" : "");
      g_.brackets.push_back(std::move(br));
    }
  }

  std::vector<std::string_view> lines_;
  graph::MolGraph g_;
  std::map<int, SGroup> sgroups_;
};

}  // namespace

graph::MolGraph parse_molfile_v2000(std::string_view text) { return MolReader(text).run(); }

}  // namespace ocsrbench::chem

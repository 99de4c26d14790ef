#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "ocsrbench/chem/smiles.hpp"
#include "ocsrbench/error.hpp"
#include "ocsrbench/graph/elements.hpp"

namespace ocsrbench::chem {
namespace {

using graph::Atom;
using graph::AtomLabel;
using graph::Bond;
using graph::BondMarker;
using graph::BondType;
using graph::Charge;

constexpr int kOpenSlot = -2;  // ring-closure neighbor not seen yet

struct Element {
  std::string symbol;
  bool aromatic = false;
};

struct AtomState {
  bool organic = false;  // unbracketed: implicit hydrogens from valence
  std::optional<graph::Chirality> chirality;
  std::vector<int> order;  // neighbor ids in order of appearance
};

struct RingOpen {
  int atom;
  std::optional<char> symbol;
  std::size_t slot;
  std::size_t position;
};

bool is_bond_symbol(char c) { return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\' || c == '$'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  graph::MolGraph run() {
    if (text_.empty()) fail("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    if (pending_) fail("bond symbol without following atom", pending_pos_);
    if (!branches_.empty()) fail("unbalanced '(': branch not closed", branch_pos_.back());
    if (!rings_.empty()) {
      const auto& [digit, open] = *rings_.begin();
      fail("unclosed ring bond " + std::to_string(digit), open.position);
    }
    finish();
    return std::move(g_);
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw ParseError(message, 1, at + 1);
  }

  void step() {
    const char c = text_[pos_];
    if (c == '[' || std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
      const std::size_t start = pos_;
      const int id = c == '[' ? bracket_atom() : organic_atom();
      if (prev_ >= 0) {
        connect(prev_, id, pending_, start);
      } else if (pending_) {
        fail("bond symbol without preceding atom", pending_pos_);
      }
      const auto idx = static_cast<std::size_t>(id);
      if (state_[idx].chirality && g_.atoms[idx].hydrogens.value_or(0) > 0) {
        state_[idx].order.push_back(graph::kImplicitHydrogen);
      }
      pending_.reset();
      prev_ = id;
      return;
    }
    if (c == '(') {
      if (prev_ < 0) fail("branch without preceding atom", pos_);
      if (pending_) fail("bond symbol before '('", pending_pos_);
      branches_.push_back(prev_);
      branch_pos_.push_back(pos_);
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == ')') fail("empty branch", pos_);
      return;
    }
    if (c == ')') {
      if (branches_.empty()) fail("unbalanced ')'", pos_);
      if (pending_) fail("bond symbol before ')'", pending_pos_);
      prev_ = branches_.back();
      branches_.pop_back();
      branch_pos_.pop_back();
      ++pos_;
      return;
    }
    if (is_bond_symbol(c)) {
      if (c == '$') fail("unsupported bond '$'", pos_);
      if (pending_) fail("two bond symbols in a row", pos_);
      pending_ = c;
      pending_pos_ = pos_;
      ++pos_;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      ring_closure();
      return;
    }
    if (c == '.') {
      if (pending_) fail("bond symbol before '.'", pending_pos_);
      if (prev_ < 0) fail("'.' without preceding atom", pos_);
      prev_ = -1;
      ++pos_;
      return;
    }
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  int add_atom(Atom a, AtomState st) {
    a.id = static_cast<int>(g_.atoms.size());
    g_.atoms.push_back(std::move(a));
    state_.push_back(std::move(st));
    return g_.atoms.back().id;
  }

  int organic_atom() {
    const char c = text_[pos_];
    Atom a;
    AtomState st;
    st.organic = true;
    if (c == '*') {
      ++pos_;
      a.label = AtomLabel::wildcard();
      st.organic = false;
      return add_atom(std::move(a), std::move(st));
    }
    std::string symbol;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      symbol = "Cl";
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      symbol = "Br";
    } else if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      symbol = std::string(1, c);
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      symbol = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      a.aromatic = true;
    } else {
      fail(std::string("'") + c + "' is not an organic-subset atom; use brackets", pos_);
    }
    pos_ += symbol.size();
    a.label = AtomLabel::element(symbol);
    return add_atom(std::move(a), std::move(st));
  }

  // Element grammar inside brackets; nullopt when the content is something else.
  static std::optional<std::pair<Atom, AtomState>> element_bracket(std::string_view s) {
    std::size_t i = 0;
    Atom a;
    AtomState st;
    auto digits = [&](std::size_t& at) -> std::optional<int> {
      const std::size_t from = at;
      int v = 0;
      while (at < s.size() && std::isdigit(static_cast<unsigned char>(s[at])) && at - from < 6) {
        v = v * 10 + (s[at] - '0');
        ++at;
      }
      if (at == from) return std::nullopt;
      return v;
    };
    if (auto iso = digits(i)) a.isotope = *iso;
    if (i >= s.size()) return std::nullopt;

    std::optional<Element> el;
    const char c = s[i];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (i + 1 < s.size() && std::islower(static_cast<unsigned char>(s[i + 1])) &&
          graph::is_element_symbol(s.substr(i, 2))) {
        el = Element{std::string(s.substr(i, 2)), false};
      } else if (graph::is_element_symbol(s.substr(i, 1))) {
        el = Element{std::string(s.substr(i, 1)), false};
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      for (std::string_view aro : {"se", "as", "b", "c", "n", "o", "p", "s"}) {
        if (s.substr(i, aro.size()) == aro) {
          std::string sym(aro);
          sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
          el = Element{sym, true};
          break;
        }
      }
    }
    if (!el) return std::nullopt;
    i += el->symbol.size();
    a.label = AtomLabel::element(el->symbol);
    a.aromatic = el->aromatic;

    if (i < s.size() && s[i] == '@') {
      ++i;
      st.chirality = graph::Chirality::anticlockwise;
      if (i < s.size() && s[i] == '@') {
        ++i;
        st.chirality = graph::Chirality::clockwise;
      }
    }
    int hydrogens = 0;
    if (i < s.size() && s[i] == 'H') {
      ++i;
      hydrogens = digits(i).value_or(1);
    }
    a.hydrogens = hydrogens;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      const char sign = s[i];
      ++i;
      int magnitude = 1;
      if (auto n = digits(i)) {
        magnitude = *n;
      } else {
        while (i < s.size() && s[i] == sign) {
          ++magnitude;
          ++i;
        }
      }
      if (magnitude != 0) a.charge = Charge(sign == '+' ? magnitude : -magnitude);
    }
    if (i < s.size() && s[i] == ':') {
      ++i;
      if (!digits(i)) return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;
    return std::pair{std::move(a), std::move(st)};
  }

  int bracket_atom() {
    const std::size_t open = pos_;
    const auto close = text_.find(']', pos_);
    if (close == std::string_view::npos) fail("unclosed '['", open);
    const std::string_view content = text_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    if (content.empty()) fail("empty bracket atom", open);
    if (auto parsed = element_bracket(content)) return add_atom(std::move(parsed->first), std::move(parsed->second));
    Atom a;
    try {
      a.label = AtomLabel::parse(content);
    } catch (const ParseError& e) {
      fail(std::string("bad bracket atom: ") + e.what(), open);
    }
    return add_atom(std::move(a), AtomState{});
  }

  static std::pair<BondType, BondMarker> bond_from_symbol(std::optional<char> symbol, bool both_aromatic) {
    if (!symbol) return {both_aromatic ? BondType::aromatic : BondType::single, BondMarker::none};
    switch (*symbol) {
      case '=': return {BondType::double_, BondMarker::none};
      case '#': return {BondType::triple, BondMarker::none};
      case ':': return {BondType::aromatic, BondMarker::none};
      case '/': return {BondType::single, BondMarker::up};
      case '\\': return {BondType::single, BondMarker::down};
      default: return {BondType::single, BondMarker::none};
    }
  }

  void add_bond(int from, int to, std::optional<char> symbol, std::size_t at) {
    if (from == to) fail("ring bond to itself", at);
    const auto key = std::minmax(from, to);
    if (!bond_pairs_.insert(key).second) fail("duplicate bond between atoms " + std::to_string(key.first) + " and " + std::to_string(key.second), at);
    const bool aro = g_.atoms[static_cast<std::size_t>(from)].aromatic && g_.atoms[static_cast<std::size_t>(to)].aromatic;
    const auto [type, marker] = bond_from_symbol(symbol, aro);
    g_.bonds.push_back(Bond{from, to, type, marker});
  }

  void connect(int from, int to, std::optional<char> symbol, std::size_t at) {
    add_bond(from, to, symbol, at);
    state_[static_cast<std::size_t>(from)].order.push_back(to);
    state_[static_cast<std::size_t>(to)].order.push_back(from);
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int digit = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        fail("'%' must be followed by two digits", pos_);
      }
      digit = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      digit = text_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) fail("ring bond without preceding atom", start);
    const auto symbol = pending_;
    pending_.reset();
    auto& order = state_[static_cast<std::size_t>(prev_)].order;
    const auto it = rings_.find(digit);
    if (it == rings_.end()) {
      order.push_back(kOpenSlot);
      rings_.emplace(digit, RingOpen{prev_, symbol, order.size() - 1, start});
      return;
    }
    const RingOpen open = it->second;
    rings_.erase(it);
    std::optional<char> chosen = open.symbol ? open.symbol : symbol;
    int from = open.atom, to = prev_;
    if (open.symbol && symbol) {
      const auto a = bond_from_symbol(open.symbol, false).first;
      const auto b = bond_from_symbol(symbol, false).first;
      if (a != b) fail("conflicting bond symbols on ring bond " + std::to_string(digit), start);
    } else if (symbol) {
      std::swap(from, to);  // symbol written at the closing atom
    }
    add_bond(from, to, chosen, start);
    state_[static_cast<std::size_t>(open.atom)].order[open.slot] = prev_;
    order.push_back(open.atom);
  }

  void finish() {
    std::vector<int> order_sum(g_.atoms.size(), 0);
    for (const Bond& b : g_.bonds) {
      const int v = b.type == BondType::double_ ? 2 : b.type == BondType::triple ? 3 : 1;
      order_sum[static_cast<std::size_t>(b.atom1)] += v;
      order_sum[static_cast<std::size_t>(b.atom2)] += v;
    }
    for (std::size_t i = 0; i < g_.atoms.size(); ++i) {
      Atom& a = g_.atoms[i];
      if (state_[i].organic) {
        const auto* el = a.label.get_if<graph::ElementLabel>();
        a.hydrogens = graph::organic_implicit_hydrogens(el->symbol, order_sum[i], a.aromatic);
      }
      if (state_[i].chirality) {
        a.stereo = graph::TetrahedralStereo{*state_[i].chirality, state_[i].order};
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  graph::MolGraph g_;
  std::vector<AtomState> state_;
  int prev_ = -1;
  std::optional<char> pending_;
  std::size_t pending_pos_ = 0;
  std::vector<int> branches_;
  std::vector<std::size_t> branch_pos_;
  std::map<int, RingOpen> rings_;
  std::set<std::pair<int, int>> bond_pairs_;
};

}  // namespace

graph::MolGraph parse_smiles(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return Parser(text).run();
}

}  // namespace ocsrbench::chem

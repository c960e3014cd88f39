//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace synthrank {

namespace {

struct ElementInfo {
  Element element;
  const char* symbol;
  int valence;
  bool aromatic_ok;  // may be written as a lowercase aromatic atom
};

// Default valences for the supported element set. Multi-valence elements
// (S, P, N) are pinned to their lowest common valence; anything written
// beyond it must carry the hydrogens/charge explicitly or is rejected.
constexpr ElementInfo kElements[] = {
    {Element::H, "H", 1, false},   {Element::B, "B", 3, true},
    {Element::C, "C", 4, true},    {Element::N, "N", 3, true},
    {Element::O, "O", 2, true},    {Element::F, "F", 1, false},
    {Element::Si, "Si", 4, false}, {Element::P, "P", 3, true},
    {Element::S, "S", 2, true},    {Element::Cl, "Cl", 1, false},
    {Element::Se, "Se", 2, true},  {Element::Br, "Br", 1, false},
    {Element::I, "I", 1, false},
};

const ElementInfo& info(Element e) {
  return kElements[static_cast<std::size_t>(e)];
}

[[noreturn]] void fail(ParseErrorKind kind, const std::string& msg,
                       std::size_t pos) {
  throw ParseError(kind, msg + " (at position " + std::to_string(pos) + ")");
}

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t pos;
};

BondOrder default_order(const Atom& a, const Atom& b) {
  return (a.aromatic && b.aromatic) ? BondOrder::kAromatic
                                    : BondOrder::kSingle;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Molecule run() {
    mol_.source_text = std::string(text_);
    while (pos_ < text_.size()) {
      step();
    }
    if (!branch_stack_.empty()) {
      fail(ParseErrorKind::kSyntax, "unclosed '('", text_.size());
    }
    if (!rings_.empty()) {
      fail(ParseErrorKind::kSyntax,
           "unclosed ring bond " + std::to_string(rings_.begin()->first),
           rings_.begin()->second.pos);
    }
    if (pending_) {
      fail(ParseErrorKind::kSyntax, "dangling bond symbol", text_.size());
    }
    if (mol_.atoms.empty()) {
      fail(ParseErrorKind::kSyntax, "no atoms", 0);
    }
    return std::move(mol_);
  }

 private:
  void step() {
    char c = text_[pos_];
    if (static_cast<unsigned char>(c) >= 0x80) {
      fail(ParseErrorKind::kSyntax, "non-ASCII byte", pos_);
    }
    switch (c) {
      case '(':
        if (prev_ < 0) {
          fail(ParseErrorKind::kSyntax, "branch before first atom", pos_);
        }
        if (pending_) {
          fail(ParseErrorKind::kSyntax, "bond symbol before '('", pos_);
        }
        branch_stack_.push_back(prev_);
        ++pos_;
        break;
      case ')':
        if (branch_stack_.empty()) {
          fail(ParseErrorKind::kSyntax, "unmatched ')'", pos_);
        }
        if (pending_) {
          fail(ParseErrorKind::kSyntax, "bond symbol before ')'", pos_);
        }
        prev_ = branch_stack_.back();
        branch_stack_.pop_back();
        ++pos_;
        break;
      case '-': set_pending(BondOrder::kSingle); break;
      case '=': set_pending(BondOrder::kDouble); break;
      case '#': set_pending(BondOrder::kTriple); break;
      case ':': set_pending(BondOrder::kAromatic); break;
      case '/':
      case '\\':
        fail(ParseErrorKind::kUnsupportedFeature,
             "directional bond stereo is not supported", pos_);
      case '*':
        fail(ParseErrorKind::kUnsupportedFeature,
             "wildcard atoms are not supported", pos_);
      case '>':
        fail(ParseErrorKind::kUnsupportedFeature,
             "reaction SMILES are not supported", pos_);
      case '.':
        if (pending_) {
          fail(ParseErrorKind::kSyntax, "bond symbol before '.'", pos_);
        }
        if (!branch_stack_.empty()) {
          fail(ParseErrorKind::kSyntax, "'.' inside a branch", pos_);
        }
        prev_ = -1;
        ++pos_;
        break;
      case '%': {
        if (pos_ + 2 >= text_.size() || !std::isdigit(text_[pos_ + 1]) ||
            !std::isdigit(text_[pos_ + 2])) {
          fail(ParseErrorKind::kSyntax, "'%' needs two digits", pos_);
        }
        int num = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        ring_closure(num);
        pos_ += 3;
        break;
      }
      case '[':
        bracket_atom();
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          ring_closure(c - '0');
          ++pos_;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
          bare_atom();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
          fail(ParseErrorKind::kSyntax, "whitespace inside SMILES", pos_);
        } else {
          fail(ParseErrorKind::kSyntax,
               std::string("unexpected character '") + c + "'", pos_);
        }
    }
  }

  void set_pending(BondOrder o) {
    if (pending_) {
      fail(ParseErrorKind::kSyntax, "two bond symbols in a row", pos_);
    }
    if (prev_ < 0) {
      fail(ParseErrorKind::kSyntax, "bond symbol before first atom", pos_);
    }
    pending_ = o;
    ++pos_;
  }

  void ring_closure(int num) {
    if (prev_ < 0) {
      fail(ParseErrorKind::kSyntax, "ring closure before first atom", pos_);
    }
    auto it = rings_.find(num);
    if (it == rings_.end()) {
      rings_[num] = RingOpen{prev_, pending_, pos_};
      pending_.reset();
      return;
    }
    RingOpen open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) {
      fail(ParseErrorKind::kSyntax, "ring bond to the same atom", pos_);
    }
    if (open.order && pending_ && *open.order != *pending_) {
      fail(ParseErrorKind::kSyntax, "conflicting ring bond orders", pos_);
    }
    std::optional<BondOrder> o = open.order ? open.order : pending_;
    add_bond(open.atom, prev_,
             o ? *o : default_order(mol_.atoms[open.atom], mol_.atoms[prev_]));
    pending_.reset();
  }

  void add_bond(int a, int b, BondOrder order) {
    for (const Bond& bd : mol_.bonds) {
      if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a)) {
        fail(ParseErrorKind::kSyntax, "duplicate bond between atoms", pos_);
      }
    }
    mol_.bonds.push_back(Bond{a, b, order});
  }

  void add_atom(Atom atom) {
    int idx = static_cast<int>(mol_.atoms.size());
    mol_.atoms.push_back(atom);
    if (prev_ >= 0) {
      BondOrder o = pending_ ? *pending_
                             : default_order(mol_.atoms[prev_], atom);
      add_bond(prev_, idx, o);
    }
    pending_.reset();
    prev_ = idx;
  }

  void bare_atom() {
    struct BareSymbol {
      const char* text;
      Element element;
      bool aromatic;
    };
    // Two-character symbols first.
    static constexpr BareSymbol kBare[] = {
        {"Cl", Element::Cl, false}, {"Br", Element::Br, false},
        {"B", Element::B, false},   {"C", Element::C, false},
        {"N", Element::N, false},   {"O", Element::O, false},
        {"P", Element::P, false},   {"S", Element::S, false},
        {"F", Element::F, false},   {"I", Element::I, false},
        {"b", Element::B, true},    {"c", Element::C, true},
        {"n", Element::N, true},    {"o", Element::O, true},
        {"p", Element::P, true},    {"s", Element::S, true},
    };
    std::string_view rest = text_.substr(pos_);
    for (const auto& sym : kBare) {
      std::string_view s(sym.text);
      if (rest.substr(0, s.size()) == s) {
        Atom atom;
        atom.element = sym.element;
        atom.aromatic = sym.aromatic;
        pos_ += s.size();
        add_atom(atom);
        return;
      }
    }
    // An uppercase letter (optionally followed by lowercase) that did not
    // match is some other element.
    if (std::isupper(static_cast<unsigned char>(rest[0]))) {
      std::string sym(1, rest[0]);
      if (rest.size() > 1 && std::islower(static_cast<unsigned char>(rest[1]))) {
        sym += rest[1];
      }
      fail(ParseErrorKind::kUnsupportedElement,
           "element '" + sym + "' is not in the supported set", pos_);
    }
    fail(ParseErrorKind::kSyntax,
         std::string("unexpected character '") + rest[0] + "'", pos_);
  }

  void bracket_atom() {
    std::size_t start = pos_;
    ++pos_;  // '['
    // Isotope label: parsed, then ignored.
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= text_.size()) {
      fail(ParseErrorKind::kSyntax, "unterminated bracket atom", start);
    }

    Atom atom;
    if (!read_bracket_symbol(atom)) {
      fail(ParseErrorKind::kSyntax, "expected element symbol", pos_);
    }

    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '@') {
        atom.parity = StereoParity::kParity2;
        ++pos_;
      } else {
        atom.parity = StereoParity::kParity1;
      }
      if (pos_ < text_.size() &&
          std::isupper(static_cast<unsigned char>(text_[pos_])) &&
          text_[pos_] != 'H') {
        fail(ParseErrorKind::kUnsupportedFeature,
             "named chirality classes are not supported", pos_);
      }
    }

    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      int count = 1;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        count = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          count = count * 10 + (text_[pos_] - '0');
          ++pos_;
        }
      }
      atom.explicit_h = count;
    } else {
      atom.explicit_h = 0;
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      char sign_char = text_[pos_];
      int sign = sign_char == '+' ? 1 : -1;
      int count = 0;
      while (pos_ < text_.size() && text_[pos_] == sign_char) {
        ++count;
        ++pos_;
      }
      if (count == 1 && pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        count = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          count = count * 10 + (text_[pos_] - '0');
          ++pos_;
        }
      }
      atom.formal_charge = sign * count;
    }

    // Atom map label: parsed, then ignored.
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      if (pos_ >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail(ParseErrorKind::kSyntax, "atom map needs digits", pos_);
      }
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    }

    if (pos_ >= text_.size() || text_[pos_] != ']') {
      fail(ParseErrorKind::kSyntax, "expected ']'", pos_);
    }
    ++pos_;

    if (atom.formal_charge < -4 || atom.formal_charge > 4) {
      fail(ParseErrorKind::kUnsupportedFeature,
           "formal charge outside [-4,4]", start);
    }
    add_atom(atom);
  }

  bool read_bracket_symbol(Atom& atom) {
    std::string_view rest = text_.substr(pos_);
    // Longest match first so Cl/Br/Si/Se win over C/B/S.
    static constexpr struct {
      const char* text;
      Element element;
      bool aromatic;
    } kSymbols[] = {
        {"Cl", Element::Cl, false}, {"Br", Element::Br, false},
        {"Si", Element::Si, false}, {"Se", Element::Se, false},
        {"se", Element::Se, true},  {"H", Element::H, false},
        {"B", Element::B, false},   {"C", Element::C, false},
        {"N", Element::N, false},   {"O", Element::O, false},
        {"F", Element::F, false},   {"P", Element::P, false},
        {"S", Element::S, false},   {"I", Element::I, false},
        {"b", Element::B, true},    {"c", Element::C, true},
        {"n", Element::N, true},    {"o", Element::O, true},
        {"p", Element::P, true},    {"s", Element::S, true},
    };
    // Inside brackets an uppercase-lowercase pair is always a two-letter
    // element symbol ("[Sc]" is scandium, never S + aromatic c), so reject
    // unknown pairs before the one-letter matches get a chance.
    if (rest.size() > 1 && std::isupper(static_cast<unsigned char>(rest[0])) &&
        std::islower(static_cast<unsigned char>(rest[1]))) {
      std::string two(rest.substr(0, 2));
      bool known = false;
      for (const auto& sym : kSymbols) {
        if (two == sym.text) known = true;
      }
      if (!known) {
        fail(ParseErrorKind::kUnsupportedElement,
             "element '" + two + "' is not in the supported set", pos_);
      }
    }
    for (const auto& sym : kSymbols) {
      std::string_view s(sym.text);
      if (rest.substr(0, s.size()) == s) {
        atom.element = sym.element;
        atom.aromatic = sym.aromatic;
        pos_ += s.size();
        return true;
      }
    }
    if (!rest.empty() && std::isupper(static_cast<unsigned char>(rest[0]))) {
      fail(ParseErrorKind::kUnsupportedElement,
           "element '" + std::string(1, rest[0]) +
               "' is not in the supported set",
           pos_);
    }
    return false;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Molecule mol_;
  int prev_ = -1;
  std::vector<int> branch_stack_;
  std::optional<BondOrder> pending_;
  std::map<int, RingOpen> rings_;
};

void build_adjacency(Molecule& mol) {
  mol.adjacency.assign(mol.atoms.size(), {});
  for (int i = 0; i < mol.num_bonds(); ++i) {
    mol.adjacency[mol.bonds[i].a].push_back(i);
    mol.adjacency[mol.bonds[i].b].push_back(i);
  }
  for (int i = 0; i < mol.num_atoms(); ++i) {
    mol.atoms[i].degree = static_cast<int>(mol.adjacency[i].size());
  }
}

void assign_implicit_h(Molecule& mol) {
  for (int i = 0; i < mol.num_atoms(); ++i) {
    Atom& atom = mol.atoms[i];
    int bond_sum = 0;
    for (int bi : mol.adjacency[i]) {
      bond_sum += bond_order_valence(mol.bonds[bi].order);
    }
    if (atom.aromatic) {
      bond_sum += 1;  // aromatic atoms count one extra bond
    }
    int effective = default_valence(atom.element) + atom.formal_charge;
    int implicit = effective - bond_sum - atom.explicit_h.value_or(0);
    if (implicit < 0) {
      throw ParseError(
          ParseErrorKind::kValence,
          std::string("valence violation on atom ") + std::to_string(i) +
              " (" + element_symbol(atom.element) + "): implicit H would be " +
              std::to_string(implicit));
    }
    atom.implicit_h = implicit;
  }
}

// Mark every bond lying on a cycle. A bond is in a ring iff it is not a
// bridge of its connected component; bridges are found with the usual
// low-link DFS (iterative, so chain length is not stack-bound). Non-tree
// edges always close a cycle and are never bridges.
void perceive_rings(Molecule& mol) {
  int n = mol.num_atoms();
  std::vector<bool> is_bridge(mol.bonds.size(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next_edge;
  };

  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack;
    stack.push_back({root, -1, 0});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next_edge < mol.adjacency[f.atom].size()) {
        int bi = mol.adjacency[f.atom][f.next_edge++];
        if (bi == f.parent_bond) continue;
        int to = mol.bonds[bi].other(f.atom);
        if (disc[to] < 0) {
          disc[to] = low[to] = timer++;
          stack.push_back({to, bi, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[to]);
        }
      } else {
        int child = f.atom;
        int pb = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[child]);
          if (low[child] > disc[parent]) {
            is_bridge[pb] = true;
          }
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    mol.atoms[i].in_ring = false;
  }
  for (std::size_t i = 0; i < mol.bonds.size(); ++i) {
    mol.bonds[i].in_ring = !is_bridge[i];
    if (mol.bonds[i].in_ring) {
      mol.atoms[mol.bonds[i].a].in_ring = true;
      mol.atoms[mol.bonds[i].b].in_ring = true;
    }
  }
}

bool pi_active_besides(const Molecule& mol, int atom, int bond_idx) {
  if (mol.atoms[atom].aromatic) return true;
  for (int bi : mol.adjacency[atom]) {
    if (bi == bond_idx) continue;
    BondOrder o = mol.bonds[bi].order;
    if (o == BondOrder::kDouble || o == BondOrder::kTriple ||
        o == BondOrder::kAromatic) {
      return true;
    }
  }
  return false;
}

void perceive_conjugation(Molecule& mol) {
  for (int i = 0; i < mol.num_bonds(); ++i) {
    Bond& b = mol.bonds[i];
    if (b.order == BondOrder::kAromatic) {
      b.conjugated = true;
    } else if (b.order == BondOrder::kSingle ||
               b.order == BondOrder::kDouble) {
      b.conjugated = pi_active_besides(mol, b.a, i) &&
                     pi_active_besides(mol, b.b, i);
    }
  }
}

}  // namespace

const char* element_symbol(Element e) { return info(e).symbol; }
int default_valence(Element e) { return info(e).valence; }
bool is_hydrogen(Element e) { return e == Element::H; }

int bond_order_valence(BondOrder o) {
  switch (o) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 1;
  }
  return 1;
}

bool Molecule::has_stereo() const {
  return std::any_of(atoms.begin(), atoms.end(), [](const Atom& a) {
    return a.parity != StereoParity::kNone;
  });
}

Molecule parse_smiles(std::string_view text) {
  // Trim surrounding whitespace; interior whitespace is a syntax error
  // raised by the parser itself.
  std::size_t b = text.find_first_not_of(" \t\r\n");
  std::size_t e = text.find_last_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    throw ParseError(ParseErrorKind::kSyntax, "empty SMILES string");
  }
  Molecule mol = Parser(text.substr(b, e - b + 1)).run();
  build_adjacency(mol);
  assign_implicit_h(mol);
  perceive_rings(mol);
  perceive_conjugation(mol);
  return mol;
}

Molecule strip_stereo(const Molecule& mol) {
  Molecule out = mol;
  for (Atom& a : out.atoms) {
    a.parity = StereoParity::kNone;
  }
  return out;
}

int heavy_atom_count(const Molecule& mol) {
  int n = 0;
  for (const Atom& a : mol.atoms) {
    if (!is_hydrogen(a.element)) ++n;
  }
  return n;
}

Hybridization perceive_hybridization(const Molecule& mol, int atom_idx) {
  const Atom& atom = mol.atoms[atom_idx];
  int doubles = 0, triples = 0;
  for (int bi : mol.adjacency[atom_idx]) {
    if (mol.bonds[bi].order == BondOrder::kDouble) ++doubles;
    if (mol.bonds[bi].order == BondOrder::kTriple) ++triples;
  }
  if (triples >= 1 || doubles >= 2) return Hybridization::kSp;
  if (atom.aromatic || doubles == 1) return Hybridization::kSp2;
  switch (atom.element) {
    case Element::B:
    case Element::C:
    case Element::N:
    case Element::O:
    case Element::Si:
    case Element::P:
    case Element::S:
    case Element::Se:
      return Hybridization::kSp3;
    default:
      return Hybridization::kUnspecified;
  }
}

// ---------------------------------------------------------------------------
// Canonical serialization

namespace {

int bond_class(BondOrder o) { return static_cast<int>(o); }

// Iterative neighbourhood refinement. Returns a rank per atom; all ranks are
// distinct after artificial tie-breaking.
std::vector<int> canonical_ranks(const Molecule& mol) {
  int n = mol.num_atoms();
  std::vector<int> rank(n, 0);
  if (n == 0) return rank;

  using Key0 = std::tuple<int, int, int, int, int, int>;
  std::vector<Key0> init(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atoms[i];
    init[i] = Key0{static_cast<int>(a.element), a.formal_charge, a.degree,
                   a.total_h(), a.aromatic ? 1 : 0,
                   static_cast<int>(a.parity)};
  }
  {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int x, int y) { return init[x] < init[y]; });
    int r = 0;
    for (int k = 0; k < n; ++k) {
      if (k > 0 && init[idx[k]] != init[idx[k - 1]]) ++r;
      rank[idx[k]] = r;
    }
  }

  auto count_classes = [&]() {
    std::set<int> s(rank.begin(), rank.end());
    return static_cast<int>(s.size());
  };

  auto refine = [&]() {
    int classes = count_classes();
    while (true) {
      using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
      std::vector<Sig> sig(n);
      for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, int>> nb;
        for (int bi : mol.adjacency[i]) {
          const Bond& b = mol.bonds[bi];
          nb.emplace_back(bond_class(b.order), rank[b.other(i)]);
        }
        std::sort(nb.begin(), nb.end());
        sig[i] = {rank[i], std::move(nb)};
      }
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(),
                [&](int x, int y) { return sig[x] < sig[y]; });
      int r = 0;
      for (int k = 0; k < n; ++k) {
        if (k > 0 && sig[idx[k]] != sig[idx[k - 1]]) ++r;
        rank[idx[k]] = r;
      }
      int now = count_classes();
      if (now == classes) break;
      classes = now;
    }
    return classes;
  };

  int classes = refine();
  while (classes < n) {
    // Break the lowest tied class at its smallest atom index, then refine
    // again so the choice propagates.
    std::vector<int> size_of(n, 0);
    for (int r : rank) ++size_of[r];
    int target = -1;
    for (int r = 0; r < n; ++r) {
      if (size_of[r] > 1) {
        target = r;
        break;
      }
    }
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (rank[i] == target) {
        chosen = i;
        break;
      }
    }
    for (int i = 0; i < n; ++i) {
      rank[i] *= 2;
    }
    rank[chosen] -= 1;
    // Re-densify.
    {
      std::vector<int> vals(rank);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (int i = 0; i < n; ++i) {
        rank[i] = static_cast<int>(
            std::lower_bound(vals.begin(), vals.end(), rank[i]) -
            vals.begin());
      }
    }
    classes = refine();
  }
  return rank;
}

struct RingClosure {
  int bond;
  int first_atom;   // earlier in emission order
  int second_atom;  // later in emission order
  int digit = 0;
};

std::string atom_token(const Atom& a) {
  bool organic_bare = false;
  switch (a.element) {
    case Element::B:
    case Element::C:
    case Element::N:
    case Element::O:
    case Element::P:
    case Element::S:
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I:
      organic_bare = true;
      break;
    default:
      break;
  }
  bool aromatic_bare_ok = true;
  if (a.aromatic) {
    switch (a.element) {
      case Element::B:
      case Element::C:
      case Element::N:
      case Element::O:
      case Element::P:
      case Element::S:
        break;
      default:
        aromatic_bare_ok = false;
    }
  }
  bool bare = organic_bare && aromatic_bare_ok && a.formal_charge == 0 &&
              a.parity == StereoParity::kNone;

  std::string sym = element_symbol(a.element);
  if (a.aromatic) {
    for (char& c : sym) c = static_cast<char>(std::tolower(c));
  }
  if (bare) return sym;

  std::string out = "[" + sym;
  if (a.parity == StereoParity::kParity1) out += "@";
  if (a.parity == StereoParity::kParity2) out += "@@";
  int h = a.total_h();
  if (h == 1) {
    out += "H";
  } else if (h > 1) {
    out += "H" + std::to_string(h);
  }
  int q = a.formal_charge;
  if (q == 1) {
    out += "+";
  } else if (q == -1) {
    out += "-";
  } else if (q > 1) {
    out += "+" + std::to_string(q);
  } else if (q < -1) {
    out += "-" + std::to_string(-q);
  }
  out += "]";
  return out;
}

std::string bond_token(const Molecule& mol, const Bond& b) {
  BondOrder def = (mol.atoms[b.a].aromatic && mol.atoms[b.b].aromatic)
                      ? BondOrder::kAromatic
                      : BondOrder::kSingle;
  if (b.order == def) return "";
  switch (b.order) {
    case BondOrder::kSingle: return "-";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return ":";
  }
  return "";
}

std::string digit_token(int d) {
  if (d < 10) return std::to_string(d);
  return "%" + std::to_string(d);
}

std::string emit_component(const Molecule& mol, const std::vector<int>& rank,
                           int start) {
  // Pass 1: DFS in rank order; collect preorder, tree structure and ring
  // closure bonds.
  std::vector<int> preorder;
  std::vector<int> pre_pos(mol.num_atoms(), -1);
  std::vector<int> parent_bond(mol.num_atoms(), -1);
  std::vector<std::vector<int>> children(mol.num_atoms());
  std::vector<bool> bond_used(mol.num_bonds(), false);
  std::vector<RingClosure> closures;

  struct Frame {
    int atom;
    std::vector<int> order;  // neighbour bond indices sorted by rank
    std::size_t next = 0;
  };
  auto sorted_edges = [&](int v) {
    std::vector<int> out = mol.adjacency[v];
    std::sort(out.begin(), out.end(), [&](int x, int y) {
      return rank[mol.bonds[x].other(v)] < rank[mol.bonds[y].other(v)];
    });
    return out;
  };

  std::vector<Frame> stack;
  stack.push_back({start, sorted_edges(start)});
  pre_pos[start] = 0;
  preorder.push_back(start);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= f.order.size()) {
      stack.pop_back();
      continue;
    }
    int bi = f.order[f.next++];
    if (bond_used[bi]) continue;
    int to = mol.bonds[bi].other(f.atom);
    if (pre_pos[to] < 0) {
      bond_used[bi] = true;
      parent_bond[to] = bi;
      children[f.atom].push_back(to);
      pre_pos[to] = static_cast<int>(preorder.size());
      preorder.push_back(to);
      stack.push_back({to, sorted_edges(to)});
    } else {
      bond_used[bi] = true;
      // ring closure: `to` was emitted earlier
      closures.push_back(RingClosure{bi, to, f.atom});
    }
  }

  // Digit assignment in emission order.
  std::vector<std::vector<int>> opens_at(mol.num_atoms());
  std::vector<std::vector<int>> closes_at(mol.num_atoms());
  for (int ci = 0; ci < static_cast<int>(closures.size()); ++ci) {
    opens_at[closures[ci].first_atom].push_back(ci);
    closes_at[closures[ci].second_atom].push_back(ci);
  }
  for (int v : preorder) {
    // Deterministic: open in rank order of the far endpoint.
    std::sort(opens_at[v].begin(), opens_at[v].end(), [&](int x, int y) {
      return rank[closures[x].second_atom] < rank[closures[y].second_atom];
    });
  }
  std::set<int> in_use;
  for (int v : preorder) {
    for (int ci : closes_at[v]) {
      in_use.erase(closures[ci].digit);
    }
    for (int ci : opens_at[v]) {
      int d = 1;
      while (in_use.count(d)) ++d;
      closures[ci].digit = d;
      in_use.insert(d);
    }
  }

  // Pass 2: recursive emission over the tree (iterative to be safe).
  std::string out;
  struct EmitFrame {
    int atom;
    std::size_t child = 0;
    bool opened_paren = false;
  };
  std::vector<EmitFrame> est;
  auto emit_atom = [&](int v) {
    if (parent_bond[v] >= 0) {
      out += bond_token(mol, mol.bonds[parent_bond[v]]);
    }
    out += atom_token(mol.atoms[v]);
    for (int ci : closes_at[v]) {
      out += digit_token(closures[ci].digit);
    }
    for (int ci : opens_at[v]) {
      out += bond_token(mol, mol.bonds[closures[ci].bond]);
      out += digit_token(closures[ci].digit);
    }
  };
  emit_atom(start);
  est.push_back({start});
  while (!est.empty()) {
    EmitFrame& f = est.back();
    if (f.child >= children[f.atom].size()) {
      est.pop_back();
      if (!est.empty() && est.back().opened_paren) {
        out += ")";
        est.back().opened_paren = false;
      }
      continue;
    }
    int c = children[f.atom][f.child++];
    bool last = f.child == children[f.atom].size();
    if (!last) {
      out += "(";
      f.opened_paren = true;
    }
    emit_atom(c);
    est.push_back({c});
  }
  return out;
}

}  // namespace

std::string canonical_form(const Molecule& mol) {
  std::vector<int> rank = canonical_ranks(mol);
  int n = mol.num_atoms();
  std::vector<bool> seen(n, false);
  std::vector<std::string> parts;

  // Visit components by their lowest-rank atom.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return rank[x] < rank[y]; });
  for (int s : order) {
    if (seen[s]) continue;
    // mark whole component
    std::vector<int> todo{s};
    seen[s] = true;
    while (!todo.empty()) {
      int v = todo.back();
      todo.pop_back();
      for (int bi : mol.adjacency[v]) {
        int u = mol.bonds[bi].other(v);
        if (!seen[u]) {
          seen[u] = true;
          todo.push_back(u);
        }
      }
    }
    parts.push_back(emit_component(mol, rank, s));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ".";
    out += parts[i];
  }
  return out;
}

}  // namespace synthrank

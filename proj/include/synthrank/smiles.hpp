//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_SMILES_HPP
#define SYNTHRANK_SMILES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthrank/errors.hpp"

namespace synthrank {

// Element set accepted by the parser. Everything else is rejected.
enum class Element : std::uint8_t {
  H, B, C, N, O, F, Si, P, S, Cl, Se, Br, I,
};

const char* element_symbol(Element e);
int default_valence(Element e);
bool is_hydrogen(Element e);

enum class StereoParity : std::uint8_t {
  kNone,     // no tag written
  kParity1,  // @
  kParity2,  // @@
};

enum class BondOrder : std::uint8_t {
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
};

// Valence contribution of one bond of the given order.
int bond_order_valence(BondOrder o);

// Hybridization perceived from the bond pattern; see perceive_hybridization.
enum class Hybridization : std::uint8_t {
  kUnspecified,
  kS,
  kSp,
  kSp2,
  kSp3,
  kSp3d,
  kSp3d2,
  kOther,
};

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  std::optional<int> explicit_h;  // present only for bracket atoms
  bool aromatic = false;
  StereoParity parity = StereoParity::kNone;

  // Derived during parsing.
  int implicit_h = 0;
  bool in_ring = false;
  int degree = 0;  // number of explicit neighbours

  int total_h() const { return implicit_h + explicit_h.value_or(0); }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
  bool in_ring = false;     // derived: lies on at least one cycle
  bool conjugated = false;  // derived, see smiles.cpp for the rule

  int other(int atom) const { return atom == a ? b : a; }
};

struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::string source_text;

  // Adjacency as bond indices per atom, in bond declaration order.
  std::vector<std::vector<int>> adjacency;

  int num_atoms() const { return static_cast<int>(atoms.size()); }
  int num_bonds() const { return static_cast<int>(bonds.size()); }
  bool has_stereo() const;
};

// Parse the supported SMILES subset: organic-subset atoms, bracket atoms
// with charge/H-count/@/@@ (isotopes and atom maps ignored), branches,
// ring closures (digits and %nn), bond symbols - = # :, and '.' component
// separators. Directional bonds (/ \), wildcards and reaction arrows are
// rejected. Throws ParseError.
Molecule parse_smiles(std::string_view text);

// Deterministic canonical serialization: Morgan-style rank refinement with
// tie-breaking by (element, charge, degree, H count, aromatic, parity,
// smallest index), DFS emission from the lowest rank atom of each
// component, components sorted lexicographically.
std::string canonical_form(const Molecule& mol);

// Copy with every stereo parity cleared.
Molecule strip_stereo(const Molecule& mol);

int heavy_atom_count(const Molecule& mol);

Hybridization perceive_hybridization(const Molecule& mol, int atom_idx);

}  // namespace synthrank

#endif

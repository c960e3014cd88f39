//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "synthrank/smiles.hpp"
#include "testutil.hpp"

using namespace synthrank;

TEST_CASE("methane") {
  Molecule m = parse_smiles("C");
  CHECK(m.num_atoms() == 1);
  CHECK(m.num_bonds() == 0);
  CHECK(m.atoms[0].implicit_h == 4);
  CHECK(m.atoms[0].element == Element::C);
}

TEST_CASE("benzene: aromatic ring, one implicit H each") {
  Molecule m = parse_smiles("c1ccccc1");
  CHECK(m.num_atoms() == 6);
  CHECK(m.num_bonds() == 6);
  for (const Atom& a : m.atoms) {
    CHECK(a.aromatic);
    CHECK(a.implicit_h == 1);
    CHECK(a.in_ring);
    CHECK(a.degree == 2);
  }
  for (const Bond& b : m.bonds) {
    CHECK(b.order == BondOrder::kAromatic);
    CHECK(b.in_ring);
    CHECK(b.conjugated);
  }
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_smiles("C("), ParseError);
  CHECK_THROWS_AS(parse_smiles(""), ParseError);
  CHECK_THROWS_AS(parse_smiles("   "), ParseError);
  CHECK_THROWS_AS(parse_smiles("C)"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C1CC"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C=="), ParseError);
  CHECK_THROWS_AS(parse_smiles("C="), ParseError);
  CHECK_THROWS_AS(parse_smiles("[C"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C11"), ParseError);
  CHECK_THROWS_AS(parse_smiles("=C"), ParseError);
}

TEST_CASE("error kinds") {
  auto kind_of = [](const std::string& s) {
    try {
      parse_smiles(s);
    } catch (const ParseError& e) {
      return e.kind();
    }
    return ParseErrorKind::kSyntax;
  };
  CHECK(kind_of("[Fe]") == ParseErrorKind::kUnsupportedElement);
  CHECK(kind_of("[Na+]") == ParseErrorKind::kUnsupportedElement);
  CHECK(kind_of("[Sc]") == ParseErrorKind::kUnsupportedElement);
  CHECK(kind_of("C/C=C/C") == ParseErrorKind::kUnsupportedFeature);
  CHECK(kind_of("*") == ParseErrorKind::kUnsupportedFeature);
  CHECK(kind_of("C(=O)(=O)(=O)O") == ParseErrorKind::kValence);
  CHECK(kind_of("C%1") == ParseErrorKind::kSyntax);
}

TEST_CASE("bracket atoms") {
  Molecule m = parse_smiles("C[C@@H](N)O");
  CHECK(m.num_atoms() == 4);
  CHECK(m.atoms[1].parity == StereoParity::kParity2);
  CHECK(m.atoms[1].explicit_h.value() == 1);
  CHECK(m.atoms[1].implicit_h == 0);
  CHECK(m.atoms[1].total_h() == 1);

  Molecule anion = parse_smiles("[O-]C");
  CHECK(anion.atoms[0].formal_charge == -1);
  // default valence 2, one bond, charge -1: no hydrogens left
  CHECK(anion.atoms[0].implicit_h == 0);

  Molecule cation = parse_smiles("[NH4+]");
  CHECK(cation.atoms[0].formal_charge == 1);
  CHECK(cation.atoms[0].total_h() == 4);

  // isotopes and atom maps are accepted and ignored
  Molecule iso = parse_smiles("[13CH4]");
  CHECK(iso.atoms[0].total_h() == 4);
  Molecule mapped = parse_smiles("[CH3:7]O");
  CHECK(mapped.atoms[0].total_h() == 3);

  CHECK_THROWS_AS(parse_smiles("[C+9]"), ParseError);
}

TEST_CASE("explicit hydrogens count as atoms but not heavy atoms") {
  Molecule m = parse_smiles("[H]O[H]");
  CHECK(m.num_atoms() == 3);
  CHECK(heavy_atom_count(m) == 1);
  CHECK(m.atoms[1].implicit_h == 0);

  CHECK(heavy_atom_count(parse_smiles("C")) == 1);
  CHECK(heavy_atom_count(parse_smiles("CCO")) == 3);
}

TEST_CASE("multi-component molecules") {
  Molecule m = parse_smiles("CCO.CC");
  CHECK(m.num_atoms() == 5);
  CHECK(m.num_bonds() == 3);
  std::string c = canonical_form(m);
  CHECK(c == canonical_form(parse_smiles("CC.OCC")));
}

TEST_CASE("ring perception is exact on small cases") {
  Molecule m = parse_smiles("C1CC1CC");
  int ring_bonds = 0;
  for (const Bond& b : m.bonds) ring_bonds += b.in_ring ? 1 : 0;
  CHECK(ring_bonds == 3);
  CHECK(m.atoms[0].in_ring);
  CHECK(!m.atoms[4].in_ring);

  // spiro: both rings kept
  Molecule spiro = parse_smiles("C1CC12CC2");
  for (const Bond& b : spiro.bonds) CHECK(b.in_ring);
}

TEST_CASE("ring flag equals brute-force bridge check") {
  RngStream rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto rm = testutil::random_molecule(rng, 4 + static_cast<int>(rng.next_below(9)));
    RngStream order(trial);
    Molecule m = parse_smiles(testutil::write_smiles(rm, order));
    for (int bi = 0; bi < m.num_bonds(); ++bi) {
      // remove bond bi, test connectivity of its endpoints
      std::vector<int> stack{m.bonds[bi].a};
      std::set<int> seen{m.bonds[bi].a};
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int e : m.adjacency[v]) {
          if (e == bi) continue;
          int u = m.bonds[e].other(v);
          if (!seen.count(u)) {
            seen.insert(u);
            stack.push_back(u);
          }
        }
      }
      bool still_connected = seen.count(m.bonds[bi].b) > 0;
      CHECK(m.bonds[bi].in_ring == still_connected);
    }
  }
}

TEST_CASE("canonical form is writing-invariant") {
  CHECK(canonical_form(parse_smiles("CCO")) ==
        canonical_form(parse_smiles("OCC")));
  CHECK(canonical_form(parse_smiles("N")) == "N");
  CHECK(canonical_form(parse_smiles("C(F)(Cl)Br")) ==
        canonical_form(parse_smiles("BrC(Cl)F")));
}

TEST_CASE("canonical form is stable under random emission orders") {
  RngStream rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto rm = testutil::random_molecule(rng, 10);
    RngStream base(1000 + trial);
    std::string reference =
        canonical_form(parse_smiles(testutil::write_smiles(rm, base)));
    for (int p = 0; p < 100; ++p) {
      RngStream order(trial * 1000 + p);
      std::string writing = testutil::write_smiles(rm, order);
      CHECK(canonical_form(parse_smiles(writing)) == reference);
    }
  }
}

TEST_CASE("canonical form reparses to itself") {
  RngStream rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto rm = testutil::random_molecule(rng, 5 + static_cast<int>(rng.next_below(8)));
    RngStream order(trial);
    std::string c = canonical_form(parse_smiles(testutil::write_smiles(rm, order)));
    CHECK(canonical_form(parse_smiles(c)) == c);
  }
  std::string c = canonical_form(parse_smiles("c1ccccc1-c1ccccc1"));
  CHECK(canonical_form(parse_smiles(c)) == c);
}

TEST_CASE("strip_stereo") {
  Molecule m = parse_smiles("C[C@@H](N)O");
  Molecule s = strip_stereo(m);
  CHECK(!s.has_stereo());
  CHECK(m.has_stereo());
  // idempotent
  Molecule s2 = strip_stereo(s);
  CHECK(canonical_form(s2) == canonical_form(s));
  // equals the text-level tag removal
  Molecule text_stripped = parse_smiles("C[CH](N)O");
  CHECK(canonical_form(s) == canonical_form(text_stripped));
  // and stereo changes the canonical string
  CHECK(canonical_form(m) != canonical_form(s));
}

TEST_CASE("strip_stereo equals text-level removal on both parities") {
  for (std::string src : {"C[C@H](N)O", "C[C@@H](N)O", "O[C@](C)(N)CC"}) {
    std::string no_tags = src;
    std::string::size_type p;
    while ((p = no_tags.find("@@")) != std::string::npos) no_tags.erase(p, 2);
    while ((p = no_tags.find('@')) != std::string::npos) no_tags.erase(p, 1);
    CHECK(canonical_form(strip_stereo(parse_smiles(src))) ==
          canonical_form(parse_smiles(no_tags)));
  }
}

TEST_CASE("aromatic/aliphatic bond defaults") {
  Molecule biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
  int single = 0;
  for (const Bond& b : biphenyl.bonds) {
    if (b.order == BondOrder::kSingle) ++single;
  }
  CHECK(single == 1);

  Molecule toluene = parse_smiles("Cc1ccccc1");
  CHECK(toluene.bonds[0].order == BondOrder::kSingle);
}

TEST_CASE("hybridization heuristic") {
  Molecule ethyne = parse_smiles("C#C");
  CHECK(perceive_hybridization(ethyne, 0) == Hybridization::kSp);
  Molecule allene = parse_smiles("C=C=C");
  CHECK(perceive_hybridization(allene, 1) == Hybridization::kSp);
  CHECK(perceive_hybridization(allene, 0) == Hybridization::kSp2);
  Molecule benzene = parse_smiles("c1ccccc1");
  CHECK(perceive_hybridization(benzene, 0) == Hybridization::kSp2);
  Molecule ethane = parse_smiles("CC");
  CHECK(perceive_hybridization(ethane, 0) == Hybridization::kSp3);
  Molecule hcl = parse_smiles("Cl");
  CHECK(perceive_hybridization(hcl, 0) == Hybridization::kUnspecified);
}

TEST_CASE("conjugation rule") {
  Molecule butadiene = parse_smiles("C=CC=C");
  CHECK(butadiene.bonds[1].conjugated);   // central single bond
  Molecule ethene = parse_smiles("C=C");
  CHECK(!ethene.bonds[0].conjugated);     // isolated double bond
}

TEST_CASE("implicit h is never negative on accepted inputs") {
  RngStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto rm = testutil::random_molecule(rng, 3 + static_cast<int>(rng.next_below(10)));
    RngStream order(trial);
    Molecule m = parse_smiles(testutil::write_smiles(rm, order));
    for (const Atom& a : m.atoms) CHECK(a.implicit_h >= 0);
  }
}

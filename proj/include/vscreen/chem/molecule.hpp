#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vscreen::chem {

// Bond orders; Aromatic is its own order rather than 1.5 so that fragment
// hashing stays integer-exact.
enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Atom {
  std::string element;     // symbol as written, e.g. "C", "Cl", "N"
  int formal_charge = 0;   // in [-4, +4]
  bool aromatic = false;
  int h_count = 0;         // attached hydrogens, explicit or inferred
  bool ring_member = false;
  bool bracket = false;    // written as a bracket atom; H count is explicit
};

struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondOrder order = BondOrder::Single;
};

// Heavy-atom graph. Indices are dense and 0-based; hydrogens are counted on
// atoms, never materialized.
struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  std::size_t degree(std::size_t atom_idx) const {
    std::size_t d = 0;
    for (const Bond& b : bonds)
      if (b.a == atom_idx || b.b == atom_idx) ++d;
    return d;
  }

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(atoms.size());
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      adj[bonds[i].a].push_back(i);
      adj[bonds[i].b].push_back(i);
    }
    return adj;
  }
};

}  // namespace vscreen::chem

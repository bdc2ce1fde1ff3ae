#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "vscreen/chem/molecule.hpp"

namespace vscreen::chem {

// Parse failure with the byte offset of the offending character. Callers
// ingesting batches catch this and record the row as a featurization failure.
class SmilesError : public std::runtime_error {
 public:
  SmilesError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Supported coverage: organic subset B C N O P S F Cl Br I, aromatic
// lowercase b c n o p s, bracket atoms with isotope/charge/H-count/class,
// branches, ring closures (1-9 and %nn), bond symbols - = # :. Stereo marks
// / \ @ are accepted and ignored. Implicit hydrogens follow the standard
// valence model; exceeding it is a parse failure.
Molecule parse_smiles(const std::string& smiles);

// Deterministic serialization (DFS from atom 0, neighbors in index order).
// Re-parsing yields a graph isomorphic to the input under emission order.
std::string write_smiles(const Molecule& m);

}  // namespace vscreen::chem

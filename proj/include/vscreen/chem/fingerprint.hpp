#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "vscreen/chem/molecule.hpp"
#include "vscreen/core/errors.hpp"

namespace vscreen::chem {

// Fixed-length binary fingerprint. nbits must be a power of two so that
// folding a 64-bit fragment identifier is a mask.
class Fingerprint {
 public:
  Fingerprint() : Fingerprint(1024) {}
  explicit Fingerprint(std::size_t nbits);

  std::size_t nbits() const { return nbits_; }

  void set(std::size_t bit) {
    words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
  }
  bool test(std::size_t bit) const {
    return (words_[bit >> 6] >> (bit & 63)) & 1;
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Sorted indices of set bits; this is the sparse network input.
  std::vector<std::uint32_t> on_bits() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  // Lowercase hex, one char per nibble: bit i = bit (i mod 4) of nibble i/4.
  std::string to_hex() const;
  static Fingerprint from_hex(const std::string& hex, std::size_t nbits);

  bool operator==(const Fingerprint& o) const {
    return nbits_ == o.nbits_ && words_ == o.words_;
  }

 private:
  std::size_t nbits_;
  std::vector<std::uint64_t> words_;
};

// Deterministic initial identifier for one atom: a stable 64-bit hash of
// (element, heavy degree, H count, formal charge, aromatic, ring membership).
std::uint64_t atom_invariant(const Molecule& m, std::size_t atom_idx);

// Morgan-style circular fingerprint. Each iteration rehashes every atom's
// identifier with its sorted (bond order, neighbor identifier) pairs; the
// identifiers collected over iterations 0..radius are deduplicated and each
// sets bit (id mod nbits). ECFP4 corresponds to radius 2.
Fingerprint ecfp(const Molecule& m, unsigned radius, std::size_t nbits);

// All distinct fragment identifiers produced by the ecfp update rule, before
// folding. Exposed for diagnostics and collision analysis.
std::vector<std::uint64_t> ecfp_fragment_ids(const Molecule& m, unsigned radius);

// |a AND b| / |a OR b|; 1.0 when both fingerprints are all-zero.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace vscreen::chem

#include "vscreen/chem/fingerprint.hpp"

#include <algorithm>
#include <array>

#include "vscreen/core/hash.hpp"

namespace vscreen::chem {

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Fingerprint::Fingerprint(std::size_t nbits) : nbits_(nbits) {
  if (!power_of_two(nbits))
    throw DataError("fingerprint length must be a power of two, got " +
                    std::to_string(nbits));
  words_.assign((nbits + 63) / 64, 0);
}

std::vector<std::uint32_t> Fingerprint::on_bits() const {
  std::vector<std::uint32_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      int bit = std::countr_zero(word);
      out.push_back(static_cast<std::uint32_t>(w * 64 + bit));
      word &= word - 1;
    }
  }
  return out;
}

std::string Fingerprint::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(nbits_ / 4);
  for (std::size_t nib = 0; nib < nbits_ / 4; ++nib) {
    std::uint64_t word = words_[nib / 16];
    out += digits[(word >> ((nib % 16) * 4)) & 0xf];
  }
  return out;
}

Fingerprint Fingerprint::from_hex(const std::string& hex, std::size_t nbits) {
  Fingerprint fp(nbits);
  if (hex.size() != nbits / 4)
    throw DataError("hex fingerprint has " + std::to_string(hex.size()) +
                    " chars, expected " + std::to_string(nbits / 4));
  for (std::size_t nib = 0; nib < nbits / 4; ++nib) {
    int v = hex_digit(hex[nib]);
    if (v < 0) throw DataError("invalid hex fingerprint");
    fp.words_[nib / 16] |= static_cast<std::uint64_t>(v) << ((nib % 16) * 4);
  }
  return fp;
}

std::uint64_t atom_invariant(const Molecule& m, std::size_t atom_idx) {
  const Atom& a = m.atoms[atom_idx];
  std::size_t degree = 0;
  for (const Bond& b : m.bonds)
    if (b.a == atom_idx || b.b == atom_idx) ++degree;
  const std::array<std::uint64_t, 6> fields = {
      hash_string(a.element),
      static_cast<std::uint64_t>(degree),
      static_cast<std::uint64_t>(a.h_count),
      static_cast<std::uint64_t>(a.formal_charge + 8),
      static_cast<std::uint64_t>(a.aromatic ? 1 : 0),
      static_cast<std::uint64_t>(a.ring_member ? 1 : 0),
  };
  return hash_u64s(fields);
}

std::vector<std::uint64_t> ecfp_fragment_ids(const Molecule& m, unsigned radius) {
  if (m.atoms.empty()) throw DataError("cannot fingerprint an empty molecule");
  if (radius > 8) throw DataError("fingerprint radius must be <= 8");

  const std::size_t n = m.atoms.size();
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = atom_invariant(m, i);

  std::vector<std::uint64_t> collected = ids;
  auto adj = m.adjacency();

  for (unsigned iter = 1; iter <= radius; ++iter) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
      pairs.reserve(adj[i].size());
      for (std::size_t bi : adj[i]) {
        const Bond& b = m.bonds[bi];
        std::size_t nb = b.a == i ? b.b : b.a;
        pairs.emplace_back(static_cast<std::uint64_t>(b.order), ids[nb]);
      }
      std::sort(pairs.begin(), pairs.end());
      // no neighbors: the identifier is stable across iterations
      std::uint64_t h = ids[i];
      for (const auto& [order, nb_id] : pairs) {
        h = hash_combine(h, order);
        h = hash_combine(h, nb_id);
      }
      next[i] = h;
    }
    ids = std::move(next);
    collected.insert(collected.end(), ids.begin(), ids.end());
  }

  std::sort(collected.begin(), collected.end());
  collected.erase(std::unique(collected.begin(), collected.end()),
                  collected.end());
  return collected;
}

Fingerprint ecfp(const Molecule& m, unsigned radius, std::size_t nbits) {
  Fingerprint fp(nbits);  // validates nbits
  for (std::uint64_t id : ecfp_fragment_ids(m, radius))
    fp.set(static_cast<std::size_t>(id & (nbits - 1)));
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits() != b.nbits())
    throw DataError("tanimoto requires equal fingerprint lengths");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    inter += static_cast<std::size_t>(std::popcount(a.words()[i] & b.words()[i]));
    uni += static_cast<std::size_t>(std::popcount(a.words()[i] | b.words()[i]));
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace vscreen::chem

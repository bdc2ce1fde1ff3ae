#include "vscreen/chem/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>

namespace vscreen::chem {
namespace {

struct ValenceInfo {
  std::array<int, 3> valences;  // ascending, 0-padded
  int count;
};

// Standard valences for the organic subset.
std::optional<ValenceInfo> organic_valences(const std::string& elem) {
  if (elem == "B") return ValenceInfo{{3, 0, 0}, 1};
  if (elem == "C") return ValenceInfo{{4, 0, 0}, 1};
  if (elem == "N") return ValenceInfo{{3, 5, 0}, 2};
  if (elem == "O") return ValenceInfo{{2, 0, 0}, 1};
  if (elem == "P") return ValenceInfo{{3, 5, 0}, 2};
  if (elem == "S") return ValenceInfo{{2, 4, 6}, 3};
  if (elem == "F" || elem == "Cl" || elem == "Br" || elem == "I")
    return ValenceInfo{{1, 0, 0}, 1};
  return std::nullopt;
}

bool organic_subset(const std::string& elem) {
  return organic_valences(elem).has_value();
}

// Elements accepted inside brackets. Deliberately excludes metals: compounds
// outside this table fail featurization, and the loader reports them as such.
const std::set<std::string> kBracketElements = {
    "H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Se", "Br", "I"};

bool aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

// Extra valence consumed by the aromatic system in a Kekule structure:
// carbon carries a ring double bond, pyridine-type N/P/B (two connections)
// does too, and divalent O/S contribute lone pairs only. An atom that
// already has an exocyclic double or triple bond (c(=O) in purines) spends
// its pi electron there instead.
int aromatic_bump(const std::string& elem, std::size_t degree,
                  bool has_multiple_bond) {
  if (has_multiple_bond) return 0;
  if (elem == "C") return 1;
  if (elem == "N" || elem == "P" || elem == "B") return degree == 2 ? 1 : 0;
  return 0;
}

struct RingOpen {
  std::size_t atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Molecule run() {
    if (s_.empty()) throw SmilesError("empty SMILES", 0);
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (static_cast<unsigned char>(s_[i]) > 127)
        throw SmilesError("non-ASCII byte", i);

    while (pos_ < s_.size()) step();

    if (!open_branches_.empty())
      throw SmilesError("unclosed branch", open_branches_.back());
    if (pending_order_)
      throw SmilesError("dangling bond symbol", pending_offset_);
    if (!ring_open_.empty())
      throw SmilesError("unresolved ring closure",
                        ring_open_.begin()->second.offset);
    if (mol_.atoms.empty()) throw SmilesError("no atoms", 0);

    infer_hydrogens();
    mark_ring_membership();
    return mol_;
  }

 private:
  void step() {
    char c = s_[pos_];
    if (c == '(') {
      if (!prev_) throw SmilesError("branch before any atom", pos_);
      if (pending_order_) throw SmilesError("bond symbol before branch", pos_);
      open_branches_.push_back(pos_);
      branch_stack_.push_back(*prev_);
      ++pos_;
    } else if (c == ')') {
      if (branch_stack_.empty()) throw SmilesError("unmatched ')'", pos_);
      if (pending_order_) throw SmilesError("dangling bond symbol", pending_offset_);
      prev_ = branch_stack_.back();
      branch_stack_.pop_back();
      open_branches_.pop_back();
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
               c == '\\') {
      if (pending_order_) throw SmilesError("repeated bond symbol", pos_);
      pending_order_ = bond_order(c);
      pending_offset_ = pos_;
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_closure(c - '0', pos_);
      ++pos_;
    } else if (c == '%') {
      if (pos_ + 2 >= s_.size() ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
        throw SmilesError("malformed %nn ring closure", pos_);
      ring_closure((s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0'), pos_);
      pos_ += 3;
    } else if (c == '[') {
      bracket_atom();
    } else if (std::isupper(static_cast<unsigned char>(c)) ||
               aromatic_symbol(c)) {
      plain_atom();
    } else {
      throw SmilesError(std::string("unexpected character '") + c + "'", pos_);
    }
  }

  static BondOrder bond_order(char c) {
    switch (c) {
      case '=': return BondOrder::Double;
      case '#': return BondOrder::Triple;
      case ':': return BondOrder::Aromatic;
      default: return BondOrder::Single;  // '-', '/' and '\' (stereo ignored)
    }
  }

  void plain_atom() {
    std::size_t start = pos_;
    char c = s_[pos_];
    std::string elem;
    bool aromatic = false;
    if (aromatic_symbol(c)) {
      aromatic = true;
      elem = std::string(1, static_cast<char>(std::toupper(c)));
      ++pos_;
    } else {
      elem = std::string(1, c);
      ++pos_;
      // Two-letter organic-subset symbols: Cl, Br.
      if (pos_ < s_.size() && ((elem == "C" && s_[pos_] == 'l') ||
                               (elem == "B" && s_[pos_] == 'r'))) {
        elem += s_[pos_];
        ++pos_;
      }
    }
    if (!organic_subset(elem))
      throw SmilesError("unknown element '" + elem + "'", start);

    Atom a;
    a.element = elem;
    a.aromatic = aromatic;
    a.bracket = false;
    add_atom(a, start);
  }

  void bracket_atom() {
    std::size_t start = pos_;
    ++pos_;  // '['
    // isotope (ignored)
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ >= s_.size()) throw SmilesError("unterminated bracket atom", start);

    std::string elem;
    bool aromatic = false;
    char c = s_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      elem = std::string(1, c);
      ++pos_;
      // any lowercase continuation belongs to the symbol; unknown pairs
      // (metals and the like) then fail the table lookup below
      if (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_]))) {
        elem += s_[pos_];
        ++pos_;
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      aromatic = true;
      if (c == 's' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'e') {
        elem = "Se";
        pos_ += 2;
      } else if (aromatic_symbol(c)) {
        elem = std::string(1, static_cast<char>(std::toupper(c)));
        ++pos_;
      } else {
        throw SmilesError("unknown aromatic symbol", pos_);
      }
    } else {
      throw SmilesError("expected element symbol in bracket", pos_);
    }
    if (!kBracketElements.count(elem))
      throw SmilesError("unknown element '" + elem + "'", start);
    if (elem == "H")
      throw SmilesError("explicit hydrogen atoms are not supported", start);

    // chirality (ignored)
    while (pos_ < s_.size() && s_[pos_] == '@') ++pos_;

    int h_count = 0;
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      h_count = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        h_count = 0;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          h_count = h_count * 10 + (s_[pos_] - '0');
          ++pos_;
        }
      }
    }

    int charge = 0;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      int sign = s_[pos_] == '+' ? 1 : -1;
      char sym = s_[pos_];
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        int mag = 0;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          mag = mag * 10 + (s_[pos_] - '0');
          ++pos_;
        }
        charge = sign * mag;
      } else {
        charge = sign;
        while (pos_ < s_.size() && s_[pos_] == sym) {
          charge += sign;
          ++pos_;
        }
      }
    }
    if (charge < -4 || charge > 4)
      throw SmilesError("formal charge out of range", start);

    // atom class (ignored)
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw SmilesError("malformed atom class", pos_);
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }

    if (pos_ >= s_.size() || s_[pos_] != ']')
      throw SmilesError("unterminated bracket atom", start);
    ++pos_;

    Atom a;
    a.element = elem;
    a.aromatic = aromatic;
    a.formal_charge = charge;
    a.h_count = h_count;
    a.bracket = true;
    add_atom(a, start);
  }

  void add_atom(const Atom& a, std::size_t offset) {
    mol_.atoms.push_back(a);
    atom_offsets_.push_back(offset);
    std::size_t idx = mol_.atoms.size() - 1;
    if (prev_) {
      BondOrder order = resolve_order(pending_order_, *prev_, idx);
      mol_.bonds.push_back({*prev_, idx, order});
    } else if (pending_order_) {
      throw SmilesError("bond symbol before any atom", pending_offset_);
    }
    pending_order_.reset();
    prev_ = idx;
  }

  BondOrder resolve_order(std::optional<BondOrder> specified, std::size_t a,
                          std::size_t b) const {
    if (specified) return *specified;
    if (mol_.atoms[a].aromatic && mol_.atoms[b].aromatic)
      return BondOrder::Aromatic;
    return BondOrder::Single;
  }

  void ring_closure(int number, std::size_t offset) {
    if (!prev_) throw SmilesError("ring closure before any atom", offset);
    auto it = ring_open_.find(number);
    if (it == ring_open_.end()) {
      ring_open_[number] = RingOpen{*prev_, pending_order_, offset};
      pending_order_.reset();
      return;
    }
    RingOpen open = it->second;
    ring_open_.erase(it);
    if (open.atom == *prev_) throw SmilesError("ring closure to self", offset);
    if (open.order && pending_order_ && *open.order != *pending_order_)
      throw SmilesError("conflicting ring bond orders", offset);
    std::optional<BondOrder> specified = open.order ? open.order : pending_order_;
    pending_order_.reset();
    for (const Bond& bond : mol_.bonds) {
      if ((bond.a == open.atom && bond.b == *prev_) ||
          (bond.a == *prev_ && bond.b == open.atom))
        throw SmilesError("duplicate bond via ring closure", offset);
    }
    mol_.bonds.push_back(
        {open.atom, *prev_, resolve_order(specified, open.atom, *prev_)});
  }

  void infer_hydrogens() {
    std::vector<int> bond_sum(mol_.atoms.size(), 0);
    std::vector<std::size_t> degree(mol_.atoms.size(), 0);
    std::vector<bool> has_multi(mol_.atoms.size(), false);
    for (const Bond& b : mol_.bonds) {
      int order = b.order == BondOrder::Aromatic ? 1 : static_cast<int>(b.order);
      bond_sum[b.a] += order;
      bond_sum[b.b] += order;
      if (b.order == BondOrder::Double || b.order == BondOrder::Triple) {
        has_multi[b.a] = true;
        has_multi[b.b] = true;
      }
      ++degree[b.a];
      ++degree[b.b];
    }
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      Atom& a = mol_.atoms[i];
      if (a.bracket) continue;  // bracket atoms carry explicit H counts
      auto vi = organic_valences(a.element);
      int sum = bond_sum[i];
      if (a.aromatic) sum += aromatic_bump(a.element, degree[i], has_multi[i]);
      int vmax = vi->valences[vi->count - 1];
      if (sum > vmax)
        throw SmilesError("valence exceeded on " + a.element, atom_offsets_[i]);
      int v = vmax;
      for (int k = 0; k < vi->count; ++k) {
        if (vi->valences[k] >= sum) {
          v = vi->valences[k];
          break;
        }
      }
      a.h_count = v - sum;
    }
  }

  // An atom is a ring member iff it has an incident non-bridge edge.
  void mark_ring_membership() {
    const std::size_t n = mol_.atoms.size();
    auto adj = mol_.adjacency();
    std::vector<int> entry(n, -1), low(n, 0);
    int timer = 0;
    // iterative DFS over (atom, incoming bond, next adjacency slot)
    struct Frame {
      std::size_t atom;
      std::size_t in_bond;
      std::size_t next;
    };
    std::vector<bool> bridge(mol_.bonds.size(), false);
    for (std::size_t root = 0; root < n; ++root) {
      if (entry[root] >= 0) continue;
      std::vector<Frame> stack{{root, static_cast<std::size_t>(-1), 0}};
      entry[root] = low[root] = timer++;
      while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < adj[f.atom].size()) {
          std::size_t bi = adj[f.atom][f.next++];
          if (bi == f.in_bond) continue;
          const Bond& b = mol_.bonds[bi];
          std::size_t to = b.a == f.atom ? b.b : b.a;
          if (entry[to] < 0) {
            entry[to] = low[to] = timer++;
            stack.push_back({to, bi, 0});
          } else {
            low[f.atom] = std::min(low[f.atom], entry[to]);
          }
        } else {
          if (f.in_bond != static_cast<std::size_t>(-1)) {
            const Bond& b = mol_.bonds[f.in_bond];
            std::size_t parent = b.a == f.atom ? b.b : b.a;
            low[parent] = std::min(low[parent], low[f.atom]);
            if (low[f.atom] > entry[parent]) bridge[f.in_bond] = true;
          }
          stack.pop_back();
        }
      }
    }
    for (std::size_t bi = 0; bi < mol_.bonds.size(); ++bi) {
      if (!bridge[bi]) {
        mol_.atoms[mol_.bonds[bi].a].ring_member = true;
        mol_.atoms[mol_.bonds[bi].b].ring_member = true;
      }
    }
    // isolated atoms and pure trees keep ring_member = false
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Molecule mol_;
  std::vector<std::size_t> atom_offsets_;
  std::optional<std::size_t> prev_;
  std::vector<std::size_t> branch_stack_;
  std::vector<std::size_t> open_branches_;
  std::optional<BondOrder> pending_order_;
  std::size_t pending_offset_ = 0;
  std::map<int, RingOpen> ring_open_;
};

// --- writer ---

// Would the plain-atom hydrogen inference reproduce this atom's state? If so
// it can be written bare, otherwise it needs brackets.
bool writable_bare(const Molecule& m, std::size_t idx,
                   const std::vector<int>& bond_sum,
                   const std::vector<std::size_t>& degree,
                   const std::vector<bool>& has_multi) {
  const Atom& a = m.atoms[idx];
  if (a.formal_charge != 0) return false;
  if (!organic_subset(a.element)) return false;
  if (a.aromatic && !aromatic_symbol(
                        static_cast<char>(std::tolower(a.element[0]))))
    return false;
  if (a.aromatic && a.element.size() > 1) return false;  // Cl/Br never aromatic
  auto vi = organic_valences(a.element);
  int sum = bond_sum[idx];
  if (a.aromatic) sum += aromatic_bump(a.element, degree[idx], has_multi[idx]);
  int vmax = vi->valences[vi->count - 1];
  if (sum > vmax) return false;
  int v = vmax;
  for (int k = 0; k < vi->count; ++k) {
    if (vi->valences[k] >= sum) {
      v = vi->valences[k];
      break;
    }
  }
  return v - sum == a.h_count;
}

std::string atom_token(const Molecule& m, std::size_t idx,
                       const std::vector<int>& bond_sum,
                       const std::vector<std::size_t>& degree,
                       const std::vector<bool>& has_multi) {
  const Atom& a = m.atoms[idx];
  std::string sym = a.element;
  if (a.aromatic)
    for (char& c : sym) c = static_cast<char>(std::tolower(c));
  if (writable_bare(m, idx, bond_sum, degree, has_multi)) return sym;
  std::string out = "[" + sym;
  if (a.h_count == 1) out += "H";
  else if (a.h_count > 1) out += "H" + std::to_string(a.h_count);
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    int mag = std::abs(a.formal_charge);
    if (mag > 1) out += std::to_string(mag);
  }
  out += "]";
  return out;
}

std::string bond_token(const Molecule& m, const Bond& b) {
  bool both_aromatic = m.atoms[b.a].aromatic && m.atoms[b.b].aromatic;
  switch (b.order) {
    case BondOrder::Single: return both_aromatic ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

}  // namespace

Molecule parse_smiles(const std::string& smiles) {
  return Parser(smiles).run();
}

std::string write_smiles(const Molecule& m) {
  if (m.atoms.empty())
    throw SmilesError("cannot serialize an empty molecule", 0);
  const std::size_t n = m.atoms.size();
  auto adj = m.adjacency();

  std::vector<int> bond_sum(n, 0);
  std::vector<std::size_t> degree(n, 0);
  std::vector<bool> has_multi(n, false);
  for (const Bond& b : m.bonds) {
    int order = b.order == BondOrder::Aromatic ? 1 : static_cast<int>(b.order);
    bond_sum[b.a] += order;
    bond_sum[b.b] += order;
    if (b.order == BondOrder::Double || b.order == BondOrder::Triple) {
      has_multi[b.a] = true;
      has_multi[b.b] = true;
    }
    ++degree[b.a];
    ++degree[b.b];
  }

  // DFS spanning tree from atom 0; back edges become ring closures.
  std::vector<bool> visited(n, false);
  std::vector<bool> bond_used(m.bonds.size(), false);
  std::vector<std::vector<std::size_t>> children(n);       // tree bonds, in order
  std::vector<std::vector<std::size_t>> ring_bonds(n);     // back-edge bonds at atom
  visited[0] = true;
  struct Frame {
    std::size_t atom;
    std::size_t slot = 0;
  };
  std::vector<Frame> frames{{0, 0}};
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.slot < adj[f.atom].size()) {
      std::size_t bi = adj[f.atom][f.slot++];
      if (bond_used[bi]) continue;
      const Bond& b = m.bonds[bi];
      std::size_t to = b.a == f.atom ? b.b : b.a;
      bond_used[bi] = true;
      if (!visited[to]) {
        visited[to] = true;
        children[f.atom].push_back(bi);
        frames.push_back({to, 0});
      } else {
        ring_bonds[f.atom].push_back(bi);
        ring_bonds[to].push_back(bi);
      }
    } else {
      frames.pop_back();
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!visited[i])
      throw SmilesError("cannot serialize a disconnected molecule", 0);

  // Ring closure numbers: smallest free digit, released when closed.
  std::vector<int> closure_number(m.bonds.size(), -1);
  std::vector<bool> number_in_use(100, false);
  std::vector<bool> closure_seen(m.bonds.size(), false);

  std::string out;
  struct EmitFrame {
    std::size_t atom;
    std::size_t child = 0;
    bool opened_paren = false;
  };
  std::vector<EmitFrame> emit{{0, 0, false}};
  // emit atom 0 token up front; children loop below handles the rest
  auto emit_atom = [&](std::size_t atom) {
    out += atom_token(m, atom, bond_sum, degree, has_multi);
    for (std::size_t bi : ring_bonds[atom]) {
      if (!closure_seen[bi]) {
        closure_seen[bi] = true;
        int num = 1;
        while (number_in_use[num]) ++num;
        number_in_use[num] = true;
        closure_number[bi] = num;
        out += bond_token(m, m.bonds[bi]);
      } else {
        number_in_use[closure_number[bi]] = false;
        out += bond_token(m, m.bonds[bi]);
      }
      int num = closure_number[bi];
      if (num >= 10) out += "%" + std::to_string(num);
      else out += std::to_string(num);
    }
  };
  emit_atom(0);
  while (!emit.empty()) {
    EmitFrame& f = emit.back();
    if (f.child < children[f.atom].size()) {
      std::size_t bi = children[f.atom][f.child++];
      bool last = f.child == children[f.atom].size();
      const Bond& b = m.bonds[bi];
      std::size_t to = b.a == f.atom ? b.b : b.a;
      bool paren = !last;
      if (paren) out += "(";
      out += bond_token(m, b);
      emit_atom(to);
      emit.push_back({to, 0, paren});
    } else {
      if (f.opened_paren) out += ")";
      emit.pop_back();
    }
  }
  return out;
}

}  // namespace vscreen::chem

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "copperbolt/util.hpp"

namespace copperbolt::cnf {

// DIMACS-style clause: nonzero signed literals, variable ids are 1-based.
using Clause = std::vector<int>;

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  bool operator==(const CnfFormula&) const = default;
};

// Mapping from semantic bits to CNF variables. Index 0 is always the LSB.
// Variable numbering is deterministic: p bits take ids 1..k, q bits k+1..2k,
// and every later variable (product bits, adder auxiliaries, d bits) follows
// in construction order.
struct VarMap {
  std::vector<int> p_bits;
  std::vector<int> q_bits;
  std::vector<int> d_bits;        // filled by encode_d_equation
  std::vector<int> product_bits;  // 2k entries
  int aux_count = 0;
  Int modulus;  // carried along for the DIMACS header and the solve pipeline
};

struct BadBitlength : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConflictingLeak : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LeakTarget { kP, kQ, kD };

struct Leak {
  LeakTarget target;
  std::size_t index;
  bool value;

  bool operator==(const Leak&) const = default;
};

// Schoolbook k x k multiplier in CNF: AND partial products, full/half adder
// columns summed LSB-first, one Tseytin variable per gate output. Product
// bits are fixed to N with unit clauses, and p0, q0, p_{k-1}, q_{k-1} are
// fixed to true. Satisfying assignments correspond exactly to odd k-bit
// pairs (p, q), both with top bit set, with p * q == N.
std::pair<CnfFormula, VarMap> encode_factoring(const Int& N, std::size_t k);

// One unit clause per leak, duplicates skipped. Throws ConflictingLeak when
// the same (target, index) appears with both polarities.
void add_leak_units(CnfFormula& formula, const VarMap& vm,
                    const std::vector<Leak>& leaks);

// floor(2N/3 + 1), the e=3 approximation of the decryption exponent.
Int d_tilde(const Int& N);

struct DPrefix {
  std::size_t l = 0;   // number of guaranteed high bits of d
  std::string prefix;  // those bits, MSB first, '0'/'1'; length l
};

// Common high bits of the n-bit strings of d_tilde(N) and
// d_tilde(N) - isqrt(2N). The true d for e=3 is guaranteed to share exactly
// these upper l bits.
DPrefix fixed_high_bits_of_d(const Int& N, std::size_t n);

// Adds fresh d variables (n = bitlength of N) and ripple-carry adders
// computing d + (d<<1) + (p<<1) + (q<<1); the output bits are fixed by unit
// clauses to 2N+3, and the guaranteed high bits of d are fixed to the
// d_tilde prefix.
void encode_d_equation(CnfFormula& formula, VarMap& vm, const Int& N);

// DIMACS text. When a VarMap is given, comment lines carrying the bit->var
// map precede the header:
//   c pbit <i> <var> / c qbit <i> <var> / c dbit <i> <var>
//   c nbits <k> <n>
//   c modulus <hex>
std::string write_dimacs(const CnfFormula& formula, const VarMap* vm = nullptr);

// Parses DIMACS, including the varmap comment convention above.
std::pair<CnfFormula, std::optional<VarMap>> read_dimacs(std::istream& in);
std::pair<CnfFormula, std::optional<VarMap>> read_dimacs(const std::string& text);

}  // namespace copperbolt::cnf

#include "copperbolt/cnfenc.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "copperbolt/numtheory.hpp"

namespace copperbolt::cnf {

namespace {

// Tseytin gate emitter. Every helper returns the id of a fresh variable
// constrained to equal the gate's output.
struct GateBuilder {
  CnfFormula& f;

  int fresh() { return ++f.num_vars; }

  void unit(int lit) { f.clauses.push_back({lit}); }

  int and_gate(int x, int y) {
    const int t = fresh();
    f.clauses.push_back({-t, x});
    f.clauses.push_back({-t, y});
    f.clauses.push_back({t, -x, -y});
    return t;
  }

  // s <-> x XOR y
  int xor_gate(int x, int y) {
    const int s = fresh();
    f.clauses.push_back({-s, x, y});
    f.clauses.push_back({-s, -x, -y});
    f.clauses.push_back({s, -x, y});
    f.clauses.push_back({s, x, -y});
    return s;
  }

  // s <-> x XOR y XOR z
  int xor3_gate(int x, int y, int z) {
    const int s = fresh();
    f.clauses.push_back({-s, x, y, z});
    f.clauses.push_back({-s, x, -y, -z});
    f.clauses.push_back({-s, -x, y, -z});
    f.clauses.push_back({-s, -x, -y, z});
    f.clauses.push_back({s, -x, y, z});
    f.clauses.push_back({s, x, -y, z});
    f.clauses.push_back({s, x, y, -z});
    f.clauses.push_back({s, -x, -y, -z});
    return s;
  }

  // c <-> at least two of x, y, z
  int majority_gate(int x, int y, int z) {
    const int c = fresh();
    f.clauses.push_back({-c, x, y});
    f.clauses.push_back({-c, x, z});
    f.clauses.push_back({-c, y, z});
    f.clauses.push_back({c, -x, -y});
    f.clauses.push_back({c, -x, -z});
    f.clauses.push_back({c, -y, -z});
    return c;
  }

  // (sum, carry) of a half adder
  std::pair<int, int> half_adder(int x, int y) {
    return {xor_gate(x, y), and_gate(x, y)};
  }

  // (sum, carry) of a full adder
  std::pair<int, int> full_adder(int x, int y, int z) {
    return {xor3_gate(x, y, z), majority_gate(x, y, z)};
  }
};

}  // namespace

std::pair<CnfFormula, VarMap> encode_factoring(const Int& N, std::size_t k) {
  if (N <= 0 || N % 2 == 0) {
    throw std::invalid_argument("encode_factoring: N must be positive and odd");
  }
  const std::size_t n = bit_length(N);
  if (k < 2 || n < 2 * k - 1 || n > 2 * k) {
    throw BadBitlength("modulus has " + std::to_string(n) +
                       " bits, incompatible with factor bitlength " +
                       std::to_string(k));
  }

  CnfFormula formula;
  VarMap vm;
  vm.modulus = N;
  formula.num_vars = static_cast<int>(2 * k);
  for (std::size_t i = 0; i < k; ++i) vm.p_bits.push_back(static_cast<int>(i + 1));
  for (std::size_t i = 0; i < k; ++i) vm.q_bits.push_back(static_cast<int>(k + i + 1));

  GateBuilder gates{formula};

  // Partial products, grouped by output column.
  std::vector<std::deque<int>> columns(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      columns[i + j].push_back(gates.and_gate(vm.p_bits[i], vm.q_bits[j]));
    }
  }

  // Column-wise reduction, LSB first. Sums stay in their column, carries move
  // one column up. The product of two k-bit numbers fits in 2k bits, so a
  // carry out of the top column cannot occur under any consistent assignment;
  // it is still pinned to false to aid propagation.
  std::deque<int> overflow;
  for (std::size_t c = 0; c < 2 * k; ++c) {
    auto& col = columns[c];
    while (col.size() >= 3) {
      const int x = col.front(); col.pop_front();
      const int y = col.front(); col.pop_front();
      const int z = col.front(); col.pop_front();
      auto [sum, carry] = gates.full_adder(x, y, z);
      col.push_back(sum);
      (c + 1 < 2 * k ? columns[c + 1] : overflow).push_back(carry);
    }
    if (col.size() == 2) {
      const int x = col.front(); col.pop_front();
      const int y = col.front(); col.pop_front();
      auto [sum, carry] = gates.half_adder(x, y);
      col.push_back(sum);
      (c + 1 < 2 * k ? columns[c + 1] : overflow).push_back(carry);
    }
    if (col.empty()) {
      // No partial products ever reach this column; its product bit is a
      // constant zero.
      const int zero = gates.fresh();
      gates.unit(-zero);
      col.push_back(zero);
    }
    vm.product_bits.push_back(col.front());
  }
  for (int bit : overflow) gates.unit(-bit);

  // Fix the product to N.
  for (std::size_t c = 0; c < 2 * k; ++c) {
    gates.unit(bit_of(N, c) ? vm.product_bits[c] : -vm.product_bits[c]);
  }
  // p and q odd, both of full bitlength.
  gates.unit(vm.p_bits[0]);
  gates.unit(vm.q_bits[0]);
  gates.unit(vm.p_bits[k - 1]);
  gates.unit(vm.q_bits[k - 1]);

  vm.aux_count = formula.num_vars - static_cast<int>(2 * k);
  return {std::move(formula), std::move(vm)};
}

namespace {

int leak_variable(const VarMap& vm, const Leak& leak) {
  const std::vector<int>* bits = nullptr;
  switch (leak.target) {
    case LeakTarget::kP: bits = &vm.p_bits; break;
    case LeakTarget::kQ: bits = &vm.q_bits; break;
    case LeakTarget::kD: bits = &vm.d_bits; break;
  }
  if (leak.index >= bits->size()) {
    throw std::out_of_range("leak index " + std::to_string(leak.index) +
                            " out of range");
  }
  return (*bits)[leak.index];
}

}  // namespace

void add_leak_units(CnfFormula& formula, const VarMap& vm,
                    const std::vector<Leak>& leaks) {
  std::map<std::pair<int, std::size_t>, bool> seen;
  std::set<int> added;
  for (const Leak& leak : leaks) {
    const auto key = std::make_pair(static_cast<int>(leak.target), leak.index);
    const auto it = seen.find(key);
    if (it != seen.end()) {
      if (it->second != leak.value) {
        throw ConflictingLeak("bit " + std::to_string(leak.index) +
                              " leaked with both polarities");
      }
      continue;  // identical repeat
    }
    seen.emplace(key, leak.value);
    const int var = leak_variable(vm, leak);
    const int lit = leak.value ? var : -var;
    if (added.insert(lit).second) {
      formula.clauses.push_back({lit});
    }
  }
}

Int d_tilde(const Int& N) {
  return (2 * N + 3) / 3;  // floor(2N/3 + 1)
}

namespace {

std::string bitstring(const Int& v, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if (bit_of(v, n - 1 - i)) s[i] = '1';
  }
  return s;
}

}  // namespace

DPrefix fixed_high_bits_of_d(const Int& N, std::size_t n) {
  const Int upper = d_tilde(N);
  const Int lower = upper - nt::isqrt(2 * N);
  const std::string a = bitstring(upper, n);
  const std::string b = bitstring(lower, n);
  DPrefix out;
  while (out.l < n && a[out.l] == b[out.l]) ++out.l;
  out.prefix = a.substr(0, out.l);
  return out;
}

namespace {

// Ripple-carry adder over variable ids; returns width+1 sum bits (carry out
// last). carry_in is a variable pinned to false by the caller.
std::vector<int> ripple_add(GateBuilder& gates, const std::vector<int>& a,
                            const std::vector<int>& b, int false_var) {
  const std::size_t width = std::max(a.size(), b.size());
  std::vector<int> sum;
  int carry = false_var;
  for (std::size_t i = 0; i < width; ++i) {
    const int x = i < a.size() ? a[i] : false_var;
    const int y = i < b.size() ? b[i] : false_var;
    auto [s, c] = gates.full_adder(x, y, carry);
    sum.push_back(s);
    carry = c;
  }
  sum.push_back(carry);
  return sum;
}

}  // namespace

void encode_d_equation(CnfFormula& formula, VarMap& vm, const Int& N) {
  if (vm.p_bits.empty() || vm.q_bits.empty()) {
    throw std::invalid_argument("encode_d_equation: factoring encoding missing");
  }
  if (!vm.d_bits.empty()) {
    throw std::invalid_argument("encode_d_equation: d already encoded");
  }
  GateBuilder gates{formula};
  const std::size_t n = bit_length(N);
  for (std::size_t i = 0; i < n; ++i) vm.d_bits.push_back(gates.fresh());

  const int false_var = gates.fresh();
  gates.unit(-false_var);

  auto shifted = [&](const std::vector<int>& bits) {
    std::vector<int> out{false_var};
    out.insert(out.end(), bits.begin(), bits.end());
    return out;
  };

  // d + (d << 1) + (p << 1) + (q << 1) == 2N + 3
  const std::vector<int> s1 = ripple_add(gates, vm.d_bits, shifted(vm.d_bits), false_var);
  const std::vector<int> s2 = ripple_add(gates, shifted(vm.p_bits), shifted(vm.q_bits), false_var);
  const std::vector<int> total = ripple_add(gates, s1, s2, false_var);

  const Int target = 2 * N + 3;
  for (std::size_t i = 0; i < total.size(); ++i) {
    gates.unit(bit_of(target, i) ? total[i] : -total[i]);
  }

  const DPrefix prefix = fixed_high_bits_of_d(N, n);
  for (std::size_t i = 0; i < prefix.l; ++i) {
    const int var = vm.d_bits[n - 1 - i];
    gates.unit(prefix.prefix[i] == '1' ? var : -var);
  }

  vm.aux_count = formula.num_vars - static_cast<int>(vm.p_bits.size()) -
                 static_cast<int>(vm.q_bits.size()) -
                 static_cast<int>(vm.d_bits.size());
}

std::string write_dimacs(const CnfFormula& formula, const VarMap* vm) {
  std::ostringstream out;
  if (vm != nullptr) {
    for (std::size_t i = 0; i < vm->p_bits.size(); ++i) {
      out << "c pbit " << i << " " << vm->p_bits[i] << "\n";
    }
    for (std::size_t i = 0; i < vm->q_bits.size(); ++i) {
      out << "c qbit " << i << " " << vm->q_bits[i] << "\n";
    }
    for (std::size_t i = 0; i < vm->d_bits.size(); ++i) {
      out << "c dbit " << i << " " << vm->d_bits[i] << "\n";
    }
    out << "c nbits " << vm->p_bits.size() << " " << bit_length(vm->modulus) << "\n";
    out << "c modulus " << to_hex(vm->modulus) << "\n";
  }
  out << "p cnf " << formula.num_vars << " " << formula.clauses.size() << "\n";
  for (const Clause& clause : formula.clauses) {
    for (int lit : clause) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

std::pair<CnfFormula, std::optional<VarMap>> read_dimacs(std::istream& in) {
  CnfFormula formula;
  VarMap vm;
  bool saw_map = false;
  bool saw_header = false;
  std::size_t expected_clauses = 0;
  std::string line;
  auto set_bit = [](std::vector<int>& bits, std::size_t index, int var) {
    if (bits.size() <= index) bits.resize(index + 1, 0);
    bits[index] = var;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "c") {
      std::string kind;
      ls >> kind;
      if (kind == "pbit" || kind == "qbit" || kind == "dbit") {
        std::size_t index;
        int var;
        if (ls >> index >> var) {
          saw_map = true;
          if (kind == "pbit") set_bit(vm.p_bits, index, var);
          if (kind == "qbit") set_bit(vm.q_bits, index, var);
          if (kind == "dbit") set_bit(vm.d_bits, index, var);
        }
      } else if (kind == "modulus") {
        std::string hex;
        if (ls >> hex) {
          saw_map = true;
          vm.modulus = from_hex(hex);
        }
      }
      continue;
    }
    if (tok == "p") {
      std::string format;
      ls >> format >> formula.num_vars >> expected_clauses;
      if (format != "cnf") throw std::invalid_argument("not a DIMACS cnf file");
      saw_header = true;
      continue;
    }
    if (!saw_header) throw std::invalid_argument("clause before DIMACS header");
    Clause clause;
    int lit = std::stoi(tok);
    while (lit != 0) {
      clause.push_back(lit);
      if (!(ls >> lit)) throw std::invalid_argument("clause missing 0 terminator");
    }
    formula.clauses.push_back(std::move(clause));
  }
  if (!saw_header) throw std::invalid_argument("missing DIMACS header");
  if (formula.clauses.size() != expected_clauses) {
    throw std::invalid_argument("clause count does not match header");
  }
  if (!saw_map) return {std::move(formula), std::nullopt};
  return {std::move(formula), std::move(vm)};
}

std::pair<CnfFormula, std::optional<VarMap>> read_dimacs(const std::string& text) {
  std::istringstream in(text);
  return read_dimacs(in);
}

}  // namespace copperbolt::cnf

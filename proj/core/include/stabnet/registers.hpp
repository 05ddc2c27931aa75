#pragma once

#include <cstddef>
#include <vector>

namespace stabnet {

/// One ancilla register: the finite stand-in for an l^2(N) factor at a lattice site.
struct Register {
  long site = 0;
  std::size_t dim = 1;
  friend bool operator==(const Register&, const Register&) = default;
};

/// Ordered list of registers. Dimensions may differ from register to register.
struct RegisterShape {
  std::vector<Register> registers;

  RegisterShape() = default;
  explicit RegisterShape(std::vector<Register> regs);
  /// One register of dimension `dim` on each site lo..hi.
  static RegisterShape uniform(long lo, long hi, std::size_t dim);

  std::size_t size() const { return registers.size(); }
  std::size_t total_dim() const;
  std::vector<std::size_t> dims() const;
  friend bool operator==(const RegisterShape&, const RegisterShape&) = default;
};

}  // namespace stabnet

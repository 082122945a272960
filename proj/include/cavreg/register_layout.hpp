#pragma once

#include <cstddef>
#include <vector>

#include "cavreg/cavity_model.hpp"

namespace cavreg {

struct RegisterAtom {
  std::size_t index;
  AtomPosition position;
};

// Atoms in addressing order; per-atom efficiency/fidelity are filled in by
// register_report and may be left empty for layouts that only carry positions.
struct RegisterLayout {
  std::vector<RegisterAtom> atoms;
  std::vector<double> per_atom_efficiency;
  std::vector<double> per_atom_fidelity;

  std::size_t size() const noexcept { return atoms.size(); }
  void validate() const;

  // n atoms on the x-axis, symmetric about the mode centre at the given pitch.
  static RegisterLayout centered_row(std::size_t n, double pitch);
  static RegisterLayout from_positions(const std::vector<AtomPosition>& positions);
};

}  // namespace cavreg

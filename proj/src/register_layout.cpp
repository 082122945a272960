#include "cavreg/register_layout.hpp"

#include <algorithm>

#include "cavreg/error.hpp"

namespace cavreg {

void RegisterLayout::validate() const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i].index == atoms[j].index)
        fail(ErrorKind::invalid_parameters, "register atom indices must be unique");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!per_atom_efficiency.empty() &&
      (per_atom_efficiency.size() != atoms.size() ||
       !std::all_of(per_atom_efficiency.begin(), per_atom_efficiency.end(), in_unit)))
    fail(ErrorKind::invalid_parameters, "per-atom efficiencies must be in [0,1], one per atom");
  if (!per_atom_fidelity.empty() &&
      (per_atom_fidelity.size() != atoms.size() ||
       !std::all_of(per_atom_fidelity.begin(), per_atom_fidelity.end(), in_unit)))
    fail(ErrorKind::invalid_parameters, "per-atom fidelities must be in [0,1], one per atom");
}

RegisterLayout RegisterLayout::centered_row(std::size_t n, double pitch) {
  RegisterLayout layout;
  const double x0 = -0.5 * static_cast<double>(n == 0 ? 0 : n - 1) * pitch;
  for (std::size_t i = 0; i < n; ++i)
    layout.atoms.push_back({i, {x0 + static_cast<double>(i) * pitch, 0.0}});
  return layout;
}

RegisterLayout RegisterLayout::from_positions(const std::vector<AtomPosition>& positions) {
  RegisterLayout layout;
  for (std::size_t i = 0; i < positions.size(); ++i) layout.atoms.push_back({i, positions[i]});
  return layout;
}

}  // namespace cavreg

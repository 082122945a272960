#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavreg/ape_engine.hpp"

namespace cavreg {

enum class Axis { X = 0, Y = 1, Z = 2 };

// Signal-photon basis paired with the atomic readout basis. Only matched
// pairs (XX, YY, ZZ) are measurable here.
struct BasisPair {
  Axis photon = Axis::Z;
  Axis atom = Axis::Z;

  bool matched() const noexcept { return photon == atom; }
  std::string label() const;  // "XX", "YY", "ZZ", "XZ", ...
  static std::optional<BasisPair> parse(const std::string& label);

  friend bool operator==(const BasisPair&, const BasisPair&) = default;
};

inline constexpr std::array<BasisPair, 3> matched_bases{
    BasisPair{Axis::X, Axis::X}, BasisPair{Axis::Y, Axis::Y}, BasisPair{Axis::Z, Axis::Z}};

// "+" eigenstate labels: atom up / up_x / up_y; photon L / H / D. With these
// labels the Bell fidelity is (1 + S_xx + S_yy - S_zz) / 4.
char photon_label(Axis axis, bool plus) noexcept;
char readout_label(bool atom_plus) noexcept;  // L for atom "+", R otherwise

// Outcome order: (atom+, photon+), (atom+, photon-), (atom-, photon+), (atom-, photon-).
using JointProbabilities = std::array<double, 4>;

JointProbabilities joint_probabilities(const TwoQubitState& state, BasisPair basis);
double correlation(const JointProbabilities& p) noexcept;  // P++ - P+- - P-+ + P--

struct ClickRecord {
  std::size_t atom_index = 0;
  BasisPair basis;
  bool signal_plus = false;
  bool readout_plus = false;  // atomic "+" outcome, read out as an L photon
  double detection_time = 0.0;
  std::uint64_t trial_id = 0;
};

std::vector<ClickRecord> sample_clicks(const TwoQubitState& state, BasisPair basis,
                                       double efficiency, std::size_t attempts,
                                       const PhotonEnvelope& envelope, std::uint64_t seed,
                                       std::size_t atom_index = 0);

struct TomographyResult {
  std::array<double, 3> stokes{};  // S_xx, S_yy, S_zz
  double fidelity = 0.0;
  double std_error = 0.0;
  std::array<std::size_t, 3> clicks_per_basis{};
};

double fidelity_from_stokes(const std::array<double, 3>& stokes) noexcept;

// Stokes parameters from matched-basis click counts; std_error from
// independent binomial errors on the four cells, in quadrature.
TomographyResult estimate(const std::vector<ClickRecord>& records);

// Text row: atom_index,basis,signal,readout,time_ns,trial_id
std::string to_csv_row(const ClickRecord& record);
ClickRecord parse_csv_row(const std::string& row);

struct ConsistencyCase {
  double exact_fidelity;
  TomographyResult estimate;
};

// Samples every state in all three bases and estimates its fidelity.
std::vector<ConsistencyCase> tomography_consistency(const std::vector<TwoQubitState>& states,
                                                    std::size_t clicks_per_basis,
                                                    const PhotonEnvelope& envelope,
                                                    std::uint64_t seed);

namespace serial {
std::vector<ConsistencyCase> tomography_consistency(const std::vector<TwoQubitState>& states,
                                                    std::size_t clicks_per_basis,
                                                    const PhotonEnvelope& envelope,
                                                    std::uint64_t seed);
}

struct SinusoidFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double angular_frequency = 0.0;
  double phase = 0.0;  // y = offset + amplitude * cos(w T - phase)
  double rms_residual = 0.0;

  double period() const;
  double visibility() const { return amplitude / offset; }
};

// Least-squares sinusoid with free frequency (variable projection over w).
SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y);

struct PhaseScanPoint {
  double T;
  double p_plus_given_L;   // p(H|L) for an X scan, p(D|L) for a Y scan
  double p_minus_given_L;
};

struct PhaseScanResult {
  std::vector<PhaseScanPoint> points;
  SinusoidFit fit;
  double T_opt = 0.0;
};

// Rotation phase theta = 2 omega_L T on the atom before Z readout; the signal
// photon is measured along `signal_axis` (X or Y). clicks_per_point == 0
// evaluates the exact Born-rule curve.
PhaseScanResult phase_scan(const TwoQubitState& state_before_rotation,
                           const std::vector<double>& T_range, double omega_L,
                           std::size_t clicks_per_point, std::uint64_t seed,
                           Axis signal_axis = Axis::X);

enum class WindowKind { signal, readout };

struct BasisSetting {
  double time;          // start of the detection window
  std::size_t atom;
  WindowKind kind;
  Axis photon_basis;    // readout windows are always circular (Z)
};

struct ScheduleTiming {
  double slot = 15e-6;
  double rotation_gap = 30e-6;   // last signal window to first readout window
  double window = 1.25e-6;
  double switch_latency = 1e-6;
};

std::vector<BasisSetting> basis_switch_schedule(std::size_t n_atoms, Axis signal_basis,
                                                const ScheduleTiming& timing = {});

// Smallest idle time between the end of a window and the next window whose
// basis differs; +inf if the basis never changes.
double min_switch_gap(const std::vector<BasisSetting>& schedule, double window);

}  // namespace cavreg

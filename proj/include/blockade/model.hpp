#pragma once

#include <string_view>

#include "blockade/fock.hpp"
#include "blockade/types.hpp"

namespace blockade {

// Three Hamiltonian families, all with Kerr coefficient chi > 0:
//   TwoPhotonDrive: omega n + chi (n - k)(n - l) + eps (a^2 + a^dag^2) + sigma
//     The (k, l) tuning makes levels k and l degenerate so the two-photon
//     drive resonantly couples them and blockades the rest.
//   SinglePhotonDrive:        chi n (n - 1) + eps (a + a^dag)
//   SinglePhotonDriveShifted: chi n (n - 2) + eps (a + a^dag)
enum class ModelKind { TwoPhotonDrive, SinglePhotonDrive, SinglePhotonDriveShifted };

struct ModelSpec {
  ModelKind kind = ModelKind::TwoPhotonDrive;
  int k = 0;
  int l = 2;
  double chi = 30.0;
  double epsilon = 5.0;
  // Extra omega n + sigma I terms for detuned scans; only meaningful for
  // the two-photon-driven family and zero on resonance.
  double omega_tune = 0.0;
  double sigma_tune = 0.0;

  // Numbered presets: 1 -> (k,l) = (0,2), 2 -> (1,3), 5 -> (0,1),
  // 3 -> single-photon drive, 3p -> same Hamiltonian (two-photon loss is a
  // rate choice), 4 -> shifted single-photon drive, "kl:K,L" -> explicit
  // tuning. Throws ConfigError on anything else.
  static ModelSpec preset(std::string_view id, double chi = 30.0,
                          double epsilon = 5.0);
};

void validate(const ModelSpec& spec);

OperatorMatrix hamiltonian_kl(FockSpace space, const ModelSpec& spec);
OperatorMatrix hamiltonian_usual(FockSpace space, const ModelSpec& spec);
OperatorMatrix hamiltonian(FockSpace space, const ModelSpec& spec);

// Raw cavity-qubit parameters feeding the dispersive-limit reduction.
struct PhysicalParams {
  double omega_cav = 0.0;
  double omega_q = 0.0;
  double g = 0.0;
  double omega_d = 0.0;
  double epsilon0 = 0.0;
  bool qubit_excited = false;  // drive strength picks up (1 - lambda^2) instead
};

struct DispersiveParams {
  PhysicalParams raw;
  int k = 0;
  int l = 2;
  double detuning = 0.0;     // omega_q - omega_cav
  double lambda = 0.0;       // g / detuning
  double eta = 0.0;          // -g lambda (1 - lambda^2)
  double chi = 0.0;          // -g lambda^3
  double epsilon_eff = 0.0;  // (1 +- lambda^2) epsilon0
  double omega_kl = 0.0;
  double sigma_kl = 0.0;

  ModelSpec to_model_spec() const;
};

// Effective-model parameters in the dispersive regime. Chi > 0 needs
// lambda < 0 (cavity above qubit). |lambda| > 0.3 is outside the regime and
// throws; |lambda| > 0.1 warns. g = 0 or detuning = 0 are rejected.
DispersiveParams dispersive_map(const PhysicalParams& raw, int k, int l);

// Picks omega_q and omega_d so both tuning terms vanish for the given (k, l)
// at fixed cavity frequency and coupling: omega_kl = sigma_kl = 0.
PhysicalParams tuned_physical_params(double omega_cav, double g,
                                     double epsilon0, int k, int l);

}  // namespace blockade

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockade/liouville.hpp"
#include "blockade/model.hpp"
#include "blockade/types.hpp"

namespace blockade {

enum class RunKind { Evolve, Steady, Wigner, Scan };

enum class InitialFamily {
  Fock,
  Coherent,
  Cat,
  Squeezed,
  DisplacedNumber,
  Thermal,
  PhotonAddedThermal
};

struct InitialSpec {
  InitialFamily family = InitialFamily::Fock;
  int m = 0;
  Cplx alpha{0.0, 0.0};
  double phi = 0.0;
  Cplx xi{0.0, 0.0};
  int n0 = 0;
  double mean_n = 0.0;
};

enum class ScanAxis { EpsilonOverGamma, OmegaOverChi, MeanN, Alpha };

// One fully resolved run description. Every field has a value after
// load_config, so a config plus overrides determines the outputs
// byte-for-byte.
struct ExperimentConfig {
  RunKind kind = RunKind::Steady;
  int dim = 100;
  std::string name;
  bool allow_truncation = false;

  std::string model_preset = "1";
  double chi = 30.0;
  double epsilon = 5.0;
  double omega = 0.0;
  double sigma = 0.0;
  DissipationRates rates;

  InitialSpec initial;

  double t_max = 5.0;
  int samples = 500;
  std::vector<int> manifold;  // empty: model-dependent default

  bool wigner_of_initial = false;
  double q_min = -4.0, q_max = 4.0;
  double p_min = -4.0, p_max = 4.0;
  int q_points = 101, p_points = 101;

  ScanAxis axis = ScanAxis::EpsilonOverGamma;
  double from = 0.0, to = 10.0;
  int points = 101;
  double gamma_over_chi = 1.0 / 150.0;

  ModelSpec model_spec() const;
};

// Parses the sectioned key-value file. Unknown keys, malformed lines and
// repeated keys are ConfigErrors carrying the line number. All sections are
// optional except [run] kind.
ExperimentConfig load_config(const std::string& path);

struct Overrides {
  std::optional<int> dim;
  std::optional<std::string> model;
  std::optional<double> delta;        // sets chi = epsilon / delta
  std::optional<double> delta_prime;  // sets the preset's default loss rate
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov);

// Default loss channel of a preset: two-photon absorption for the
// two-photon-driven models 1, 2 and 3p, single-photon loss for 3, 4, 5.
bool preset_uses_two_photon_loss(const std::string& preset);

}  // namespace blockade

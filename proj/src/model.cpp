#include "blockade/model.hpp"

#include <cmath>
#include <charconv>
#include <string>

#include "blockade/util.hpp"

namespace blockade {

namespace {

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string("model preset: bad ") + what + " '" +
                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

ModelSpec ModelSpec::preset(std::string_view id, double chi, double epsilon) {
  ModelSpec spec;
  spec.chi = chi;
  spec.epsilon = epsilon;
  if (id == "1") {
    spec.kind = ModelKind::TwoPhotonDrive;
    spec.k = 0;
    spec.l = 2;
  } else if (id == "2") {
    spec.kind = ModelKind::TwoPhotonDrive;
    spec.k = 1;
    spec.l = 3;
  } else if (id == "5") {
    spec.kind = ModelKind::TwoPhotonDrive;
    spec.k = 0;
    spec.l = 1;
  } else if (id == "3" || id == "3p") {
    spec.kind = ModelKind::SinglePhotonDrive;
  } else if (id == "4") {
    spec.kind = ModelKind::SinglePhotonDriveShifted;
  } else if (id.starts_with("kl:")) {
    std::string_view rest = id.substr(3);
    auto comma = rest.find(',');
    if (comma == std::string_view::npos) {
      throw ConfigError("model preset: expected kl:K,L, got '" +
                        std::string(id) + "'");
    }
    spec.kind = ModelKind::TwoPhotonDrive;
    spec.k = parse_int(rest.substr(0, comma), "k");
    spec.l = parse_int(rest.substr(comma + 1), "l");
    if (spec.k < 0 || spec.l < 0 || spec.k == spec.l) {
      throw ConfigError("model preset: kl levels need 0 <= K != L, got '" +
                        std::string(id) + "'");
    }
  } else {
    throw ConfigError("unknown model preset '" + std::string(id) + "'");
  }
  validate(spec);
  return spec;
}

void validate(const ModelSpec& spec) {
  if (!(spec.chi > 0.0)) {
    throw std::invalid_argument("ModelSpec: chi must be positive");
  }
  if (spec.epsilon < 0.0) {
    throw std::invalid_argument("ModelSpec: epsilon must be >= 0");
  }
  if (spec.kind == ModelKind::TwoPhotonDrive) {
    if (spec.k < 0 || spec.l < 0 || spec.k == spec.l) {
      throw std::invalid_argument("ModelSpec: tuned levels need 0 <= k != l");
    }
  }
}

OperatorMatrix hamiltonian_kl(FockSpace space, const ModelSpec& spec) {
  validate(spec);
  if (spec.kind != ModelKind::TwoPhotonDrive) {
    throw std::invalid_argument("hamiltonian_kl: spec is not two-photon driven");
  }
  const int dim = space.dim();
  Mat h = Mat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    h(n, n) = spec.omega_tune * n +
              spec.chi * (n - spec.k) * (n - spec.l) + spec.sigma_tune;
  }
  for (int n = 0; n + 2 < dim; ++n) {
    double amp = spec.epsilon * std::sqrt((n + 1.0) * (n + 2.0));
    h(n, n + 2) += amp;  // a^2 part
    h(n + 2, n) += amp;  // a^dag^2 part
  }
  return OperatorMatrix(space, std::move(h), true);
}

OperatorMatrix hamiltonian_usual(FockSpace space, const ModelSpec& spec) {
  validate(spec);
  if (spec.kind == ModelKind::TwoPhotonDrive) {
    throw std::invalid_argument("hamiltonian_usual: spec is two-photon driven");
  }
  const int shift = spec.kind == ModelKind::SinglePhotonDrive ? 1 : 2;
  const int dim = space.dim();
  Mat h = Mat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    h(n, n) = spec.chi * n * (n - shift);
  }
  for (int n = 0; n + 1 < dim; ++n) {
    double amp = spec.epsilon * std::sqrt(n + 1.0);
    h(n, n + 1) += amp;
    h(n + 1, n) += amp;
  }
  return OperatorMatrix(space, std::move(h), true);
}

OperatorMatrix hamiltonian(FockSpace space, const ModelSpec& spec) {
  return spec.kind == ModelKind::TwoPhotonDrive ? hamiltonian_kl(space, spec)
                                                : hamiltonian_usual(space, spec);
}

ModelSpec DispersiveParams::to_model_spec() const {
  ModelSpec spec;
  spec.kind = ModelKind::TwoPhotonDrive;
  spec.k = k;
  spec.l = l;
  spec.chi = chi;
  spec.epsilon = epsilon_eff;
  spec.omega_tune = omega_kl;
  spec.sigma_tune = sigma_kl;
  validate(spec);
  return spec;
}

DispersiveParams dispersive_map(const PhysicalParams& raw, int k, int l) {
  if (raw.g == 0.0) {
    throw std::invalid_argument(
        "dispersive_map: g = 0 gives lambda = 0 and no effective Kerr term");
  }
  DispersiveParams p;
  p.raw = raw;
  p.k = k;
  p.l = l;
  p.detuning = raw.omega_q - raw.omega_cav;
  if (p.detuning == 0.0) {
    throw std::invalid_argument(
        "dispersive_map: zero qubit-cavity detuning breaks the dispersive "
        "expansion");
  }
  p.lambda = raw.g / p.detuning;
  double al = std::abs(p.lambda);
  if (al > 0.3) {
    throw std::invalid_argument("dispersive_map: |lambda| = " +
                                format_double(al) +
                                " is outside the dispersive regime (> 0.3)");
  }
  if (al > 0.1) {
    emit_warning("dispersive_map: |lambda| = " + format_double(al) +
                 " stretches the dispersive expansion");
  }
  double l2 = p.lambda * p.lambda;
  p.eta = -raw.g * p.lambda * (1.0 - l2);
  p.chi = -raw.g * p.lambda * l2;
  p.epsilon_eff = (raw.qubit_excited ? 1.0 - l2 : 1.0 + l2) * raw.epsilon0;
  p.omega_kl = raw.omega_cav + (k + l + 1) * p.chi - p.eta - 0.5 * raw.omega_d;
  p.sigma_kl = 0.5 * (raw.omega_q - 2.0 * k * l * p.chi - p.eta);
  return p;
}

PhysicalParams tuned_physical_params(double omega_cav, double g,
                                     double epsilon0, int k, int l) {
  if (g == 0.0) {
    throw std::invalid_argument("tuned_physical_params: g must be nonzero");
  }
  PhysicalParams raw;
  raw.omega_cav = omega_cav;
  raw.g = g;
  raw.epsilon0 = epsilon0;
  // sigma_kl = 0 fixes omega_q = eta + 2 k l chi, where eta and chi depend
  // on omega_q through lambda: a contraction, since both are O(g^2 / Delta).
  double omega_q = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double delta = omega_q - omega_cav;
    if (delta == 0.0) delta = -omega_cav;
    double lambda = g / delta;
    double l2 = lambda * lambda;
    double eta = -g * lambda * (1.0 - l2);
    double chi = -g * lambda * l2;
    double next = eta + 2.0 * k * l * chi;
    if (std::abs(next - omega_q) < 1e-14 * std::max(1.0, std::abs(omega_cav))) {
      omega_q = next;
      break;
    }
    omega_q = next;
  }
  raw.omega_q = omega_q;
  DispersiveParams p = dispersive_map(raw, k, l);
  // omega_kl = 0 then fixes the drive frequency.
  raw.omega_d = 2.0 * (omega_cav + (k + l + 1) * p.chi - p.eta);
  return raw;
}

}  // namespace blockade

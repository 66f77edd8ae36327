#include "blockade/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

#include <json.hpp>

#include "blockade/analysis.hpp"
#include "blockade/approx.hpp"
#include "blockade/states.hpp"
#include "blockade/util.hpp"

namespace blockade {

namespace {

using nlohmann::json;

class WarningCollector {
public:
  WarningCollector() {
    previous_ = set_warning_handler([this](const std::string& msg) {
      std::lock_guard<std::mutex> lock(mutex_);
      messages_.push_back(msg);
    });
  }
  ~WarningCollector() { set_warning_handler(previous_); }
  WarningCollector(const WarningCollector&) = delete;
  WarningCollector& operator=(const WarningCollector&) = delete;

  size_t count() {
    std::lock_guard<std::mutex> lock(mutex_);
    return messages_.size();
  }
  std::vector<std::string> messages() {
    std::lock_guard<std::mutex> lock(mutex_);
    return messages_;
  }

private:
  std::mutex mutex_;
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

const char* kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::Evolve: return "evolve";
    case RunKind::Steady: return "steady";
    case RunKind::Wigner: return "wigner";
    case RunKind::Scan: return "scan";
  }
  return "?";
}

const char* family_name(InitialFamily family) {
  switch (family) {
    case InitialFamily::Fock: return "fock";
    case InitialFamily::Coherent: return "coherent";
    case InitialFamily::Cat: return "cat";
    case InitialFamily::Squeezed: return "squeezed";
    case InitialFamily::DisplacedNumber: return "displaced_number";
    case InitialFamily::Thermal: return "thermal";
    case InitialFamily::PhotonAddedThermal: return "photon_added_thermal";
  }
  return "?";
}

const char* axis_name(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::EpsilonOverGamma: return "epsilon_over_gamma";
    case ScanAxis::OmegaOverChi: return "omega_over_chi";
    case ScanAxis::MeanN: return "mean_n";
    case ScanAxis::Alpha: return "alpha";
  }
  return "?";
}

DensityOperator build_initial(const InitialSpec& init, FockSpace space) {
  switch (init.family) {
    case InitialFamily::Fock:
      return DensityOperator::pure(fock_state(space, init.m));
    case InitialFamily::Coherent:
      return DensityOperator::pure(coherent_state(space, init.alpha));
    case InitialFamily::Cat:
      return DensityOperator::pure(cat_state(space, init.alpha, init.phi));
    case InitialFamily::Squeezed:
      return DensityOperator::pure(
          squeezed_state(space, init.alpha, init.xi));
    case InitialFamily::DisplacedNumber:
      return DensityOperator::pure(
          displaced_number_state(space, init.alpha, init.n0));
    case InitialFamily::Thermal:
      return thermal_state(space, init.mean_n);
    case InitialFamily::PhotonAddedThermal:
      return photon_added_thermal_state(space, init.mean_n);
  }
  throw ConfigError("unhandled initial family");
}

std::vector<int> default_manifold(const ModelSpec& spec, bool has_even,
                                  bool has_odd, int dim) {
  std::set<int> levels;
  if (spec.kind == ModelKind::SinglePhotonDrive) {
    levels = {0, 1};
  } else if (spec.kind == ModelKind::SinglePhotonDriveShifted) {
    levels = {0, 1, 2};
  } else {
    int top = std::max(spec.k, spec.l) + 1;
    if (has_even) {
      for (int n = 0; n <= top; n += 2) levels.insert(n);
    }
    if (has_odd) {
      for (int n = 1; n <= top; n += 2) levels.insert(n);
    }
  }
  std::vector<int> out;
  for (int n : levels) {
    if (n < dim) out.push_back(n);
  }
  return out;
}

std::vector<int> resolve_manifold(const ExperimentConfig& cfg,
                                  const ModelSpec& spec,
                                  const ParitySplit& split) {
  if (!cfg.manifold.empty()) {
    for (int level : cfg.manifold) {
      if (level < 0 || level >= cfg.dim) {
        throw ConfigError("evolve.manifold level " + std::to_string(level) +
                          " outside dim " + std::to_string(cfg.dim));
      }
    }
    return cfg.manifold;
  }
  return default_manifold(spec, split.p_even > 1e-9, split.p_odd > 1e-9,
                          cfg.dim);
}

json split_json(const ParitySplit& split) {
  return json{{"p_even", split.p_even},
              {"p_odd", split.p_odd},
              {"ratio_r", split.ratio_r}};
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["run"] = {{"kind", kind_name(cfg.kind)},
              {"dim", cfg.dim},
              {"name", cfg.name},
              {"allow_truncation", cfg.allow_truncation}};
  j["model"] = {{"preset", cfg.model_preset}, {"chi", cfg.chi},
                {"epsilon", cfg.epsilon},     {"omega", cfg.omega},
                {"sigma", cfg.sigma},
                {"delta", cfg.chi != 0.0 ? cfg.epsilon / cfg.chi : 0.0}};
  j["rates"] = {{"gamma1", cfg.rates.gamma1},
                {"gamma2", cfg.rates.gamma2},
                {"gamma_perp", cfg.rates.gamma_perp}};
  json init;
  init["family"] = family_name(cfg.initial.family);
  switch (cfg.initial.family) {
    case InitialFamily::Fock:
      init["m"] = cfg.initial.m;
      break;
    case InitialFamily::Coherent:
      init["alpha_re"] = cfg.initial.alpha.real();
      init["alpha_im"] = cfg.initial.alpha.imag();
      break;
    case InitialFamily::Cat:
      init["alpha_re"] = cfg.initial.alpha.real();
      init["alpha_im"] = cfg.initial.alpha.imag();
      init["phi"] = cfg.initial.phi;
      break;
    case InitialFamily::Squeezed:
      init["alpha_re"] = cfg.initial.alpha.real();
      init["alpha_im"] = cfg.initial.alpha.imag();
      init["xi_re"] = cfg.initial.xi.real();
      init["xi_im"] = cfg.initial.xi.imag();
      break;
    case InitialFamily::DisplacedNumber:
      init["alpha_re"] = cfg.initial.alpha.real();
      init["alpha_im"] = cfg.initial.alpha.imag();
      init["n0"] = cfg.initial.n0;
      break;
    case InitialFamily::Thermal:
    case InitialFamily::PhotonAddedThermal:
      init["mean_n"] = cfg.initial.mean_n;
      break;
  }
  j["initial"] = init;
  return j;
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SolverError("cannot open output file '" + path + "'");
  }
  out << contents;
  if (!out) {
    throw SolverError("failed writing '" + path + "'");
  }
}

struct ProbsSummary {
  double p_even = 0.0;
  double p_odd = 0.0;
};

ProbsSummary split_probs(const RealVec& probs) {
  ProbsSummary s;
  for (int n = 0; n < probs.size(); ++n) {
    (n % 2 == 0 ? s.p_even : s.p_odd) += probs(n);
  }
  return s;
}

double manifold_sum(const RealVec& probs, const std::vector<int>& manifold) {
  double f = 0.0;
  for (int level : manifold) {
    if (level < probs.size()) f += probs(level);
  }
  return f;
}

double prob_at(const RealVec& probs, int n) {
  return n < probs.size() ? probs(n) : 0.0;
}

// Steady state through the solver matching the symmetry of the generator.
DensityOperator solve_steady(const ModelSpec& spec,
                             const DissipationRates& rates,
                             const DensityOperator& rho0,
                             std::string* solver_name) {
  if (parity_preserving(spec, rates)) {
    if (solver_name) *solver_name = "parity_sector";
    return steady_state_general(spec, rates, rho0);
  }
  if (solver_name) *solver_name = "unique";
  return steady_state_unique(spec, rates, rho0.space());
}

json approx_comparison(const ExperimentConfig& cfg, const ModelSpec& spec,
                       const DensityOperator& rho0,
                       const DensityOperator& ss) {
  bool is_02 = cfg.model_preset == "1";
  bool is_13 = cfg.model_preset == "2";
  if (!(is_02 || is_13)) return nullptr;
  if (!(spec.epsilon > 0.0 && cfg.rates.gamma2 > 0.0)) return nullptr;
  if (cfg.dim < (is_13 ? 7 : 5)) return nullptr;
  if (!parity_preserving(spec, cfg.rates)) return nullptr;
  double delta = spec.epsilon / spec.chi;
  double delta_prime = cfg.rates.gamma2 / spec.epsilon;
  DensityOperator approx = approx_mixture(
      is_02 ? ApproxModel::TwoLevel02 : ApproxModel::TwoLevel13, rho0, delta,
      delta_prime, rho0.space());
  return json{{"delta", delta},
              {"delta_prime", delta_prime},
              {"trace_distance", trace_distance(ss, approx)}};
}

std::string run_evolve(const ExperimentConfig& cfg, const std::string& csv_path,
                       json& meta) {
  FockSpace space = make_space(cfg.dim);
  ModelSpec spec = cfg.model_spec();
  DensityOperator rho0 = build_initial(cfg.initial, space);
  std::vector<int> manifold =
      resolve_manifold(cfg, spec, parity_split(rho0));

  RealVec grid = linspace(0.0, cfg.t_max, cfg.samples);
  std::vector<double> times(grid.data(), grid.data() + grid.size());
  IntegratorOptions opts;
  opts.store_states = false;
  Trajectory traj = evolve(spec, cfg.rates, rho0, times, opts);

  std::string csv = "t,p0,p1,p2,p3,p4,p5,F\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const RealVec& probs = traj.photon_probs[i];
    csv += format_double(traj.times[i]);
    for (int n = 0; n <= 5; ++n) {
      csv += ',' + format_double(prob_at(probs, n));
    }
    csv += ',' + format_double(manifold_sum(probs, manifold));
    csv += '\n';
  }
  write_text(csv_path, csv);

  const RealVec& last = traj.photon_probs.back();
  ProbsSummary end = split_probs(last);
  meta["manifold"] = manifold;
  meta["final"] = {{"t", traj.times.back()},
                   {"p_even", end.p_even},
                   {"p_odd", end.p_odd},
                   {"fidelity", manifold_sum(last, manifold)}};
  return csv_path;
}

std::string run_steady(const ExperimentConfig& cfg, const std::string& csv_path,
                       json& meta) {
  FockSpace space = make_space(cfg.dim);
  ModelSpec spec = cfg.model_spec();
  DensityOperator rho0 = build_initial(cfg.initial, space);
  std::string solver;
  DensityOperator ss = solve_steady(spec, cfg.rates, rho0, &solver);

  RealVec probs = photon_probabilities(ss);
  std::string csv = "n,p_n\n";
  for (int n = 0; n < probs.size(); ++n) {
    csv += std::to_string(n) + ',' + format_double(probs(n)) + '\n';
  }
  write_text(csv_path, csv);

  std::vector<int> manifold = resolve_manifold(cfg, spec, parity_split(rho0));
  meta["solver"] = solver;
  meta["residual"] =
      lindblad_rhs(spec, cfg.rates, ss).cwiseAbs().maxCoeff();
  meta["initial_parity"] = split_json(parity_split(rho0));
  meta["steady_parity"] = split_json(parity_split(ss));
  meta["mean_photon"] = mean_photon(ss);
  meta["manifold"] = manifold;
  meta["fidelity"] = blockade_fidelity(ss, manifold);
  json approx = approx_comparison(cfg, spec, rho0, ss);
  if (!approx.is_null()) meta["approx"] = approx;
  return csv_path;
}

std::string run_wigner(const ExperimentConfig& cfg, const std::string& csv_path,
                       json& meta) {
  FockSpace space = make_space(cfg.dim);
  ModelSpec spec = cfg.model_spec();
  DensityOperator rho0 = build_initial(cfg.initial, space);

  DensityOperator state = rho0;
  if (!cfg.wigner_of_initial) {
    std::string solver;
    state = solve_steady(spec, cfg.rates, rho0, &solver);
    meta["solver"] = solver;
    meta["residual"] =
        lindblad_rhs(spec, cfg.rates, state).cwiseAbs().maxCoeff();
  }

  WignerGrid grid = wigner(state, linspace(cfg.q_min, cfg.q_max, cfg.q_points),
                           linspace(cfg.p_min, cfg.p_max, cfg.p_points));

  std::string csv = "q,p,w\n";
  for (int i = 0; i < grid.q_axis.size(); ++i) {
    for (int j = 0; j < grid.p_axis.size(); ++j) {
      csv += format_double(grid.q_axis(i)) + ',' +
             format_double(grid.p_axis(j)) + ',' +
             format_double(grid.values(i, j)) + '\n';
    }
  }
  write_text(csv_path, csv);

  json qa = json::array(), pa = json::array();
  for (int i = 0; i < grid.q_axis.size(); ++i) qa.push_back(grid.q_axis(i));
  for (int j = 0; j < grid.p_axis.size(); ++j) pa.push_back(grid.p_axis(j));
  meta["source"] = cfg.wigner_of_initial ? "initial" : "steady";
  meta["q_axis"] = qa;
  meta["p_axis"] = pa;
  meta["w_min"] = grid.values.minCoeff();
  meta["w_max"] = grid.values.maxCoeff();
  meta["integral"] = wigner_integral(grid);
  meta["mean_photon"] = mean_photon(state);
  return csv_path;
}

struct ScanRow {
  double value = 0.0;
  bool ok = false;
  RealVec probs;
  double fidelity = 0.0;
  double ratio = 0.0;
  std::string error;
};

std::string run_scan(const ExperimentConfig& cfg, const std::string& csv_path,
                     json& meta) {
  FockSpace space = make_space(cfg.dim);
  const int n_points = cfg.points;
  std::vector<ScanRow> rows(n_points);
  for (int i = 0; i < n_points; ++i) {
    rows[i].value = n_points == 1 ? cfg.from
                                  : cfg.from + (cfg.to - cfg.from) * i /
                                                   (n_points - 1.0);
  }

  ModelSpec base = cfg.model_spec();

  if (cfg.axis == ScanAxis::EpsilonOverGamma ||
      cfg.axis == ScanAxis::OmegaOverChi) {
    // The generator changes along the axis: one sector solve per point.
    DensityOperator rho0 = build_initial(cfg.initial, space);
    DissipationRates rates = cfg.rates;
    double gamma = cfg.gamma_over_chi * cfg.chi;
    if (cfg.axis == ScanAxis::EpsilonOverGamma) {
      if (preset_uses_two_photon_loss(cfg.model_preset)) {
        rates.gamma2 = gamma;
      } else {
        rates.gamma1 = gamma;
      }
    }
    std::vector<int> manifold =
        resolve_manifold(cfg, base, parity_split(rho0));
    parallel_for(n_points, [&](int i) {
      ScanRow& row = rows[i];
      try {
        ModelSpec spec = base;
        if (cfg.axis == ScanAxis::EpsilonOverGamma) {
          spec.epsilon = row.value * gamma;
        } else {
          spec.omega_tune = row.value * cfg.chi;
        }
        DensityOperator ss = solve_steady(spec, rates, rho0, nullptr);
        row.probs = photon_probabilities(ss);
        row.fidelity = manifold_sum(row.probs, manifold);
        row.ratio = parity_split(ss).ratio_r;
        row.ok = true;
      } catch (const std::exception& err) {
        row.error = err.what();
      }
    });
    meta["manifold"] = manifold;
    meta["effective_rates"] = {{"gamma1", rates.gamma1},
                               {"gamma2", rates.gamma2},
                               {"gamma_perp", rates.gamma_perp}};
  } else {
    // The generator is fixed; only the initial parity weights move. Solve
    // the two sector states once and mix per point.
    DensityOperator even =
        steady_state_sector(base, cfg.rates, Parity::Even, space);
    DensityOperator odd =
        steady_state_sector(base, cfg.rates, Parity::Odd, space);
    std::vector<int> manifold = resolve_manifold(cfg, base, {1.0, 1.0, 1.0});
    parallel_for(n_points, [&](int i) {
      ScanRow& row = rows[i];
      try {
        InitialSpec init = cfg.initial;
        if (cfg.axis == ScanAxis::MeanN) {
          if (init.family != InitialFamily::Thermal &&
              init.family != InitialFamily::PhotonAddedThermal) {
            throw ConfigError(
                "scan.axis mean_n needs a thermal or photon_added_thermal "
                "initial family");
          }
          init.mean_n = row.value;
        } else {
          if (init.family == InitialFamily::Fock ||
              init.family == InitialFamily::Thermal ||
              init.family == InitialFamily::PhotonAddedThermal) {
            throw ConfigError(
                "scan.axis alpha needs an amplitude-parameterized initial "
                "family");
          }
          init.alpha = Cplx(row.value, 0.0);
        }
        ParitySplit split = parity_split(build_initial(init, space));
        Mat mix = split.p_even * even.matrix() + split.p_odd * odd.matrix();
        DensityOperator ss(space, std::move(mix));
        row.probs = photon_probabilities(ss);
        row.fidelity = manifold_sum(row.probs, manifold);
        row.ratio = split.ratio_r;
        row.ok = true;
      } catch (const std::exception& err) {
        row.error = err.what();
      }
    });
    meta["manifold"] = manifold;
  }

  std::string csv = "value,p0,p1,p2,p3,p4,F,r,status\n";
  json failures = json::array();
  for (const ScanRow& row : rows) {
    csv += format_double(row.value);
    if (row.ok) {
      for (int n = 0; n <= 4; ++n) {
        csv += ',' + format_double(prob_at(row.probs, n));
      }
      csv += ',' + format_double(row.fidelity);
      csv += ',' + format_double(row.ratio);
      csv += ",ok\n";
    } else {
      csv += ",,,,,,,,failed\n";
      failures.push_back({{"value", row.value}, {"error", row.error}});
    }
  }
  write_text(csv_path, csv);

  meta["axis"] = axis_name(cfg.axis);
  meta["points"] = n_points;
  meta["failures"] = failures;
  return csv_path;
}

}  // namespace

RunOutputs run_experiment(const ExperimentConfig& cfg,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string csv_path =
      (std::filesystem::path(out_dir) / (cfg.name + ".csv")).string();
  std::string meta_path =
      (std::filesystem::path(out_dir) / (cfg.name + ".meta.json")).string();

  WarningCollector warnings;
  json meta = config_json(cfg);

  // Probe the initial state first so truncation problems become a distinct
  // failure mode instead of surfacing mid-run.
  {
    size_t before = warnings.count();
    FockSpace space = make_space(cfg.dim);
    (void)build_initial(cfg.initial, space);
    if (warnings.count() > before && !cfg.allow_truncation) {
      std::string joined;
      for (const auto& msg : warnings.messages()) {
        if (!joined.empty()) joined += "; ";
        joined += msg;
      }
      throw TruncationError("initial state does not fit dim " +
                            std::to_string(cfg.dim) + ": " + joined +
                            " (set run.allow_truncation = true to force)");
    }
  }

  switch (cfg.kind) {
    case RunKind::Evolve:
      run_evolve(cfg, csv_path, meta);
      break;
    case RunKind::Steady:
      run_steady(cfg, csv_path, meta);
      break;
    case RunKind::Wigner:
      run_wigner(cfg, csv_path, meta);
      break;
    case RunKind::Scan:
      run_scan(cfg, csv_path, meta);
      break;
  }

  // The initial-state probe and the run itself can emit the same message;
  // keep one copy and a scheduling-independent order.
  std::vector<std::string> msgs = warnings.messages();
  std::sort(msgs.begin(), msgs.end());
  msgs.erase(std::unique(msgs.begin(), msgs.end()), msgs.end());
  meta["warnings"] = msgs;
  write_text(meta_path, meta.dump(2) + "\n");
  return RunOutputs{{csv_path, meta_path}};
}

}  // namespace blockade

#include "blockade/config.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace blockade {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct KeyValueFile {
  std::map<std::string, Entry> entries;  // "section.key"

  const Entry* find(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

KeyValueFile parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  KeyValueFile file;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(path + ": line " + std::to_string(lineno) +
                          ": malformed section header '" + raw + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ": line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + raw + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || section.empty()) {
      throw ConfigError(path + ": line " + std::to_string(lineno) +
                        ": key outside a [section] or empty key");
    }
    std::string full = section + "." + key;
    if (file.entries.count(full)) {
      throw ConfigError(path + ": line " + std::to_string(lineno) +
                        ": duplicate key '" + full + "' (first on line " +
                        std::to_string(file.entries[full].line) + ")");
    }
    file.entries[full] = Entry{value, lineno, false};
  }
  return file;
}

class Reader {
public:
  Reader(KeyValueFile& file, std::string path)
      : file_(file), path_(std::move(path)) {}

  std::optional<std::string> text(const std::string& key) {
    const Entry* e = file_.find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    return text(key).value_or(fallback);
  }

  double number(const std::string& key, double fallback) {
    const Entry* e = file_.find(key);
    if (!e) return fallback;
    return to_double(key, *e);
  }

  std::optional<double> number_opt(const std::string& key) {
    const Entry* e = file_.find(key);
    if (!e) return std::nullopt;
    return to_double(key, *e);
  }

  int integer(const std::string& key, int fallback) {
    const Entry* e = file_.find(key);
    if (!e) return fallback;
    double v = to_double(key, *e);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      fail(key, *e, "expected an integer");
    }
    return i;
  }

  bool boolean(const std::string& key, bool fallback) {
    const Entry* e = file_.find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(key, *e, "expected true/false");
    return fallback;
  }

  std::vector<int> int_list(const std::string& key) {
    const Entry* e = file_.find(key);
    if (!e) return {};
    std::vector<int> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, *e, "empty list element");
      char* end = nullptr;
      long v = std::strtol(item.c_str(), &end, 10);
      if (end == item.c_str() || *end != '\0') {
        fail(key, *e, "expected comma-separated integers");
      }
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const Entry& e,
                         const std::string& why) {
    throw ConfigError(path_ + ": line " + std::to_string(e.line) + ": " + key +
                      ": " + why + " (got '" + e.value + "')");
  }

  void check_all_used() {
    for (const auto& [key, entry] : file_.entries) {
      if (!entry.used) {
        throw ConfigError(path_ + ": line " + std::to_string(entry.line) +
                          ": unknown key '" + key + "'");
      }
    }
  }

private:
  double to_double(const std::string& key, const Entry& e) {
    char* end = nullptr;
    double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0') {
      fail(key, e, "expected a number");
    }
    return v;
  }

  KeyValueFile& file_;
  std::string path_;
};

RunKind parse_kind(const std::string& text, const std::string& path) {
  if (text == "evolve") return RunKind::Evolve;
  if (text == "steady") return RunKind::Steady;
  if (text == "wigner") return RunKind::Wigner;
  if (text == "scan") return RunKind::Scan;
  throw ConfigError(path + ": run.kind must be evolve|steady|wigner|scan, got '" +
                    text + "'");
}

InitialFamily parse_family(const std::string& text, const std::string& path) {
  if (text == "fock") return InitialFamily::Fock;
  if (text == "coherent") return InitialFamily::Coherent;
  if (text == "cat") return InitialFamily::Cat;
  if (text == "squeezed") return InitialFamily::Squeezed;
  if (text == "displaced_number") return InitialFamily::DisplacedNumber;
  if (text == "thermal") return InitialFamily::Thermal;
  if (text == "photon_added_thermal") return InitialFamily::PhotonAddedThermal;
  throw ConfigError(path + ": initial.family '" + text + "' is not recognized");
}

ScanAxis parse_axis(const std::string& text, const std::string& path) {
  if (text == "epsilon_over_gamma") return ScanAxis::EpsilonOverGamma;
  if (text == "omega_over_chi") return ScanAxis::OmegaOverChi;
  if (text == "mean_n") return ScanAxis::MeanN;
  if (text == "alpha") return ScanAxis::Alpha;
  throw ConfigError(path + ": scan.axis '" + text + "' is not recognized");
}

}  // namespace

ModelSpec ExperimentConfig::model_spec() const {
  ModelSpec spec = ModelSpec::preset(model_preset, chi, epsilon);
  spec.omega_tune = omega;
  spec.sigma_tune = sigma;
  return spec;
}

bool preset_uses_two_photon_loss(const std::string& preset) {
  return preset == "1" || preset == "2" || preset == "3p" ||
         preset.rfind("kl:", 0) == 0;
}

ExperimentConfig load_config(const std::string& path) {
  KeyValueFile file = parse_file(path);
  Reader r(file, path);
  ExperimentConfig cfg;

  auto kind_text = r.text("run.kind");
  if (!kind_text) {
    throw ConfigError(path + ": missing required key run.kind");
  }
  cfg.kind = parse_kind(*kind_text, path);
  cfg.dim = r.integer("run.dim", cfg.dim);
  cfg.name = r.text_or("run.name", std::filesystem::path(path).stem().string());
  cfg.allow_truncation = r.boolean("run.allow_truncation", false);

  cfg.model_preset = r.text_or("model.preset", cfg.model_preset);
  cfg.epsilon = r.number("model.epsilon", cfg.epsilon);
  auto delta = r.number_opt("model.delta");
  auto chi = r.number_opt("model.chi");
  if (delta && chi) {
    throw ConfigError(path + ": give model.chi or model.delta, not both");
  }
  if (delta) {
    if (*delta <= 0.0) {
      throw ConfigError(path + ": model.delta must be > 0");
    }
    cfg.chi = cfg.epsilon / *delta;
  } else if (chi) {
    cfg.chi = *chi;
  }
  cfg.omega = r.number("model.omega", 0.0);
  cfg.sigma = r.number("model.sigma", 0.0);

  auto delta_prime = r.number_opt("rates.delta_prime");
  auto g1 = r.number_opt("rates.gamma1");
  auto g2 = r.number_opt("rates.gamma2");
  auto gp = r.number_opt("rates.gamma_perp");
  if (delta_prime && (g1 || g2)) {
    throw ConfigError(path +
                      ": give rates.delta_prime or explicit gamma rates, not "
                      "both");
  }
  if (delta_prime) {
    double rate = *delta_prime * cfg.epsilon;
    if (preset_uses_two_photon_loss(cfg.model_preset)) {
      cfg.rates.gamma2 = rate;
    } else {
      cfg.rates.gamma1 = rate;
    }
  } else {
    cfg.rates.gamma1 = g1.value_or(0.0);
    cfg.rates.gamma2 = g2.value_or(0.0);
  }
  cfg.rates.gamma_perp = gp.value_or(0.0);

  if (auto fam = r.text("initial.family")) {
    cfg.initial.family = parse_family(*fam, path);
  }
  cfg.initial.m = r.integer("initial.m", 0);
  auto alpha_plain = r.number_opt("initial.alpha");
  auto alpha_re = r.number_opt("initial.alpha_re");
  if (alpha_plain && alpha_re) {
    throw ConfigError(path + ": give initial.alpha or initial.alpha_re, not both");
  }
  cfg.initial.alpha =
      Cplx(alpha_plain ? *alpha_plain : alpha_re.value_or(0.0),
           r.number("initial.alpha_im", 0.0));
  cfg.initial.phi = r.number("initial.phi", 0.0);
  cfg.initial.xi = Cplx(r.number("initial.xi_re", 0.0),
                        r.number("initial.xi_im", 0.0));
  cfg.initial.n0 = r.integer("initial.n0", 0);
  cfg.initial.mean_n = r.number("initial.mean_n", 0.0);

  cfg.t_max = r.number("evolve.t_max", cfg.t_max);
  cfg.samples = r.integer("evolve.samples", cfg.samples);
  cfg.manifold = r.int_list("evolve.manifold");

  std::string wsource = r.text_or("wigner.source", "steady");
  if (wsource != "steady" && wsource != "initial") {
    throw ConfigError(path + ": wigner.source must be steady|initial, got '" +
                      wsource + "'");
  }
  cfg.wigner_of_initial = wsource == "initial";
  cfg.q_min = r.number("wigner.q_min", cfg.q_min);
  cfg.q_max = r.number("wigner.q_max", cfg.q_max);
  cfg.p_min = r.number("wigner.p_min", cfg.p_min);
  cfg.p_max = r.number("wigner.p_max", cfg.p_max);
  cfg.q_points = r.integer("wigner.q_points", cfg.q_points);
  cfg.p_points = r.integer("wigner.p_points", cfg.p_points);

  if (auto axis = r.text("scan.axis")) {
    cfg.axis = parse_axis(*axis, path);
  }
  cfg.from = r.number("scan.from", cfg.from);
  cfg.to = r.number("scan.to", cfg.to);
  cfg.points = r.integer("scan.points", cfg.points);
  cfg.gamma_over_chi = r.number("scan.gamma_over_chi", cfg.gamma_over_chi);

  r.check_all_used();

  if (cfg.dim < 2) {
    throw ConfigError(path + ": run.dim must be >= 2");
  }
  if (cfg.samples < 2) {
    throw ConfigError(path + ": evolve.samples must be >= 2");
  }
  if (cfg.points < 1) {
    throw ConfigError(path + ": scan.points must be >= 1");
  }
  if (cfg.t_max <= 0.0) {
    throw ConfigError(path + ": evolve.t_max must be > 0");
  }
  // Surface model-spec problems (bad preset, chi <= 0) as config errors now.
  try {
    (void)cfg.model_spec();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(path + ": " + err.what());
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.dim) {
    if (*ov.dim < 2) throw ConfigError("--dim must be >= 2");
    cfg.dim = *ov.dim;
  }
  if (ov.model) {
    cfg.model_preset = *ov.model;
  }
  if (ov.delta) {
    if (*ov.delta <= 0.0) throw ConfigError("--delta must be > 0");
    cfg.chi = cfg.epsilon / *ov.delta;
  }
  if (ov.delta_prime) {
    if (*ov.delta_prime < 0.0) throw ConfigError("--delta-prime must be >= 0");
    double rate = *ov.delta_prime * cfg.epsilon;
    if (preset_uses_two_photon_loss(cfg.model_preset)) {
      cfg.rates.gamma2 = rate;
    } else {
      cfg.rates.gamma1 = rate;
    }
  }
  try {
    (void)cfg.model_spec();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("model overrides: ") + err.what());
  }
}

}  // namespace blockade

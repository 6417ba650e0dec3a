#include "fsic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace fsic {

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "simulate") return ExperimentKind::Simulate;
  if (name == "picard") return ExperimentKind::Picard;
  if (name == "certificate") return ExperimentKind::Certificate;
  if (name == "sweep") return ExperimentKind::Sweep;
  if (name == "audit") return ExperimentKind::Audit;
  throw ValidationError("kind", "unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Picard: return "picard";
    case ExperimentKind::Certificate: return "certificate";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Audit: return "audit";
  }
  return "simulate";
}

namespace {

bool nan_aware_equal(double x, double y) {
  return (std::isnan(x) && std::isnan(y)) || x == y;
}

bool nan_aware_equal(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!nan_aware_equal(x[i], y[i])) return false;
  }
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, int line) {
  const std::string v = trim(value);
  if (v == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ParseError(line, "expected a number, got '" + v + "'");
  }
  return x;
}

long long parse_int(const std::string& value, int line) {
  const std::string v = trim(value);
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ParseError(line, "expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_list(const std::string& value, int line) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(item, line));
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

struct RawEntry {
  std::string value;
  int line;
};

struct RawConfig {
  std::map<std::string, RawEntry> entries;  // "section.key" -> value
  bool has_section(const std::string& s) const {
    const std::string prefix = s + ".";
    auto it = entries.lower_bound(prefix);
    return it != entries.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }
};

RawConfig tokenize(const std::string& text) {
  static const std::vector<std::string> kSections = {"problem",   "noise",  "impulses",
                                                     "inclusion", "control", "run"};
  RawConfig raw;
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    const std::string full = section + "." + key;
    if (raw.entries.count(full)) throw ParseError(line_no, "duplicate key '" + full + "'");
    raw.entries[full] = {value, line_no};
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  bool take_string(const std::string& key, std::string& out) {
    auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return false;
    out = it->second.value;
    raw_.entries.erase(it);
    return true;
  }
  bool take_double(const std::string& key, double& out) {
    auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return false;
    out = parse_double(it->second.value, it->second.line);
    raw_.entries.erase(it);
    return true;
  }
  bool take_int(const std::string& key, int& out) {
    auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return false;
    out = static_cast<int>(parse_int(it->second.value, it->second.line));
    raw_.entries.erase(it);
    return true;
  }
  bool take_u64(const std::string& key, std::uint64_t& out) {
    auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return false;
    out = static_cast<std::uint64_t>(parse_int(it->second.value, it->second.line));
    raw_.entries.erase(it);
    return true;
  }
  bool take_list(const std::string& key, std::vector<double>& out) {
    auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return false;
    out = parse_list(it->second.value, it->second.line);
    raw_.entries.erase(it);
    return true;
  }
  void check_consumed() const {
    if (!raw_.entries.empty()) {
      const auto& [key, entry] = *raw_.entries.begin();
      throw ParseError(entry.line, "unknown key '" + key + "'");
    }
  }
  const RawConfig& raw() const { return raw_; }

 private:
  RawConfig raw_;
};

void read_scenario_sections(Reader& reader, RunConfig& cfg) {
  reader.take_double("problem.alpha", cfg.alpha);
  reader.take_double("problem.b", cfg.b);
  reader.take_double("problem.a", cfg.a);
  reader.take_int("problem.n_modes", cfg.n_modes);
  reader.take_string("problem.phi_profile", cfg.phi_profile);
  reader.take_list("problem.phi_coeffs", cfg.phi_coeffs);
  reader.take_double("problem.phi_slope", cfg.phi_slope);
  reader.take_list("problem.xi_coeffs", cfg.xi_coeffs);
  reader.take_list("problem.h_taus", cfg.h_taus);
  reader.take_list("problem.h_coeffs", cfg.h_coeffs);
  reader.take_string("problem.f1_form", cfg.f1_form);
  reader.take_double("problem.f1_param", cfg.f1_param);
  reader.take_string("problem.f2_form", cfg.f2_form);
  reader.take_double("problem.f2_param", cfg.f2_param);
  reader.take_string("problem.varrho_form", cfg.varrho_form);
  reader.take_double("problem.varrho_param", cfg.varrho_param);
  reader.take_double("problem.nu1_lag", cfg.nu1_lag);
  reader.take_double("problem.nu2_lag", cfg.nu2_lag);
  reader.take_double("problem.nu3_lag", cfg.nu3_lag);
  reader.take_double("problem.L_f1", cfg.L_f1);
  reader.take_double("problem.k1", cfg.k1);
  reader.take_double("problem.k2", cfg.k2);
  reader.take_double("problem.L_f2", cfg.L_f2);
  reader.take_double("problem.L_h", cfg.L_h);
  reader.take_double("problem.ell", cfg.ell);
  reader.take_double("problem.w_hat", cfg.w_hat);
  reader.take_double("problem.wp", cfg.wp);
  reader.take_double("problem.theta", cfg.theta);
  reader.take_double("problem.pounds0", cfg.pounds0);
  reader.take_double("problem.pounds1", cfg.pounds1);
  reader.take_double("problem.beta0", cfg.beta0);
  reader.take_double("problem.beta1", cfg.beta1);

  reader.take_list("noise.q_coeffs", cfg.q_coeffs);

  reader.take_list("impulses.points", cfg.impulse_points);
  reader.take_list("impulses.beta", cfg.impulse_beta);
  reader.take_list("impulses.beta_hat", cfg.impulse_beta_hat);
  reader.take_list("impulses.L_I", cfg.L_I);
  reader.take_list("impulses.L_J", cfg.L_J);

  reader.take_string("inclusion.form", cfg.inclusion_form);
  reader.take_double("inclusion.param1", cfg.inclusion_param1);
  reader.take_double("inclusion.param2", cfg.inclusion_param2);

  reader.take_list("control.target_coeffs", cfg.target_coeffs);
  reader.take_list("control.deltas", cfg.deltas);
  reader.take_double("control.delta", cfg.delta);
}

void read_run_section(Reader& reader, RunConfig& cfg) {
  reader.take_string("run.scenario", cfg.scenario);
  std::string kind;
  if (reader.take_string("run.kind", kind)) cfg.kind = experiment_kind_from_string(kind);
  reader.take_int("run.steps", cfg.steps);
  reader.take_int("run.samples", cfg.samples);
  std::uint64_t seed = 0;
  if (reader.take_u64("run.seed", seed)) cfg.seed = seed;
  reader.take_string("run.selection", cfg.selection);
  reader.take_u64("run.selection_seed", cfg.selection_seed);
  reader.take_string("run.out", cfg.out_dir);
  reader.take_int("run.dump_samples", cfg.dump_samples);
  reader.take_double("run.tol", cfg.tol);
  reader.take_int("run.max_iter", cfg.max_iter);
  reader.take_double("run.relaxation", cfg.relaxation);
  reader.take_int("run.audit_samples", cfg.audit_samples);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);

  const auto scenario_it = raw.entries.find("run.scenario");
  if (scenario_it != raw.entries.end()) {
    // Preset reference: the referencing file may only carry the run section.
    for (const char* section : {"problem", "noise", "impulses", "inclusion", "control"}) {
      if (raw.has_section(section)) {
        throw ParseError(scenario_it->second.line,
                         "a config referencing a preset scenario may only contain [run]");
      }
    }
    const std::string name = scenario_it->second.value;
    RunConfig cfg = parse_config(preset_text(name));
    cfg.scenario = name;
    Reader reader(std::move(raw));
    read_run_section(reader, cfg);
    reader.check_consumed();
    cfg.validate();
    return cfg;
  }

  RunConfig cfg;
  Reader reader(std::move(raw));
  read_scenario_sections(reader, cfg);
  read_run_section(reader, cfg);
  reader.check_consumed();
  cfg.validate();
  return cfg;
}

std::string render(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "alpha = " << format_double(cfg.alpha) << "\n";
  out << "b = " << format_double(cfg.b) << "\n";
  out << "a = " << format_double(cfg.a) << "\n";
  out << "n_modes = " << cfg.n_modes << "\n";
  out << "phi_profile = " << cfg.phi_profile << "\n";
  out << "phi_coeffs = " << format_list(cfg.phi_coeffs) << "\n";
  out << "phi_slope = " << format_double(cfg.phi_slope) << "\n";
  out << "xi_coeffs = " << format_list(cfg.xi_coeffs) << "\n";
  out << "h_taus = " << format_list(cfg.h_taus) << "\n";
  out << "h_coeffs = " << format_list(cfg.h_coeffs) << "\n";
  out << "f1_form = " << cfg.f1_form << "\n";
  out << "f1_param = " << format_double(cfg.f1_param) << "\n";
  out << "f2_form = " << cfg.f2_form << "\n";
  out << "f2_param = " << format_double(cfg.f2_param) << "\n";
  out << "varrho_form = " << cfg.varrho_form << "\n";
  out << "varrho_param = " << format_double(cfg.varrho_param) << "\n";
  out << "nu1_lag = " << format_double(cfg.nu1_lag) << "\n";
  out << "nu2_lag = " << format_double(cfg.nu2_lag) << "\n";
  out << "nu3_lag = " << format_double(cfg.nu3_lag) << "\n";
  out << "L_f1 = " << format_double(cfg.L_f1) << "\n";
  out << "k1 = " << format_double(cfg.k1) << "\n";
  out << "k2 = " << format_double(cfg.k2) << "\n";
  out << "L_f2 = " << format_double(cfg.L_f2) << "\n";
  out << "L_h = " << format_double(cfg.L_h) << "\n";
  out << "ell = " << format_double(cfg.ell) << "\n";
  out << "w_hat = " << format_double(cfg.w_hat) << "\n";
  out << "wp = " << format_double(cfg.wp) << "\n";
  out << "theta = " << format_double(cfg.theta) << "\n";
  out << "pounds0 = " << format_double(cfg.pounds0) << "\n";
  out << "pounds1 = " << format_double(cfg.pounds1) << "\n";
  out << "beta0 = " << format_double(cfg.beta0) << "\n";
  out << "beta1 = " << format_double(cfg.beta1) << "\n";
  out << "\n[noise]\n";
  out << "q_coeffs = " << format_list(cfg.q_coeffs) << "\n";
  out << "\n[impulses]\n";
  out << "points = " << format_list(cfg.impulse_points) << "\n";
  out << "beta = " << format_list(cfg.impulse_beta) << "\n";
  out << "beta_hat = " << format_list(cfg.impulse_beta_hat) << "\n";
  out << "L_I = " << format_list(cfg.L_I) << "\n";
  out << "L_J = " << format_list(cfg.L_J) << "\n";
  out << "\n[inclusion]\n";
  out << "form = " << cfg.inclusion_form << "\n";
  out << "param1 = " << format_double(cfg.inclusion_param1) << "\n";
  out << "param2 = " << format_double(cfg.inclusion_param2) << "\n";
  out << "\n[control]\n";
  out << "target_coeffs = " << format_list(cfg.target_coeffs) << "\n";
  out << "deltas = " << format_list(cfg.deltas) << "\n";
  out << "delta = " << format_double(cfg.delta) << "\n";
  out << "\n[run]\n";
  out << "kind = " << to_string(cfg.kind) << "\n";
  out << "steps = " << cfg.steps << "\n";
  out << "samples = " << cfg.samples << "\n";
  if (cfg.seed) out << "seed = " << *cfg.seed << "\n";
  out << "selection = " << cfg.selection << "\n";
  out << "selection_seed = " << cfg.selection_seed << "\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "dump_samples = " << cfg.dump_samples << "\n";
  out << "tol = " << format_double(cfg.tol) << "\n";
  out << "max_iter = " << cfg.max_iter << "\n";
  out << "relaxation = " << format_double(cfg.relaxation) << "\n";
  out << "audit_samples = " << cfg.audit_samples << "\n";
  return out.str();
}

bool RunConfig::operator==(const RunConfig& o) const {
  return nan_aware_equal(alpha, o.alpha) && nan_aware_equal(b, o.b) &&
         nan_aware_equal(a, o.a) && n_modes == o.n_modes &&
         phi_profile == o.phi_profile && nan_aware_equal(phi_coeffs, o.phi_coeffs) &&
         nan_aware_equal(phi_slope, o.phi_slope) &&
         nan_aware_equal(xi_coeffs, o.xi_coeffs) && nan_aware_equal(h_taus, o.h_taus) &&
         nan_aware_equal(h_coeffs, o.h_coeffs) && f1_form == o.f1_form &&
         nan_aware_equal(f1_param, o.f1_param) && f2_form == o.f2_form &&
         nan_aware_equal(f2_param, o.f2_param) && varrho_form == o.varrho_form &&
         nan_aware_equal(varrho_param, o.varrho_param) &&
         nan_aware_equal(nu1_lag, o.nu1_lag) && nan_aware_equal(nu2_lag, o.nu2_lag) &&
         nan_aware_equal(nu3_lag, o.nu3_lag) && nan_aware_equal(L_f1, o.L_f1) &&
         nan_aware_equal(k1, o.k1) && nan_aware_equal(k2, o.k2) &&
         nan_aware_equal(L_f2, o.L_f2) && nan_aware_equal(L_h, o.L_h) &&
         nan_aware_equal(ell, o.ell) && nan_aware_equal(w_hat, o.w_hat) &&
         nan_aware_equal(wp, o.wp) && nan_aware_equal(theta, o.theta) &&
         nan_aware_equal(pounds0, o.pounds0) && nan_aware_equal(pounds1, o.pounds1) &&
         nan_aware_equal(beta0, o.beta0) && nan_aware_equal(beta1, o.beta1) &&
         nan_aware_equal(q_coeffs, o.q_coeffs) &&
         nan_aware_equal(impulse_points, o.impulse_points) &&
         nan_aware_equal(impulse_beta, o.impulse_beta) &&
         nan_aware_equal(impulse_beta_hat, o.impulse_beta_hat) &&
         nan_aware_equal(L_I, o.L_I) && nan_aware_equal(L_J, o.L_J) &&
         inclusion_form == o.inclusion_form &&
         nan_aware_equal(inclusion_param1, o.inclusion_param1) &&
         nan_aware_equal(inclusion_param2, o.inclusion_param2) &&
         nan_aware_equal(target_coeffs, o.target_coeffs) &&
         nan_aware_equal(deltas, o.deltas) && nan_aware_equal(delta, o.delta) &&
         scenario == o.scenario && kind == o.kind && steps == o.steps &&
         samples == o.samples && seed == o.seed && selection == o.selection &&
         selection_seed == o.selection_seed && out_dir == o.out_dir &&
         dump_samples == o.dump_samples && nan_aware_equal(tol, o.tol) &&
         max_iter == o.max_iter && nan_aware_equal(relaxation, o.relaxation) &&
         audit_samples == o.audit_samples;
}

void RunConfig::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ValidationError("alpha", "must lie in (1, 2)");
  if (!(b > 0.0)) throw ValidationError("b", "must be > 0");
  if (!(a >= 0.0)) throw ValidationError("a", "must be >= 0");
  if (n_modes < 1) throw ValidationError("n_modes", "must be >= 1");
  if (!seed.has_value()) throw ValidationError("seed", "must be set (no entropy defaults)");
  if (steps < 16) throw ValidationError("steps", "must be >= 16");
  if (samples < 1) throw ValidationError("samples", "must be >= 1");
  if (dump_samples < 0) throw ValidationError("dump_samples", "must be >= 0");
  if (!(tol > 0.0)) throw ValidationError("tol", "must be > 0");
  if (max_iter < 1) throw ValidationError("max_iter", "must be >= 1");
  if (!(relaxation >= 0.0 && relaxation <= 1.0)) {
    throw ValidationError("relaxation", "must lie in [0, 1]");
  }
  if (audit_samples < 1) throw ValidationError("audit_samples", "must be >= 1");
  selection_kind_from_string(selection);
  if (phi_profile != "constant" && phi_profile != "linear") {
    throw ValidationError("phi_profile", "must be constant or linear");
  }
  for (const auto& [name, form] :
       {std::pair<const char*, const std::string&>{"f1_form", f1_form},
        std::pair<const char*, const std::string&>{"f2_form", f2_form}}) {
    if (form != "zero" && form != "linear" && form != "example_5_1") {
      throw ValidationError(name, "must be zero, linear, or example_5_1");
    }
  }
  if (varrho_form != "zero" && varrho_form != "constant" && varrho_form != "elapsed") {
    throw ValidationError("varrho_form", "must be zero, constant, or elapsed");
  }
  if (inclusion_form != "none" && inclusion_form != "degenerate_linear" &&
      inclusion_form != "example_5_1") {
    throw ValidationError("inclusion.form",
                          "must be none, degenerate_linear, or example_5_1");
  }
  if (nu1_lag < 0.0 || nu2_lag < 0.0 || nu3_lag < 0.0) {
    throw ValidationError("nu_lag", "delay lags must be >= 0");
  }
  if (!(delta > 0.0)) throw ValidationError("delta", "must be > 0");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw ValidationError("deltas", "must all be > 0");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw ValidationError("deltas", "must be strictly decreasing");
    }
  }
  auto check_len = [&](const std::vector<double>& v, const char* key) {
    if (!v.empty() && static_cast<int>(v.size()) != n_modes) {
      throw ValidationError(key, "length must equal n_modes");
    }
  };
  check_len(phi_coeffs, "phi_coeffs");
  check_len(xi_coeffs, "xi_coeffs");
  check_len(q_coeffs, "q_coeffs");
  check_len(target_coeffs, "target_coeffs");
  if (h_taus.size() != h_coeffs.size()) {
    throw ValidationError("h_coeffs", "must match h_taus in length");
  }
  for (double tau : h_taus) {
    if (!(tau >= 0.0 && tau <= b)) throw ValidationError("h_taus", "must lie in [0, b]");
  }
  double prev = 0.0;
  for (double xp : impulse_points) {
    if (!(xp > prev && xp < b)) {
      throw ValidationError("impulses.points", "must be strictly increasing inside (0, b)");
    }
    prev = xp;
  }
  if (impulse_beta.size() != impulse_points.size() ||
      impulse_beta_hat.size() != impulse_points.size()) {
    throw ValidationError("impulses.beta", "beta and beta_hat must match points in length");
  }
  if (!L_I.empty() && L_I.size() != impulse_points.size()) {
    throw ValidationError("impulses.L_I", "length must match points");
  }
  if (!L_J.empty() && L_J.size() != impulse_points.size()) {
    throw ValidationError("impulses.L_J", "length must match points");
  }
}

ScenarioSpec RunConfig::build_scenario() const {
  validate();
  ScenarioSpec scn;
  scn.alpha = alpha;
  scn.horizon = b;
  scn.history = a;
  scn.n_modes = n_modes;

  SpectralVector phi0(n_modes);
  for (std::size_t i = 0; i < phi_coeffs.size(); ++i) phi0.c[i] = phi_coeffs[i];
  if (phi_profile == "constant") {
    scn.phi = [phi0](double) { return phi0; };
  } else {
    const double slope = phi_slope;
    scn.phi = [phi0, slope](double x) {
      SpectralVector v = phi0;
      v *= (1.0 + slope * x);
      return v;
    };
  }

  scn.xi = SpectralVector(n_modes);
  for (std::size_t i = 0; i < xi_coeffs.size(); ++i) scn.xi.c[i] = xi_coeffs[i];

  scn.h.taus = h_taus;
  scn.h.coeffs = h_coeffs;

  std::shared_ptr<const SineBasisSampler> sampler;
  auto need_sampler = [&]() {
    if (!sampler) sampler = std::make_shared<SineBasisSampler>(n_modes);
    return sampler;
  };
  auto build_map = [&](const std::string& form, double param) -> StateMap {
    if (form == "zero") return make_zero_map();
    if (form == "linear") return make_linear_map(param);
    return StateMap{};  // filled by caller for the named forms
  };
  scn.f1 = f1_form == "example_5_1" ? make_example51_f1(need_sampler(), f1_param)
                                    : build_map(f1_form, f1_param);
  scn.f2 = f2_form == "example_5_1" ? make_example51_f2(need_sampler(), f2_param)
                                    : build_map(f2_form, f2_param);

  if (varrho_form == "zero") {
    scn.varrho = [](double) { return 0.0; };
  } else if (varrho_form == "constant") {
    const double c = varrho_param;
    scn.varrho = [c](double) { return c; };
  } else {
    scn.varrho = [](double t) { return std::fabs(t); };
  }

  if (inclusion_form == "degenerate_linear") {
    scn.inclusion = make_degenerate_inclusion(make_linear_map(inclusion_param1));
  } else if (inclusion_form == "example_5_1") {
    scn.inclusion = make_example51_inclusion(inclusion_param1, inclusion_param2);
  }

  scn.nu1 = nu1_lag > 0.0 ? make_lag_delay(nu1_lag, a) : make_no_delay();
  scn.nu2 = nu2_lag > 0.0 ? make_lag_delay(nu2_lag, a) : make_no_delay();
  scn.nu3 = nu3_lag > 0.0 ? make_lag_delay(nu3_lag, a) : make_no_delay();

  for (std::size_t p = 0; p < impulse_points.size(); ++p) {
    ImpulseSpec imp;
    imp.point = impulse_points[p];
    imp.state_jump = make_integral_jump(impulse_beta[p]);
    imp.velocity_jump = make_integral_jump(impulse_beta_hat[p]);
    scn.impulses.push_back(std::move(imp));
  }

  scn.noise.variances.assign(n_modes, 0.0);
  for (std::size_t i = 0; i < q_coeffs.size(); ++i) scn.noise.variances[i] = q_coeffs[i];

  scn.constants.L_f1 = L_f1;
  scn.constants.k1 = k1;
  scn.constants.k2 = k2;
  scn.constants.L_f2 = L_f2;
  scn.constants.L_h = L_h;
  scn.constants.L_I = L_I;
  scn.constants.L_J = L_J;
  scn.constants.growth.ell = ell;
  scn.constants.growth.w_hat = w_hat;
  scn.constants.growth.wp = wp;
  scn.constants.growth.theta = theta;
  scn.constants.growth.pounds0 = pounds0;
  scn.constants.growth.pounds1 = pounds1;
  scn.constants.growth.beta0 = beta0;
  scn.constants.growth.beta1 = beta1;

  scn.validate();
  return scn;
}

const char* preset_text_example_5_1();  // generated from presets/example_5_1.cfg

std::vector<std::string> preset_names() { return {"example_5_1"}; }

const std::string& preset_text(const std::string& name) {
  static const std::string example_5_1 = preset_text_example_5_1();
  if (name == "example_5_1") return example_5_1;
  throw ValidationError("scenario", "unknown preset '" + name + "'");
}

}  // namespace fsic

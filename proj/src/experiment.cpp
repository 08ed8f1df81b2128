#include "sgcm/experiment.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sgcm {

namespace {

double parse_double(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("'" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw ConfigError("'" + key + "' must be a positive integer: '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("'" + key + "' must be true or false: '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("'" + key + "' has an empty entry");
    out.push_back(parse_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("'" + key + "' is empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::array<double, 2> parse_range(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError("'" + key + "' must be 'lo,hi' with lo < hi");
  return {v[0], v[1]};
}

const char* overlap_name(OverlapModel m) { return m == OverlapModel::reference ? "reference" : "exact"; }

// t in microseconds, for file names.
std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%gus", t * 1e6);
  return buf;
}

std::string header(const KeyValues& kv, const std::string& units, const std::string& columns) {
  std::string h = "# tool = sgcm\n# version = " + std::string(kToolVersion) + "\n";
  for (const auto& [k, v] : kv) {
    if (k == "tool" || k == "version") continue;
    h += "# " + k + " = " + v + "\n";
  }
  h += "# units = " + units + "\n" + columns + "\n";
  return h;
}

PhaseSpaceGrid wigner_grid(const ExperimentSpec& spec, double t) {
  auto g = default_phase_space_grid(spec.params, t, spec.grid_nq, spec.grid_np);
  if (spec.q_range) g.q = Axis::uniform((*spec.q_range)[0], (*spec.q_range)[1], spec.grid_nq);
  if (spec.p_range) g.p = Axis::uniform((*spec.p_range)[0], (*spec.p_range)[1], spec.grid_np);
  return g;
}

std::array<double, 2> density_range(const ExperimentSpec& spec, double t) {
  if (spec.x_range) return *spec.x_range;
  const double a = std::abs(spec.params.force) / spec.params.mass;
  const double tau2 = spreading_time(spec.params);
  const double half = 0.5 * a * t * t + 10.0 * spec.params.sigma * std::sqrt(1.0 + (t / tau2) * (t / tau2));
  return {-half, half};
}

// The settings as a single-time run, so each per-time file replays itself.
ExperimentSpec at_time(const ExperimentSpec& spec, double t) {
  ExperimentSpec s = spec;
  s.times = {t};
  return s;
}

OutputFile entropy_file(const ExperimentSpec& spec) {
  const auto scales = derive_scales(spec.params);
  std::ostringstream os;
  os << header(spec_to_config(spec), "t[s],A[1],S_ent[nats]", "t,A,S_ent");
  for (const auto& e : entanglement_series(sweep_times(spec), scales, spec.overlap)) {
    os << format_double(e.t) << ',' << format_double(e.A) << ',' << format_double(e.S_ent) << '\n';
  }
  return {"entropy.csv", os.str()};
}

OutputFile density_file(const ExperimentSpec& spec) {
  if (spec.times.size() != 1) throw ConfigError("density takes exactly one time");
  const double t = spec.times[0];
  const auto state = evolve_in_field(spec.params, t);
  ExperimentSpec resolved = spec;
  resolved.x_range = density_range(spec, t);
  const Axis x = Axis::uniform((*resolved.x_range)[0], (*resolved.x_range)[1], spec.points);
  std::ostringstream os;
  os << header(spec_to_config(resolved), "x[m],rho[1/m]", "x,rho_plus,rho_minus,rho_total");
  for (std::size_t i = 0; i < x.n; ++i) {
    const double rp = state.density(Branch::plus, x[i]);
    const double rm = state.density(Branch::minus, x[i]);
    os << format_double(x[i]) << ',' << format_double(rp) << ',' << format_double(rm) << ','
       << format_double(rp + rm) << '\n';
  }
  return {"density.csv", os.str()};
}

void wigner_files(const ExperimentSpec& spec, RunResult& out) {
  const std::string units = "q[m],p[kg m/s],W[1/(J s)]";
  const std::string columns = "q,p,W_pp,W_mm,Re_W_pm,Im_W_pm,W_x";
  for (double t : spec.times) {
    ExperimentSpec one = at_time(spec, t);
    const auto grid = wigner_grid(one, t);
    one.q_range = std::array<double, 2>{grid.q.lo, grid.q.hi};
    one.p_range = std::array<double, 2>{grid.p.lo, grid.p.hi};
    const auto state = evolve_in_field(spec.params, t);
    const auto W = wigner_field_analytic(state, grid);
    const std::string head = header(spec_to_config(one), units, columns);
    auto body = [](const WignerMatrixField& f) {
      std::ostringstream os;
      write_wigner_csv(os, f);
      // write_wigner_csv emits its own column line; the header already has one.
      const std::string s = os.str();
      return s.substr(s.find('\n') + 1);
    };
    out.files.push_back({"wigner_" + time_tag(t) + ".csv", head + body(W)});
    if (one.coarse) {
      const auto pix = *one.pixels;
      out.files.push_back({"wigner_coarse_" + time_tag(t) + ".csv", head + body(coarse_grain(W, pix))});
    }
  }
}

OutputFile info_file(const ExperimentSpec& spec) {
  const auto times = sweep_times(spec);
  std::ostringstream os;
  os << header(spec_to_config(spec), "t[s],H[nats],S_ent[nats]", "t,H,S_ent");
  if (spec.pixels) {
    for (double t : times) {
      const auto state = evolve_in_field(spec.params, t);
      const double S = entanglement_entropy(state);
      const double H = mean_information(state, false, spec.pixels->Delta);
      os << format_double(t) << ',' << format_double(H) << ',' << format_double(S) << '\n';
    }
  } else {
    for (const auto& p : information_series(spec.params, times, spec.overlap)) {
      os << format_double(p.t) << ',' << format_double(p.H) << ',' << format_double(p.S_ent) << '\n';
    }
  }
  return {"info.csv", os.str()};
}

void verify_file(const ExperimentSpec& spec, RunResult& out) {
  const auto report = verify_closed_forms(spec.params, spec.times, spec.oracle);
  std::ostringstream os;
  os << header(spec_to_config(spec), "t[s],errors[relative]",
               "t,l2_err_plus,l2_err_minus,overlap_dev,norm_drift");
  std::ostringstream csv;
  write_verification_csv(csv, report);
  const std::string s = csv.str();
  os << s.substr(s.find('\n') + 1);
  out.files.push_back({"verify.csv", os.str()});
  for (const auto& w : report.warnings) out.messages.push_back("warning: " + w);
  for (const auto& f : report.failures) out.messages.push_back("FAILED: " + f);
  out.verification_failed = !report.passed();
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::entropy: return "entropy";
    case Command::density: return "density";
    case Command::wigner: return "wigner";
    case Command::info: return "info";
    case Command::verify: return "verify";
  }
  return "?";
}

Command command_from_name(const std::string& name) {
  for (Command c : {Command::entropy, Command::density, Command::wigner, Command::info,
                    Command::verify}) {
    if (name == command_name(c)) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

ExperimentSpec default_spec(Command c, const PhysicalParams& params) {
  ExperimentSpec s;
  s.command = c;
  s.params = params;
  switch (c) {
    case Command::entropy:
      s.t_stop = 2e-6;
      s.points = 400;
      break;
    case Command::density:
      s.times = {22.5e-6};
      s.points = 2001;
      break;
    case Command::wigner:
      s.times = {1e-6, 30e-6};
      s.pixels = CoarsePixelSpec::default_for(params);
      break;
    case Command::info:
      s.t_stop = 5e-5;
      s.points = 200;
      break;
    case Command::verify:
      s.times = default_verification_times(params);
      break;
  }
  return s;
}

ExperimentSpec spec_from_config(Command c, const KeyValues& kv) {
  if (auto it = kv.find("command"); it != kv.end() && command_from_name(it->second) != c) {
    throw ConfigError("config was written by '" + it->second + "', not '" + command_name(c) + "'");
  }
  ExperimentSpec s = default_spec(c, params_from_config(kv));
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto val = [&](const char* k) -> const std::string& { return kv.at(k); };
  if (has("t_start_s")) s.t_start = parse_double("t_start_s", val("t_start_s"));
  if (has("t_stop_s")) s.t_stop = parse_double("t_stop_s", val("t_stop_s"));
  if (has("points")) s.points = parse_count("points", val("points"));
  if (has("times_s")) s.times = parse_list("times_s", val("times_s"));
  if (has("overlap")) {
    const auto& m = val("overlap");
    if (m == "reference") {
      s.overlap = OverlapModel::reference;
    } else if (m == "exact") {
      s.overlap = OverlapModel::exact;
    } else {
      throw ConfigError("overlap must be 'reference' or 'exact'");
    }
  }
  if (has("x_range_m")) s.x_range = parse_range("x_range_m", val("x_range_m"));
  if (has("q_range_m")) s.q_range = parse_range("q_range_m", val("q_range_m"));
  if (has("p_range_kgms")) s.p_range = parse_range("p_range_kgms", val("p_range_kgms"));
  if (has("grid_nq")) s.grid_nq = parse_count("grid_nq", val("grid_nq"));
  if (has("grid_np")) s.grid_np = parse_count("grid_np", val("grid_np"));
  if (has("coarse")) s.coarse = parse_bool("coarse", val("coarse"));
  if (has("pixel_Delta_m") || has("pixel_delta_kgms")) {
    CoarsePixelSpec pix = s.pixels.value_or(CoarsePixelSpec::default_for(s.params));
    if (has("pixel_Delta_m")) pix.Delta = parse_double("pixel_Delta_m", val("pixel_Delta_m"));
    if (has("pixel_delta_kgms")) pix.delta = parse_double("pixel_delta_kgms", val("pixel_delta_kgms"));
    try {
      pix.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    s.pixels = pix;
  }
  if (has("oracle_points")) s.oracle.n = parse_count("oracle_points", val("oracle_points"));
  if (has("oracle_dt")) s.oracle.dt = parse_double("oracle_dt", val("oracle_dt"));
  if (has("oracle_min_steps")) s.oracle.min_steps = parse_count("oracle_min_steps", val("oracle_min_steps"));
  if (has("oracle_tolerance")) s.oracle.tolerance = parse_double("oracle_tolerance", val("oracle_tolerance"));
  if (has("oracle_max_halvings")) {
    s.oracle.max_halvings = static_cast<int>(parse_count("oracle_max_halvings", val("oracle_max_halvings")));
  }
  if (has("oracle_refine")) s.oracle.refine = parse_bool("oracle_refine", val("oracle_refine"));
  if (has("oracle_dt_scale")) s.oracle.dt_scale = parse_double("oracle_dt_scale", val("oracle_dt_scale"));
  return s;
}

KeyValues spec_to_config(const ExperimentSpec& s) {
  KeyValues kv = params_to_config(s.params);
  kv["command"] = command_name(s.command);
  auto range = [](const std::array<double, 2>& r) { return join({r[0], r[1]}); };
  switch (s.command) {
    case Command::entropy:
    case Command::info:
      if (s.times.empty()) {
        kv["t_start_s"] = format_double(s.t_start);
        kv["t_stop_s"] = format_double(s.t_stop);
        kv["points"] = std::to_string(s.points);
      } else {
        kv["times_s"] = join(s.times);
      }
      kv["overlap"] = overlap_name(s.overlap);
      if (s.command == Command::info && s.pixels) {
        kv["pixel_Delta_m"] = format_double(s.pixels->Delta);
      }
      break;
    case Command::density:
      kv["times_s"] = join(s.times);
      kv["points"] = std::to_string(s.points);
      if (s.x_range) kv["x_range_m"] = range(*s.x_range);
      break;
    case Command::wigner:
      kv["times_s"] = join(s.times);
      kv["grid_nq"] = std::to_string(s.grid_nq);
      kv["grid_np"] = std::to_string(s.grid_np);
      if (s.q_range) kv["q_range_m"] = range(*s.q_range);
      if (s.p_range) kv["p_range_kgms"] = range(*s.p_range);
      kv["coarse"] = s.coarse ? "true" : "false";
      if (s.pixels) {
        kv["pixel_Delta_m"] = format_double(s.pixels->Delta);
        kv["pixel_delta_kgms"] = format_double(s.pixels->delta);
      }
      break;
    case Command::verify:
      kv["times_s"] = join(s.times);
      kv["oracle_points"] = std::to_string(s.oracle.n);
      kv["oracle_dt"] = format_double(s.oracle.dt);
      kv["oracle_min_steps"] = std::to_string(s.oracle.min_steps);
      kv["oracle_tolerance"] = format_double(s.oracle.tolerance);
      kv["oracle_max_halvings"] = std::to_string(s.oracle.max_halvings);
      kv["oracle_refine"] = s.oracle.refine ? "true" : "false";
      kv["oracle_dt_scale"] = format_double(s.oracle.dt_scale);
      break;
  }
  return kv;
}

std::vector<double> sweep_times(const ExperimentSpec& spec) {
  if (!spec.times.empty()) return spec.times;
  if (spec.points < 1) throw ConfigError("sweep needs at least one point");
  if (spec.points == 1) return {spec.t_start};
  std::vector<double> t(spec.points);
  const double step = (spec.t_stop - spec.t_start) / static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) t[i] = spec.t_start + static_cast<double>(i) * step;
  t.back() = spec.t_stop;
  return t;
}

KeyValues parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool stamped = false;
  std::string head;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) != 0) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      break;
    }
    if (line == "# tool = sgcm") stamped = true;
    head += line.substr(1) + "\n";
  }
  // Output headers hold the settings inside comments; plain configs don't.
  return stamped ? parse_key_values(head) : parse_key_values(text);
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunResult run_experiment(const ExperimentSpec& spec) {
  RunResult r;
  switch (spec.command) {
    case Command::entropy: r.files.push_back(entropy_file(spec)); break;
    case Command::density: r.files.push_back(density_file(spec)); break;
    case Command::wigner: wigner_files(spec, r); break;
    case Command::info: r.files.push_back(info_file(spec)); break;
    case Command::verify: verify_file(spec, r); break;
  }
  return r;
}

void write_outputs(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& f : result.files) {
    const fs::path p = fs::path(dir) / f.name;
    std::ofstream out(p, std::ios::binary);
    out << f.text;
    out.flush();
    if (!out) throw IoError("cannot write '" + p.string() + "'");
  }
}

std::string csv_body(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace sgcm

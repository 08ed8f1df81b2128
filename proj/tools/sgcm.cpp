// sgcm: Stern-Gerlach coarse-measurement runs.
//
//   sgcm entropy|density|wigner|info|verify [--config FILE] [--out DIR] [overrides]
//
// Exit status: 0 ok, 1 usage or bad input, 2 I/O error, 3 verification failure.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "sgcm/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out = ".";
  std::string times;
  std::string t_range;
  std::string overlap;
  std::string pixels;
  std::string grid;
  std::string q_range;
  std::string p_range;
  std::string x_range;
  std::size_t points = 0;
  bool no_coarse = false;
  double coarse_dt = 0.0;
  std::size_t oracle_points = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Folds the command-line overrides into the key-value config.
void apply(const Overrides& o, sgcm::KeyValues& kv) {
  if (!o.times.empty()) {
    kv["times_s"] = o.times;
    kv.erase("t_start_s");
    kv.erase("t_stop_s");
  }
  if (!o.t_range.empty()) {
    const auto parts = split(o.t_range, ',');
    if (parts.size() != 3) throw sgcm::ConfigError("--t-range wants START,STOP,POINTS");
    kv["t_start_s"] = parts[0];
    kv["t_stop_s"] = parts[1];
    kv["points"] = parts[2];
    kv.erase("times_s");
  }
  if (!o.overlap.empty()) kv["overlap"] = o.overlap;
  if (!o.pixels.empty()) {
    const auto parts = split(o.pixels, ',');
    if (parts.size() > 2) throw sgcm::ConfigError("--pixels wants DELTA[,delta]");
    kv["pixel_Delta_m"] = parts[0];
    if (parts.size() == 2) kv["pixel_delta_kgms"] = parts[1];
  }
  if (!o.grid.empty()) {
    const auto parts = split(o.grid, 'x');
    if (parts.size() != 2) throw sgcm::ConfigError("--grid wants NQxNP");
    kv["grid_nq"] = parts[0];
    kv["grid_np"] = parts[1];
  }
  if (!o.q_range.empty()) kv["q_range_m"] = o.q_range;
  if (!o.p_range.empty()) kv["p_range_kgms"] = o.p_range;
  if (!o.x_range.empty()) kv["x_range_m"] = o.x_range;
  if (o.points) kv["points"] = std::to_string(o.points);
  if (o.no_coarse) kv["coarse"] = "false";
  if (o.coarse_dt > 0.0) {
    kv["oracle_dt_scale"] = sgcm::format_double(o.coarse_dt);
    kv["oracle_refine"] = "false";
  }
  if (o.oracle_points) kv["oracle_points"] = std::to_string(o.oracle_points);
}

int run(sgcm::Command cmd, const Overrides& o) {
  sgcm::KeyValues kv;
  if (!o.config.empty()) kv = sgcm::read_config_file(o.config);
  apply(o, kv);
  const auto spec = sgcm::spec_from_config(cmd, kv);
  const auto result = sgcm::run_experiment(spec);
  sgcm::write_outputs(result, o.out);
  for (const auto& m : result.messages) std::cerr << m << '\n';
  for (const auto& f : result.files) std::cout << o.out << '/' << f.name << '\n';
  return result.verification_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stern-Gerlach coarse-measurement runs"};
  app.set_version_flag("--version", sgcm::kToolVersion);
  app.require_subcommand(1);

  Overrides o;
  std::map<CLI::App*, sgcm::Command> commands;
  auto add = [&](sgcm::Command c, const std::string& help) {
    auto* sub = app.add_subcommand(sgcm::command_name(c), help);
    sub->add_option("--config", o.config, "key = value file, or an earlier output to replay");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--t", o.times, "comma-separated times in s");
    commands[sub] = c;
    return sub;
  };

  auto* entropy = add(sgcm::Command::entropy, "entanglement entropy sweep -> entropy.csv");
  auto* density = add(sgcm::Command::density, "position densities at one time -> density.csv");
  auto* wigner = add(sgcm::Command::wigner, "Wigner matrix grids -> wigner_*.csv");
  auto* info = add(sgcm::Command::info, "mean information sweep -> info.csv");
  auto* verify = add(sgcm::Command::verify, "grid oracle vs closed forms -> verify.csv");

  for (auto* sub : {entropy, info}) {
    sub->add_option("--t-range", o.t_range, "START,STOP,POINTS sweep in s");
    sub->add_option("--overlap", o.overlap, "overlap model for S_ent")
        ->check(CLI::IsMember({"reference", "exact"}));
  }
  info->add_option("--pixels", o.pixels, "pixel width in m: pixel sums instead of the continuum");
  density->add_option("--x-range", o.x_range, "LO,HI in m");
  density->add_option("--points", o.points, "number of samples");
  wigner->add_option("--grid", o.grid, "NQxNP");
  wigner->add_option("--pixels", o.pixels, "DELTA,delta: pixel sizes in m and kg m/s");
  wigner->add_option("--q-range", o.q_range, "LO,HI in m");
  wigner->add_option("--p-range", o.p_range, "LO,HI in kg m/s");
  wigner->add_flag("--no-coarse", o.no_coarse, "skip the coarse-grained files");
  verify->add_option("--coarse-dt", o.coarse_dt, "multiply the starting step and skip refinement")
      ->check(CLI::PositiveNumber);
  verify->add_option("--oracle-points", o.oracle_points, "grid points of the oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  sgcm::Command cmd{};
  for (const auto& [sub, c] : commands) {
    if (sub->parsed()) cmd = c;
  }
  try {
    return run(cmd, o);
  } catch (const sgcm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

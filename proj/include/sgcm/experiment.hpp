#pragma once

// Batch runs behind the command-line tool. Each command turns a resolved spec
// into one or more CSV files whose '#' header echoes the spec, so a file can be
// fed back as --config and reproduce its own body.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sgcm/core.hpp"
#include "sgcm/information.hpp"
#include "sgcm/oracle.hpp"
#include "sgcm/phase_space.hpp"

namespace sgcm {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Command { entropy, density, wigner, info, verify };

const char* command_name(Command c);
Command command_from_name(const std::string& name);  // throws ConfigError

struct ExperimentSpec {
  Command command = Command::entropy;
  PhysicalParams params = default_params();

  // Time sweep for entropy and info; explicit times win when non-empty.
  double t_start = 0.0;  // s
  double t_stop = 0.0;   // s
  std::size_t points = 0;
  std::vector<double> times;  // s

  OverlapModel overlap = OverlapModel::reference;

  // density: sample range (m); empty means automatic.
  std::optional<std::array<double, 2>> x_range;

  // wigner
  std::size_t grid_nq = 256;
  std::size_t grid_np = 256;
  std::optional<std::array<double, 2>> q_range;  // m
  std::optional<std::array<double, 2>> p_range;  // kg m/s
  bool coarse = true;

  // Pixel sizes for wigner coarse output; for info, set means pixel sums
  // instead of the continuum limit.
  std::optional<CoarsePixelSpec> pixels;

  OracleOptions oracle;
};

// Defaults for one command.
ExperimentSpec default_spec(Command c, const PhysicalParams& params = default_params());

// Overlays the keys present in kv on default_spec. Unknown keys are ignored so
// that output headers (which carry tool stamps and units) read back cleanly.
ExperimentSpec spec_from_config(Command c, const KeyValues& kv);

// Every setting the command uses, fully resolved.
KeyValues spec_to_config(const ExperimentSpec& spec);

// Times a sweep visits.
std::vector<double> sweep_times(const ExperimentSpec& spec);

// Reads a plain config file or the '#' header of an earlier output file.
// Throws IoError when the file cannot be read.
KeyValues read_config_file(const std::string& path);
KeyValues parse_config_text(const std::string& text);

class IoError : public Error {
 public:
  using Error::Error;
};

struct OutputFile {
  std::string name;
  std::string text;
};

struct RunResult {
  std::vector<OutputFile> files;
  std::vector<std::string> messages;  // warnings and failures, one per line
  bool verification_failed = false;
};

RunResult run_experiment(const ExperimentSpec& spec);

// Writes the files under dir, creating it if needed. Throws IoError.
void write_outputs(const RunResult& result, const std::string& dir);

// Lines of text that are not '#' comments.
std::string csv_body(const std::string& text);

}  // namespace sgcm

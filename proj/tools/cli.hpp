#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "omegascale/levy_model.hpp"
#include "omegascale/omega_scale.hpp"
#include "omegascale/omega_spec.hpp"

namespace omegascale::cli {

enum class Format { csv, json };

struct JobConfig {
  std::string command;
  LevyModel model = BrownianDrift{};
  std::optional<double> table_q;  // killing rate of a tabulated model
  std::optional<OmegaSpec> omega;
  Grid grid;
  BuildOptions solver;
  nlohmann::json query = nlohmann::json::object();
  Format format = Format::csv;
  std::optional<std::string> output_path;
};

// Output of one command: a rectangular table plus scalar metadata. Metadata
// values are stored pre-rendered as JSON literals.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
  bool flagged = false;  // Monte Carlo truncation beyond 1% of paths
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"scale", "exit", "resolvent", "occupation", "omega-ruin", "mc-check"};
  return names;
}

// Validates the whole document (unknown keys are rejected) and builds the
// model and omega; relative table paths resolve against base_dir. Throws
// ConfigError.
JobConfig parse_config(const nlohmann::json& doc, const std::string& command, const std::filesystem::path& base_dir);

Table cmd_scale(const JobConfig& cfg);
Table cmd_exit(const JobConfig& cfg);
Table cmd_resolvent(const JobConfig& cfg);
Table cmd_occupation(const JobConfig& cfg);
Table cmd_omega_ruin(const JobConfig& cfg);
Table cmd_mc_check(const JobConfig& cfg);
Table dispatch(const JobConfig& cfg);

// Numbers are written with 17 significant digits; non-finite values become
// empty CSV cells and JSON nulls.
std::string format_number(double v);
std::string render_csv(const Table& t);
std::string render_json(const Table& t, const std::string& command);

// Exit codes: 0 ok, 2 configuration error, 3 numeric error, 4 flagged
// Monte Carlo estimate.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace omegascale::cli

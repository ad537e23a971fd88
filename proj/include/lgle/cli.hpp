#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace lgle::cli {

/// Every parameter any subcommand reads. Stored in config files as
/// `key = value` lines and in manifests as a JSON object with the same keys.
struct RunConfig {
  double theta = 2.0;
  double r = 1.0;
  std::uint64_t seed = 7;
  int replicas = 2000;
  std::vector<int> N_list{64, 128, 256, 512};
  int N = 64;
  int T = 8;
  double M = 30.0;
  int steps = 16;
  int K = 2;
  int trials = 10000;
  int window_a = 4;
  int window_b = 8;
  double threshold = 0.02;
  int samples = 1000;
  int jobs = 1;
  std::string pairs = "random";  // random | shift | equal
  bool control = false;
  std::string boundary;  // JSON file, empty for the built-in example
  std::string output_dir;
  std::string format = "both";  // csv | json | both
  bool svg = true;
  bool quick = false;
  std::vector<int> only;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& c);

std::string to_text(const RunConfig& c);
/// Applies the `key = value` lines of `text` on top of `base`. Blank lines
/// and lines starting with '#' are skipped; unknown keys and malformed
/// values throw std::invalid_argument.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

nlohmann::ordered_json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart (markers at every point, a polyline when
/// there are two or more, legend with every series name). Output depends
/// only on the input.
std::string render_svg(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label, bool log_x = false,
                       bool log_y = false);
/// Writes render_svg to `path`; throws std::runtime_error on I/O failure
/// and std::invalid_argument on empty input.
void emit_plot(const std::vector<Series>& series, const std::string& path, const std::string& title,
               const std::string& x_label, const std::string& y_label, bool log_x = false,
               bool log_y = false);

/// The `lgle` command. args[0] is the program name. Returns 0 on success,
/// 1 when a check fails (or the run aborts), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgle::cli

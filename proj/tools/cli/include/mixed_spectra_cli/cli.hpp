#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mixed_spectra::cli {

/// Everything a run depends on. Serialized into JSON reports so a run can
/// be repeated from its own output with --replay.
struct RunConfig {
  std::string command;

  // Geometry source: --geometry (inline JSON or file), --square, or --angles.
  std::string geometry;
  bool square = false;
  std::optional<std::vector<double>> angles;
  std::string dirichlet;  // side indices "0,2", roles "M+S", or "all"
  std::optional<std::size_t> neumann_side;
  std::string which;

  std::string order = "P2";
  std::string levels = "3..6";
  double tol = 1e-10;
  int max_iter = 500;
  int max_level = 8;
  double eps_verdict = 1e-8;
  double eps_angle = 1e-9;
  double right_angle_tol = 1e-6;
  int num_eigs = 1;

  std::string task = "corollary-iii";
  std::string grid = "20x20";
  std::optional<std::size_t> count;
  std::uint64_t seed = 42;
  unsigned threads = 1;

  std::string output;
  std::string format;  // csv | json; inferred from the output extension when empty
  std::string dump_mesh;
  std::string plot_data;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

/// Reads the "config" block of a JSON report written by an earlier run.
RunConfig config_from_report(const std::string& path);

/// Executes one command; prints a summary to `out`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point (argv[0] included).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixed_spectra::cli

#pragma once

#include "mixed_spectra/eigensolve.hpp"
#include "mixed_spectra/sweep.hpp"
#include "mixed_spectra/verify.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

namespace mixed_spectra {

/// Shortest decimal form that round-trips.
std::string format_double(double value);

/// Header of the verification CSV, one row per VerificationReport.
std::string verification_csv_header();

void write_verification_csv(std::ostream& out, std::span<const VerificationReport> reports,
                            const std::string& task = "");

/// Evaluated and failed rows of a sweep (skipped rows are left out).
void write_sweep_csv(std::ostream& out, const SweepDataset& data);

/// Long-format "alpha,beta,margin,verdict" table with one line per point,
/// skipped points included.
void write_plot_csv(std::ostream& out, const SweepDataset& data);

void write_voila_csv(std::ostream& out, std::span<const VoilaReport> reports);
void write_grisvard_csv(std::ostream& out, std::span<const GrisvardReport> reports);
void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> points,
                           const std::optional<Extrapolation>& extrapolation);

/// JSON texts of the nested reports.
std::string to_json(const VerificationReport& r);
std::string to_json(const VoilaReport& r);
std::string to_json(const GrisvardReport& r);
std::string to_json(const SweepDataset& data);
std::string to_json(std::span<const ConvergencePoint> points, const std::optional<Extrapolation>& e);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mixed_spectra

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ulheat/experiments.hpp"
#include "ulheat/history.hpp"
#include "ulheat/solver.hpp"

namespace ulheat {

inline constexpr const char* kToolVersion = "ulheat 1.0.0";

/// %.12g; non-finite values print as inf, -inf, nan.
std::string format_number(double v);

/// Creates the directory if needed; throws ErrorKind::Io when it is not writable.
void ensure_output_dir(const std::filesystem::path& dir);

/// Columns t, sup_norm, then uloc_r<r>_rho<rho> and lr_r<r> per recorded norm.
std::string history_csv(const SupNormHistory& history);
/// Columns lambda, T_hat, T_err, h, status; one row per point, sorted by lambda.
std::string sweep_csv(const ExponentFit& fit);
/// Columns x[, y], u.
std::string snapshot_csv(const SampledField& field);

/// Log-log scatter of T_hat against lambda with the fitted line.
std::string sweep_svg(const ExponentFit& fit);
/// Sup norm against t, log scale on the vertical axis.
std::string trace_svg(const SupNormHistory& history);

nlohmann::json to_json(const BlowupReport& report);
nlohmann::json to_json(const ExponentFit& fit);

/// Writes `content` to dir/name; throws ErrorKind::Io on failure.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& content);

/// report.json: tool version, the echoed config, wall-clock seconds and the
/// command-specific results.
void write_report(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                  const nlohmann::json& results, double wall_seconds);

}  // namespace ulheat

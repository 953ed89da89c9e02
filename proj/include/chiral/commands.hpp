// commands.hpp - the four chiralloop subcommands and their file formats.
//
// Outputs are byte-stable: CSV numbers use 17 significant digits, JSON keys
// keep a fixed order, and every JSON result embeds the resolved config.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chiral/analysis.hpp"
#include "chiral/config.hpp"

namespace chiral {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIntegrator = 2;
inline constexpr int kExitUndetermined = 3;
inline constexpr int kExitVerifyFail = 4;
inline constexpr int kExitRegime = 5;

inline constexpr int kSchemaVersion = 1;

const char* tool_version();

struct CommandResult {
    int exit_code = kExitOk;
    std::string message;  // one-line summary for stdout/stderr
    std::vector<std::filesystem::path> files;
};

std::uint64_t fnv1a64(std::string_view bytes);

// "%.17g"
std::string format_number(double v);

std::string surface_csv(const SurfaceGrid& grid);
std::string trajectory_csv(const Trajectory& traj);
std::string sweep_csv(const SweepResult& result);

// Writes surface.csv.
CommandResult cmd_surface(const RunConfig& cfg, Range gamma_range, Range theta_range,
                          std::size_t resolution, const std::filesystem::path& out_dir);

// Writes trajectory.csv and report.json (subject to run.outputs).
CommandResult cmd_evolve(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Writes sweep.csv and sweep.json. Direction and initial state come from cfg.
CommandResult cmd_sweep(const RunConfig& cfg, SweepAxis axis, double from, double to,
                        std::size_t points, const std::filesystem::path& out_dir);

// Writes verify.json.
CommandResult cmd_verify(const RunConfig& cfg, double tol, const std::filesystem::path& out_dir);

}  // namespace chiral

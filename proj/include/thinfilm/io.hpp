#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/reconstruct.hpp"
#include "thinfilm/residual.hpp"

namespace thinfilm {

inline constexpr const char* kToolVersion = "thinfilm 0.1.0";

// %.17g: enough digits that every finite double round-trips bit-exactly
std::string format_g17(double v);

// header x,h,p; one row per grid node
void write_snapshot_csv(const std::filesystem::path& file, const GridField& h, const GridField& p);

struct SnapshotTable {
  GridField h;
  GridField p;
};

// strict inverse of write_snapshot_csv; the x column must reproduce the
// uniform periodic grid implied by the row count, bit for bit
SnapshotTable read_snapshot_csv(const std::filesystem::path& file);

// header t,dt,mass,min_h,lyapunov,energy,dissipation
void write_series_csv(const std::filesystem::path& file,
                      std::span<const DiagnosticsRecord> records);

// header x,y,v1; x-major row order, matching PlaneField storage
void write_plane_csv(const std::filesystem::path& file, const PlaneField& f);

// header term,eps,magnitude,predicted_exponent,fitted_slope
void write_sweep_csv(const std::filesystem::path& file, std::span<const SweepSeries> series);

std::string sha256_hex(const std::filesystem::path& file);

struct ManifestEntry {
  std::string path;    // relative to the manifest's directory
  std::string digest;  // sha256 hex
};

// Structured-text run report: command, config echo, wall-clock bracket,
// exit status, and a digest inventory of every emitted file. Manifests are
// the only outputs that carry time; data files stay bit-reproducible.
struct RunManifest {
  std::string tool = kToolVersion;
  std::string command;
  std::vector<std::string> config_echo;
  std::string started;
  std::string finished;
  int exit_status = 0;
  std::vector<std::string> notes;  // free-form run remarks (failure time, warnings)
  std::vector<ManifestEntry> files;
};

// ISO 8601 UTC, seconds resolution
std::string wall_clock_utc();

// digest out_dir/rel now and append it to the inventory
void record_file(RunManifest& m, const std::filesystem::path& out_dir, const std::string& rel);

// writes out_dir/manifest.txt
void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir);

// recompute the digests listed in a manifest; true iff every file matches
bool audit_manifest(const std::filesystem::path& manifest_file);

}  // namespace thinfilm

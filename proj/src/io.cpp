#include "thinfilm/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + file.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + file.string());
  return in;
}

double parse_cell(const std::string& cell, const std::filesystem::path& file, int line) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError(file.string() + ":" + std::to_string(line) + ": not a number: '" + cell +
                      "'");
  }
  return value;
}

std::vector<std::string> split_row(const std::string& row) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = row.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(row.substr(start));
      return cells;
    }
    cells.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
}

constexpr const char* kManifestName = "manifest.txt";

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot_csv(const std::filesystem::path& file, const GridField& h,
                        const GridField& p) {
  if (h.grid != p.grid) throw NumericsError("snapshot fields live on different grids");
  std::ofstream out = open_for_write(file);
  out << "x,h,p\n";
  for (int j = 0; j < h.n(); ++j) {
    out << format_g17(h.grid.node(j)) << ',' << format_g17(h[j]) << ',' << format_g17(p[j])
        << '\n';
  }
  if (!out.flush()) throw ConfigError("write failed: " + file.string());
}

SnapshotTable read_snapshot_csv(const std::filesystem::path& file) {
  std::ifstream in = open_for_read(file);
  std::string row;
  if (!std::getline(in, row) || row != "x,h,p") {
    throw ConfigError(file.string() + ":1: expected header 'x,h,p'");
  }
  std::vector<double> xs, hs, ps;
  int line = 1;
  while (std::getline(in, row)) {
    ++line;
    if (row.empty()) continue;
    const std::vector<std::string> cells = split_row(row);
    if (cells.size() != 3) {
      throw ConfigError(file.string() + ":" + std::to_string(line) + ": expected 3 columns, got " +
                        std::to_string(cells.size()));
    }
    xs.push_back(parse_cell(cells[0], file, line));
    hs.push_back(parse_cell(cells[1], file, line));
    ps.push_back(parse_cell(cells[2], file, line));
  }
  if (xs.empty()) throw ConfigError(file.string() + ": no data rows");

  const PeriodicGrid grid = build_grid(static_cast<int>(xs.size()));
  for (int j = 0; j < grid.n; ++j) {
    if (xs[static_cast<size_t>(j)] != grid.node(j)) {
      throw ConfigError(file.string() + ":" + std::to_string(j + 2) +
                        ": x column does not match the uniform periodic grid of " +
                        std::to_string(grid.n) + " nodes");
    }
  }
  SnapshotTable table{GridField(grid), GridField(grid)};
  for (int j = 0; j < grid.n; ++j) {
    table.h[j] = hs[static_cast<size_t>(j)];
    table.p[j] = ps[static_cast<size_t>(j)];
  }
  return table;
}

void write_series_csv(const std::filesystem::path& file,
                      std::span<const DiagnosticsRecord> records) {
  std::ofstream out = open_for_write(file);
  out << "t,dt,mass,min_h,lyapunov,energy,dissipation\n";
  for (const DiagnosticsRecord& r : records) {
    out << format_g17(r.t) << ',' << format_g17(r.dt) << ',' << format_g17(r.mass) << ','
        << format_g17(r.min_h) << ',' << format_g17(r.lyapunov) << ',' << format_g17(r.energy)
        << ',' << format_g17(r.dissipation) << '\n';
  }
  if (!out.flush()) throw ConfigError("write failed: " + file.string());
}

void write_plane_csv(const std::filesystem::path& file, const PlaneField& f) {
  std::ofstream out = open_for_write(file);
  out << "x,y,v1\n";
  for (int j = 0; j < f.n(); ++j) {
    for (int i = 0; i < f.q(); ++i) {
      out << format_g17(f.grid.node(j)) << ',' << format_g17(f.y[static_cast<size_t>(i)]) << ','
          << format_g17(f.at(j, i)) << '\n';
    }
  }
  if (!out.flush()) throw ConfigError("write failed: " + file.string());
}

void write_sweep_csv(const std::filesystem::path& file, std::span<const SweepSeries> series) {
  std::ofstream out = open_for_write(file);
  out << "term,eps,magnitude,predicted_exponent,fitted_slope\n";
  for (const SweepSeries& s : series) {
    for (size_t k = 0; k < s.eps.size(); ++k) {
      out << s.term << ',' << format_g17(s.eps[k]) << ',' << format_g17(s.magnitude[k]) << ','
          << format_g17(s.predicted_exponent) << ',' << format_g17(s.fitted_slope) << '\n';
    }
  }
  if (!out.flush()) throw ConfigError("write failed: " + file.string());
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in = open_for_read(file);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericsError("sha256 context initialization failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw NumericsError("sha256 update failed");
    }
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericsError("sha256 finalization failed");
  }
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[md[i] >> 4];
    out[2 * i + 1] = hex[md[i] & 0xf];
  }
  return out;
}

std::string wall_clock_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void record_file(RunManifest& m, const std::filesystem::path& out_dir, const std::string& rel) {
  m.files.push_back({rel, sha256_hex(out_dir / rel)});
}

void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
  std::ofstream out = open_for_write(out_dir / kManifestName);
  out << "# thinfilm run manifest\n";
  out << "tool = " << m.tool << '\n';
  out << "command = " << m.command << '\n';
  out << "started = " << m.started << '\n';
  out << "finished = " << m.finished << '\n';
  out << "exit_status = " << m.exit_status << '\n';
  out << "\n[config]\n";
  for (const std::string& line : m.config_echo) out << "| " << line << '\n';
  if (!m.notes.empty()) {
    out << "\n[notes]\n";
    for (const std::string& line : m.notes) out << "| " << line << '\n';
  }
  out << "\n[files]\n";
  for (const ManifestEntry& e : m.files) out << "sha256 " << e.digest << "  " << e.path << '\n';
  if (!out.flush()) throw ConfigError("write failed: " + (out_dir / kManifestName).string());
}

bool audit_manifest(const std::filesystem::path& manifest_file) {
  std::ifstream in = open_for_read(manifest_file);
  const std::filesystem::path dir = manifest_file.parent_path();
  std::string row;
  bool in_files = false;
  bool saw_section = false;
  while (std::getline(in, row)) {
    if (row == "[files]") {
      in_files = true;
      saw_section = true;
      continue;
    }
    if (!row.empty() && row[0] == '[') {
      in_files = false;
      continue;
    }
    if (!in_files || row.empty()) continue;
    if (row.rfind("sha256 ", 0) != 0 || row.size() < 7 + 64 + 2) {
      throw ConfigError(manifest_file.string() + ": malformed inventory row: '" + row + "'");
    }
    const std::string digest = row.substr(7, 64);
    const std::string rel = row.substr(7 + 64 + 2);
    std::error_code ec;
    if (!std::filesystem::exists(dir / rel, ec) || ec) return false;
    if (sha256_hex(dir / rel) != digest) return false;
  }
  if (!saw_section) {
    throw ConfigError(manifest_file.string() + ": missing [files] section");
  }
  return true;
}

}  // namespace thinfilm

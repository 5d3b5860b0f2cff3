#include "thinfilm/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "thinfilm/errors.hpp"

namespace thinfilm {

ModelParams validate_params(const ModelParams& raw) {
  if (!(raw.beta > 0.0)) throw ConfigError("beta must be positive, got " + std::to_string(raw.beta));
  if (!(raw.delta >= 0.0)) throw ConfigError("delta must be nonnegative, got " + std::to_string(raw.delta));
  if (!(raw.r >= 1.0 && raw.r <= 3.0)) throw ConfigError("r out of [1,3], got " + std::to_string(raw.r));
  if (!(raw.rho >= 0.0)) throw ConfigError("rho must be nonnegative, got " + std::to_string(raw.rho));
  if (raw.chi() && !(raw.delta > 0.0)) {
    throw ConfigError("r = 3 activates the wall-viscosity term, which needs delta > 0");
  }
  if (!(raw.h_floor > 0.0)) throw ConfigError("h_floor must be positive");
  if (!(raw.newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (raw.max_inner_iters < 1) throw ConfigError("max_inner_iters must be at least 1");
  return raw;
}

std::string scheme_name(Scheme s) { return s == Scheme::BE ? "be" : "bdf2"; }

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

std::map<std::string, Section> parse_sections(std::istream& in) {
  static const std::vector<std::string> known = {"grid", "params", "forcing", "run", "init"};
  std::map<std::string, Section> sections;
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_line(lineno, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      bool ok = false;
      for (const auto& k : known) ok = ok || k == current;
      if (!ok) fail_line(lineno, "unknown section [" + current + "]");
      sections.try_emplace(current);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(lineno, "expected key = value");
    if (current.empty()) fail_line(lineno, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail_line(lineno, "empty key");
    if (value.empty()) fail_line(lineno, "empty value for key " + key);
    auto [it, inserted] = sections[current].try_emplace(key, Entry{value, lineno, false});
    if (!inserted) {
      fail_line(lineno, "duplicate key " + key + " (first set on line " + std::to_string(it->second.line) + ")");
    }
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(std::map<std::string, Section>& all, const std::string& name)
      : name_(name) {
    auto it = all.find(name);
    section_ = it == all.end() ? nullptr : &it->second;
  }

  bool present() const { return section_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (!section_) return std::nullopt;
    auto it = section_->find(key);
    if (it == section_->end()) return std::nullopt;
    it->second.used = true;
    last_line_ = it->second.line;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) {
      throw ConfigError("config: section [" + name_ + "] is missing required key " + key);
    }
    return *v;
  }

  double require_number(const std::string& key) { return to_number(key, require(key)); }

  double number_or(const std::string& key, double fallback) {
    auto v = get(key);
    return v ? to_number(key, *v) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_number(key, *v);
  }

  int require_int(const std::string& key) { return to_int(key, require(key)); }

  int int_or(const std::string& key, int fallback) {
    auto v = get(key);
    return v ? to_int(key, *v) : fallback;
  }

  int last_line() const { return last_line_; }

  void reject_unknown() const {
    if (!section_) return;
    for (const auto& [key, entry] : *section_) {
      if (!entry.used) fail_line(entry.line, "unknown key " + key + " in section [" + name_ + "]");
    }
  }

 private:
  double to_number(const std::string& key, const std::string& text) const {
    try {
      size_t consumed = 0;
      const double v = std::stod(text, &consumed);
      if (consumed != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail_line(last_line_, "key " + key + " is not a number: " + text);
    }
  }

  int to_int(const std::string& key, const std::string& text) const {
    try {
      size_t consumed = 0;
      const int v = std::stoi(text, &consumed);
      if (consumed != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail_line(last_line_, "key " + key + " is not an integer: " + text);
    }
  }

  const std::string name_;
  Section* section_ = nullptr;
  int last_line_ = 0;
};

std::vector<double> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial-profile file " + path.string());
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    try {
      size_t consumed = 0;
      const double v = std::stod(s, &consumed);
      if (consumed != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + " line " + std::to_string(lineno) + ": not a number: " + s);
    }
  }
  if (values.empty()) throw ConfigError("initial-profile file " + path.string() + " holds no values");
  return values;
}

}  // namespace

RunConfig load_config(std::istream& in, const std::filesystem::path& base_dir) {
  auto sections = parse_sections(in);
  for (const auto& name : {"grid", "params", "run", "init"}) {
    if (sections.find(name) == sections.end()) {
      throw ConfigError(std::string("config: missing section [") + name + "]");
    }
  }

  RunConfig config;

  SectionReader grid(sections, "grid");
  config.grid = build_grid(grid.require_int("n"));

  SectionReader params(sections, "params");
  ModelParams p;
  p.beta = params.require_number("beta");
  p.delta = params.require_number("delta");
  p.r = params.require_number("r");
  p.rho = params.number_or("rho", p.rho);
  p.h_floor = params.number_or("h_floor", p.h_floor);
  p.newton_tol = params.number_or("newton_tol", p.newton_tol);
  p.max_inner_iters = params.int_or("max_inner_iters", p.max_inner_iters);

  SectionReader run(sections, "run");
  // absent dt0 = 0 in the config object = pick from the initial profile
  const std::optional<double> dt0 = run.optional_number("dt0");
  if (dt0 && !(*dt0 > 0.0)) throw ConfigError("dt0 must be positive when given");
  config.dt0 = dt0.value_or(0.0);
  config.t_end = run.require_number("t_end");
  const std::string scheme = run.require("scheme");
  if (scheme == "be") {
    config.scheme = Scheme::BE;
  } else if (scheme == "bdf2") {
    config.scheme = Scheme::BDF2;
  } else {
    fail_line(run.last_line(), "scheme must be be or bdf2, got " + scheme);
  }
  config.output_every = run.require_int("output_every");
  if (!(config.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (config.output_every < 1) throw ConfigError("output_every must be at least 1");

  SectionReader forcing(sections, "forcing");
  if (forcing.present()) {
    const std::string f1 = forcing.require("f1");
    const std::optional<double> bound = forcing.optional_number("bound");
    const int q = forcing.int_or("quad_order", 16);
    Expr f1_expr;
    try {
      f1_expr = Expr::parse(f1, "xyt");
    } catch (const ConfigError& err) {
      throw ConfigError("config: [forcing] f1: " + std::string(err.what()));
    }
    p.forcing = make_forcing_spec(std::move(f1_expr), bound, config.t_end, q);
  } else {
    p.forcing = zero_forcing();
  }
  config.params = validate_params(p);

  SectionReader init(sections, "init");
  const auto h0 = init.get("h0");
  const auto file = init.get("file");
  if (h0 && file) throw ConfigError("config: [init] must set h0 or file, not both");
  if (!h0 && !file) throw ConfigError("config: section [init] is missing required key h0 (or file)");
  if (h0) {
    try {
      config.initial.profile = Expr::parse(*h0, "x");
    } catch (const ConfigError& err) {
      throw ConfigError("config: [init] h0: " + std::string(err.what()));
    }
  } else {
    config.initial.table = read_table(base_dir / *file);
  }

  grid.reject_unknown();
  params.reject_unknown();
  run.reject_unknown();
  forcing.reject_unknown();
  init.reject_unknown();

  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return load_config(in, path.parent_path());
}

GridField initial_field(const RunConfig& config) {
  GridField h0(config.grid);
  if (!config.initial.table.empty()) {
    if (static_cast<int>(config.initial.table.size()) != config.grid.n) {
      throw ConfigError("initial-profile table holds " + std::to_string(config.initial.table.size()) +
                        " values, grid needs " + std::to_string(config.grid.n));
    }
    for (int j = 0; j < config.grid.n; ++j) h0[j] = config.initial.table[static_cast<size_t>(j)];
  } else if (!config.initial.profile.empty()) {
    for (int j = 0; j < config.grid.n; ++j) h0[j] = config.initial.profile.eval(config.grid.node(j), 0.0, 0.0);
  } else {
    throw ConfigError("initial profile is empty");
  }
  for (int j = 0; j < config.grid.n; ++j) {
    if (!std::isfinite(h0[j]) || h0[j] <= 0.0) {
      throw ConfigError("initial profile must be strictly positive and finite, got " +
                        std::to_string(h0[j]) + " at node " + std::to_string(j));
    }
  }
  return h0;
}

}  // namespace thinfilm

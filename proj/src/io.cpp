#include "seaqt/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "seaqt/metrics.hpp"

namespace seaqt {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Config parsing helpers.

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': cannot parse '" + v + "' as a number");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config field '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split(v, ',')) out.push_back(parse_double(key, tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split(v, ',')) out.push_back(parse_int(key, tok));
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& v) {
  const auto rows = split(v, ';');
  if (rows.empty()) throw ConfigError("config field '" + key + "': empty matrix");
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) data.push_back(parse_list(key, row));
  const std::size_t n = data.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (data[r].size() != n) {
      throw ConfigError("config field '" + key + "': matrix must be square");
    }
    for (std::size_t c = 0; c < n; ++c) m(r, c) = data[r][c];
  }
  return m;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// Atomic file write: temp then rename.
void write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file " + tmp.string());
    f << content;
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  ContrastConfig contrast = default_contrast();
  bool contrast_touched = false;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "scenario") {
      cfg.scenario = value;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "levels") {
      cfg.levels = parse_list(key, value);
    } else if (key == "mean_energy") {
      cfg.mean_energy = parse_double(key, value);
    } else if (key == "initial") {
      cfg.initial = parse_list(key, value);
    } else if (key == "tau.policy") {
      if (value != "constant" && value != "adaptive-equality") {
        throw ConfigError("config field 'tau.policy': expected constant|adaptive-equality");
      }
      cfg.tau_policy = value;
    } else if (key == "tau.value") {
      cfg.tau_value = parse_double(key, value);
    } else if (key == "stepper.kind") {
      if (value != "rk4" && value != "rk45") {
        throw ConfigError("config field 'stepper.kind': expected rk4|rk45");
      }
      cfg.stepper_kind = value;
    } else if (key == "stepper.dt") {
      cfg.dt = parse_double(key, value);
    } else if (key == "stepper.rtol") {
      cfg.rtol = parse_double(key, value);
    } else if (key == "stepper.atol") {
      cfg.atol = parse_double(key, value);
    } else if (key == "stepper.dt_min") {
      cfg.dt_min = parse_double(key, value);
    } else if (key == "stepper.dt_max") {
      cfg.dt_max = parse_double(key, value);
    } else if (key == "run.t_start") {
      cfg.t_start = parse_double(key, value);
    } else if (key == "run.t_end") {
      cfg.t_end = parse_double(key, value);
    } else if (key == "run.backward_horizon") {
      cfg.backward_horizon = parse_double(key, value);
    } else if (key == "run.sample_every") {
      cfg.sample_every = parse_int(key, value);
    } else if (key == "run.mode") {
      if (value != "diagonal" && value != "full") {
        throw ConfigError("config field 'run.mode': expected diagonal|full");
      }
      cfg.mode = value;
    } else if (key == "run.backward") {
      cfg.backward = parse_bool(key, value);
    } else if (key == "run.stop_when_relaxed") {
      cfg.stop_when_relaxed = parse_bool(key, value);
    } else if (key == "run.observables") {
      cfg.observables = split(value, ',');
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "verify.dims") {
      cfg.verify_dims = parse_int_list(key, value);
    } else if (key == "verify.count") {
      cfg.verify_count = parse_int(key, value);
    } else if (key == "verify.kinds") {
      cfg.verify_kinds = split(value, ',');
      for (const auto& k : cfg.verify_kinds) {
        if (k != "diagonal" && k != "full" && k != "rank-deficient") {
          throw ConfigError("config field 'verify.kinds': unknown kind '" + k + "'");
        }
      }
    } else if (key == "verify.pairs") {
      cfg.verify_pairs = parse_int(key, value);
    } else if (key == "verify.replay") {
      cfg.verify_replay = value;
    } else if (key == "threads") {
      cfg.threads = value;
    } else if (key == "contrast.levels") {
      const auto v = parse_list(key, value);
      contrast.levels = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
      contrast_touched = true;
    } else if (key == "contrast.p0") {
      const auto v = parse_list(key, value);
      contrast.p0 = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
      contrast_touched = true;
    } else if (key == "contrast.w") {
      contrast.w = parse_matrix(key, value);
      contrast_touched = true;
    } else if (key == "contrast.tau") {
      contrast.tau = parse_double(key, value);
      contrast_touched = true;
    } else if (key == "contrast.horizon") {
      contrast.horizon = parse_double(key, value);
      contrast_touched = true;
    } else if (key == "contrast.dt") {
      contrast.dt = parse_double(key, value);
      contrast_touched = true;
    } else if (key == "contrast.sample_every") {
      contrast.sample_every = parse_int(key, value);
      contrast_touched = true;
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  if (contrast_touched) cfg.contrast = contrast;
  return cfg;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "scenario = " << scenario << "\n";
  out << "seed = " << seed << "\n";
  if (!levels.empty()) {
    std::vector<std::string> toks;
    for (double v : levels) toks.push_back(format_double(v));
    out << "levels = " << join(toks, ",") << "\n";
  }
  if (mean_energy) out << "mean_energy = " << format_double(*mean_energy) << "\n";
  if (!initial.empty()) {
    std::vector<std::string> toks;
    for (double v : initial) toks.push_back(format_double(v));
    out << "initial = " << join(toks, ",") << "\n";
  }
  out << "tau.policy = " << tau_policy << "\n";
  out << "tau.value = " << format_double(tau_value) << "\n";
  if (!stepper_kind.empty()) out << "stepper.kind = " << stepper_kind << "\n";
  if (dt) out << "stepper.dt = " << format_double(*dt) << "\n";
  if (rtol) out << "stepper.rtol = " << format_double(*rtol) << "\n";
  if (atol) out << "stepper.atol = " << format_double(*atol) << "\n";
  if (dt_min) out << "stepper.dt_min = " << format_double(*dt_min) << "\n";
  if (dt_max) out << "stepper.dt_max = " << format_double(*dt_max) << "\n";
  if (t_start) out << "run.t_start = " << format_double(*t_start) << "\n";
  if (t_end) out << "run.t_end = " << format_double(*t_end) << "\n";
  if (backward_horizon) out << "run.backward_horizon = " << format_double(*backward_horizon) << "\n";
  if (sample_every) out << "run.sample_every = " << *sample_every << "\n";
  if (!mode.empty()) out << "run.mode = " << mode << "\n";
  out << "run.backward = " << (backward ? "true" : "false") << "\n";
  if (stop_when_relaxed) {
    out << "run.stop_when_relaxed = " << (*stop_when_relaxed ? "true" : "false") << "\n";
  }
  if (!observables.empty()) out << "run.observables = " << join(observables, ",") << "\n";
  out << "output.dir = " << output_dir << "\n";
  {
    std::vector<std::string> toks;
    for (int d : verify_dims) toks.push_back(std::to_string(d));
    out << "verify.dims = " << join(toks, ",") << "\n";
  }
  out << "verify.count = " << verify_count << "\n";
  out << "verify.kinds = " << join(verify_kinds, ",") << "\n";
  out << "verify.pairs = " << verify_pairs << "\n";
  if (!verify_replay.empty()) out << "verify.replay = " << verify_replay << "\n";
  out << "threads = " << threads << "\n";
  if (contrast) {
    std::vector<std::string> toks;
    for (Eigen::Index i = 0; i < contrast->levels.size(); ++i) {
      toks.push_back(format_double(contrast->levels[i]));
    }
    out << "contrast.levels = " << join(toks, ",") << "\n";
    toks.clear();
    for (Eigen::Index i = 0; i < contrast->p0.size(); ++i) {
      toks.push_back(format_double(contrast->p0[i]));
    }
    out << "contrast.p0 = " << join(toks, ",") << "\n";
    std::vector<std::string> rows;
    for (Eigen::Index r = 0; r < contrast->w.rows(); ++r) {
      std::vector<std::string> cols;
      for (Eigen::Index c = 0; c < contrast->w.cols(); ++c) {
        cols.push_back(format_double(contrast->w(r, c)));
      }
      rows.push_back(join(cols, ","));
    }
    out << "contrast.w = " << join(rows, ";") << "\n";
    out << "contrast.tau = " << format_double(contrast->tau) << "\n";
    out << "contrast.horizon = " << format_double(contrast->horizon) << "\n";
    out << "contrast.dt = " << format_double(contrast->dt) << "\n";
    out << "contrast.sample_every = " << contrast->sample_every << "\n";
  }
  return out.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(to_text()); }

ExecPolicy RunConfig::exec_policy() const {
  if (threads == "serial" || threads == "1") return ExecPolicy::Serial;
  return ExecPolicy::Parallel;
}

ScenarioConfig RunConfig::resolve_scenario() const {
  ScenarioConfig sc = [&] {
    if (scenario != "inline") return named_scenario(scenario);
    if (levels.empty() || initial.empty()) {
      throw ConfigError("inline scenario requires 'levels' and 'initial'");
    }
    ScenarioConfig c;
    c.name = "inline";
    c.levels = Eigen::Map<const Eigen::VectorXd>(levels.data(), levels.size());
    c.initial = Eigen::Map<const Eigen::VectorXd>(initial.data(), initial.size());
    if (c.levels.size() != c.initial.size()) {
      throw ConfigError("inline scenario: 'levels' and 'initial' sizes differ");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < c.initial.size(); ++i) {
      if (c.initial[i] < 0.0) throw ConfigError("config field 'initial': negative occupation");
      sum += c.initial[i];
    }
    if (std::abs(sum - 1.0) > 1e-10) {
      throw ConfigError("config field 'initial': occupations must sum to 1 within 1e-10");
    }
    c.mean_energy = c.initial.dot(c.levels);
    c.t_start = 0.0;
    c.t_end = 1.0;
    return c;
  }();

  if (mean_energy && std::abs(*mean_energy - sc.mean_energy) > 1e-10) {
    throw ConfigError("config field 'mean_energy': inconsistent with the initial distribution (" +
                      format_double(sc.mean_energy) + ")");
  }
  sc.tau = tau_policy == "constant" ? TauPolicy::constant(tau_value)
                                    : TauPolicy::adaptive_equality();
  if (!stepper_kind.empty()) {
    if (stepper_kind == "rk4") {
      sc.stepper = FixedRk4{dt.value_or(1e-3)};
    } else {
      AdaptiveRk45 st;
      if (rtol) st.rtol = *rtol;
      if (atol) st.atol = *atol;
      if (dt_min) st.dt_min = *dt_min;
      if (dt_max) st.dt_max = *dt_max;
      sc.stepper = st;
    }
  } else if (dt && std::holds_alternative<FixedRk4>(sc.stepper)) {
    sc.stepper = FixedRk4{*dt};
  }
  if (t_start) sc.t_start = *t_start;
  if (t_end) sc.t_end = *t_end;
  if (backward_horizon) sc.backward_horizon = *backward_horizon;
  if (sample_every) sc.sample_every = *sample_every;
  if (!mode.empty()) {
    sc.mode = mode == "diagonal" ? EvolutionMode::DiagonalFastPath : EvolutionMode::Full;
  }
  if (stop_when_relaxed) sc.stop_when_relaxed = *stop_when_relaxed;
  return sc;
}

namespace {

// ---------------------------------------------------------------------------
// Trajectory presentation.

Trajectory concat_presented(Trajectory pre, Trajectory fwd) {
  // pre runs 0 -> t_start < 0; reverse it and drop its duplicate anchor.
  Trajectory out;
  out.mode = fwd.mode;
  const std::size_t n = pre.size();
  for (std::size_t i = n; i-- > 1;) {
    out.times.push_back(pre.times[i]);
    if (out.mode == EvolutionMode::DiagonalFastPath) {
      out.probabilities.push_back(std::move(pre.probabilities[i]));
    } else {
      out.states.push_back(std::move(pre.states[i]));
    }
  }
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    out.times.push_back(fwd.times[i]);
    if (out.mode == EvolutionMode::DiagonalFastPath) {
      out.probabilities.push_back(std::move(fwd.probabilities[i]));
    } else {
      out.states.push_back(std::move(fwd.states[i]));
    }
  }
  out.diagnostics = fwd.diagnostics;
  out.diagnostics.steps += pre.diagnostics.steps;
  out.diagnostics.max_trace_drift =
      std::max(out.diagnostics.max_trace_drift, pre.diagnostics.max_trace_drift);
  out.diagnostics.max_energy_drift =
      std::max(out.diagnostics.max_energy_drift, pre.diagnostics.max_energy_drift);
  out.diagnostics.worst_entropy_step =
      std::min(out.diagnostics.worst_entropy_step, pre.diagnostics.worst_entropy_step);
  out.diagnostics.zeros_preserved =
      out.diagnostics.zeros_preserved && pre.diagnostics.zeros_preserved;
  out.diagnostics.min_dt = std::min(out.diagnostics.min_dt, pre.diagnostics.min_dt);
  out.diagnostics.max_dt = std::max(out.diagnostics.max_dt, pre.diagnostics.max_dt);
  return out;
}

Trajectory run_presented(const ScenarioConfig& sc, const SeaModel& model, bool backward) {
  const DensityOperator anchor = DensityOperator::diagonal(sc.initial);
  EvolutionSpec spec{.initial = anchor,
                     .model = model,
                     .t_start = 0.0,
                     .t_end = sc.t_end,
                     .stepper = sc.stepper,
                     .sample_every = sc.sample_every,
                     .mode = sc.mode,
                     .stop_when_relaxed = sc.stop_when_relaxed};
  if (backward) {
    spec.t_end = -sc.backward_horizon;
    return integrate(spec);
  }
  if (sc.t_start < 0.0) {
    EvolutionSpec pre = spec;
    pre.t_end = sc.t_start;
    Trajectory pre_traj = integrate(pre);
    Trajectory fwd_traj = integrate(spec);
    return concat_presented(std::move(pre_traj), std::move(fwd_traj));
  }
  spec.t_start = sc.t_start;  // plain forward leg starting at the anchor time
  spec.t_end = sc.t_end;
  return integrate(spec);
}

// ---------------------------------------------------------------------------
// CSV and JSON serialization.

std::string csv_escape(const std::string& s) { return s; }  // names are [A-Za-z0-9_[\]]

std::string trajectory_csv(const Trajectory& traj, const TrajectoryReport& rep) {
  std::ostringstream out;
  const bool diag = traj.mode == EvolutionMode::DiagonalFastPath;
  out << "t";
  if (diag) {
    for (Eigen::Index i = 0; i < traj.probabilities.front().size(); ++i) {
      out << ",p_" << (i + 1);
    }
  } else {
    const Eigen::Index d = traj.states.front().dim();
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        out << ",rho_re_" << r << "_" << c << ",rho_im_" << r << "_" << c;
      }
    }
  }
  out << ",entropy,entropy_rate,theta,delta_H,delta_S,delta_M,tau_U,tau_D,tau_K,tau_S,tau_UD,"
         "a_tau\n";

  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]);
    if (diag) {
      const auto& p = traj.probabilities[i];
      for (Eigen::Index j = 0; j < p.size(); ++j) out << "," << format_double(p[j]);
    } else {
      const Matrix& m = traj.states[i].matrix();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          out << "," << format_double(m(r, c).real()) << "," << format_double(m(r, c).imag());
        }
      }
    }
    const StateSummary& st = rep.samples[i].state;
    out << "," << format_double(st.entropy) << "," << format_double(st.entropy_rate) << ","
        << format_double(st.theta) << "," << format_double(st.delta_h) << ","
        << format_double(st.delta_s) << "," << format_double(st.delta_m) << ","
        << format_double(st.times.tau_u) << "," << format_double(st.times.tau_d) << ","
        << format_double(st.times.tau_k) << "," << format_double(st.times.tau_s) << ","
        << format_double(st.times.tau_ud) << "," << format_double(st.times.a_tau) << "\n";
  }
  return out.str();
}

std::string report_csv(const TrajectoryReport& rep) {
  std::ostringstream out;
  out << "t,row,name,spread,rate,tau_F,r_FM,c_FH,conserved,degenerate,kind,residual\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const std::string t = format_double(rep.times[i]);
    for (const auto& row : rep.samples[i].rows) {
      out << t << ",observable," << csv_escape(row.name) << "," << format_double(row.spread)
          << "," << format_double(row.rate) << "," << format_double(row.tau_f) << ","
          << format_double(row.r_fm) << "," << format_double(row.c_fh) << ","
          << (row.conserved ? 1 : 0) << "," << (row.degenerate ? 1 : 0) << ",,\n";
    }
    for (const auto& res : rep.samples[i].residuals) {
      out << t << ",check," << res.family << "[" << res.subject << "],,,,,,,"
          << (res.degenerate ? 1 : 0) << ","
          << (res.kind == CheckKind::Equality ? "equality" : "bound") << ","
          << format_double(res.residual) << "\n";
    }
  }
  for (const auto& res : rep.interval_checks) {
    out << ",interval," << res.family << "[" << res.subject << "],,,,,,,"
        << (res.degenerate ? 1 : 0) << ",bound," << format_double(res.residual) << "\n";
  }
  return out.str();
}

struct PlotSpec {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // [column][sample]
};

std::vector<PlotSpec> build_plots(const Trajectory& traj, const TrajectoryReport& rep,
                                  const SeaModel& model) {
  const std::size_t n = traj.size();
  const auto projectors = energy_projectors(model.hamiltonian());
  const std::size_t np = projectors.size();

  auto series = [&](auto&& fn) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(i);
    return v;
  };
  const std::vector<double> ts = traj.times;

  std::vector<std::vector<double>> occ(np);
  for (std::size_t k = 0; k < np; ++k) {
    if (traj.mode == EvolutionMode::DiagonalFastPath) {
      // Sum the raw probabilities over the projector's levels so the plot
      // reproduces the trajectory columns byte for byte.
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < projectors[k].op.dim(); ++j) {
        if (projectors[k].op.matrix()(j, j).real() > 0.5) idx.push_back(j);
      }
      occ[k] = series([&](std::size_t i) {
        double acc = 0.0;
        for (Eigen::Index j : idx) acc += traj.probabilities[i][j];
        return acc;
      });
    } else {
      occ[k] =
          series([&](std::size_t i) { return mean_value(traj.state_at(i), projectors[k].op); });
    }
  }

  // Per-sample lookup of an observable row by name.
  auto row_value = [&](std::size_t i, const std::string& name, auto&& proj, double dflt) {
    for (const auto& row : rep.samples[i].rows) {
      if (row.name == name) return proj(row);
    }
    return dflt;
  };

  std::vector<PlotSpec> plots;
  {
    PlotSpec p{.file = "plot_occupations.csv", .columns = {"t"}, .data = {ts}};
    for (std::size_t k = 0; k < np; ++k) {
      p.columns.push_back(projectors[k].name);
      p.data.push_back(occ[k]);
    }
    plots.push_back(std::move(p));
  }
  plots.push_back({"plot_entropy.csv",
                   {"t", "entropy"},
                   {ts, series([&](std::size_t i) { return rep.samples[i].state.entropy; })}});
  plots.push_back(
      {"plot_entropy_rate.csv",
       {"t", "entropy_rate", "cov_MM", "cov_SS", "cov_HH_over_theta2"},
       {ts, series([&](std::size_t i) { return rep.samples[i].state.entropy_rate; }),
        series([&](std::size_t i) { return rep.samples[i].state.cov_mm; }),
        series([&](std::size_t i) {
          const double d = rep.samples[i].state.delta_s;
          return d * d;
        }),
        series([&](std::size_t i) {
          const double th = rep.samples[i].state.theta;
          const double d = rep.samples[i].state.delta_h;
          return std::isfinite(th) ? d * d / (th * th) : 0.0;
        })}});
  plots.push_back({"plot_theta.csv",
                   {"t", "theta", "spread_ratio", "product_bound"},
                   {ts, series([&](std::size_t i) { return rep.samples[i].state.theta; }),
                    series([&](std::size_t i) {
                      const auto& st = rep.samples[i].state;
                      return st.delta_s > 0.0 ? st.delta_h / st.delta_s
                                              : std::numeric_limits<double>::infinity();
                    }),
                    series([&](std::size_t i) {
                      const auto& st = rep.samples[i].state;
                      const double ss = st.delta_s * st.delta_s;
                      return ss > 0.0 ? 2.0 * st.delta_m * st.delta_h / ss
                                      : std::numeric_limits<double>::infinity();
                    })}});
  plots.push_back(
      {"plot_inverse_times.csv",
       {"t", "inv_tau_D", "inv_tau_S", "inv_tau_K"},
       {ts, series([&](std::size_t i) {
              const double v = rep.samples[i].state.times.tau_d;
              return std::isfinite(v) ? 1.0 / v : 0.0;
            }),
        series([&](std::size_t i) {
          const double v = rep.samples[i].state.times.tau_s;
          return std::isfinite(v) ? 1.0 / v : 0.0;
        }),
        series([&](std::size_t i) {
          const double v = rep.samples[i].state.times.tau_k;
          return std::isfinite(v) ? 1.0 / v : 0.0;
        })}});
  {
    PlotSpec p{.file = "plot_occupation_times.csv", .columns = {"t"}, .data = {ts}};
    for (std::size_t k = 0; k < np; ++k) {
      p.columns.push_back("inv_tau_" + projectors[k].name);
      p.data.push_back(series([&](std::size_t i) {
        const double tf = row_value(
            i, projectors[k].name, [](const ObservableRow& r) { return r.tau_f; },
            std::numeric_limits<double>::infinity());
        return std::isfinite(tf) ? 1.0 / tf : 0.0;
      }));
    }
    p.columns.push_back("inv_tau_D");
    p.data.push_back(series([&](std::size_t i) {
      const double v = rep.samples[i].state.times.tau_d;
      return std::isfinite(v) ? 1.0 / v : 0.0;
    }));
    plots.push_back(std::move(p));
  }
  {
    PlotSpec p{.file = "plot_speed_bounds.csv", .columns = {"t"}, .data = {ts}};
    for (std::size_t k = 0; k < np; ++k) {
      p.columns.push_back("two_tauD_rate_" + projectors[k].name);
      p.data.push_back(series([&](std::size_t i) {
        const double rate = row_value(
            i, projectors[k].name, [](const ObservableRow& r) { return std::abs(r.rate); }, 0.0);
        const double td = rep.samples[i].state.times.tau_d;
        return std::isfinite(td) ? 2.0 * td * rate : 0.0;
      }));
    }
    plots.push_back(std::move(p));
  }
  return plots;
}

std::string plot_csv(const PlotSpec& p) {
  std::ostringstream out;
  out << join(p.columns, ",") << "\n";
  const std::size_t n = p.data.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p.data.size(); ++c) {
      if (c) out << ",";
      out << format_double(p.data[c][i]);
    }
    out << "\n";
  }
  return out.str();
}

json diagnostics_json(const TrajectoryDiagnostics& d) {
  return json{{"steps", d.steps},
              {"max_trace_drift", d.max_trace_drift},
              {"max_energy_drift", d.max_energy_drift},
              {"worst_entropy_step", d.worst_entropy_step},
              {"zeros_preserved", d.zeros_preserved},
              {"min_dt", std::isfinite(d.min_dt) ? d.min_dt : 0.0},
              {"max_dt", std::isfinite(d.max_dt) ? d.max_dt : 0.0},
              {"relaxed_stop", d.relaxed_stop}};
}

struct InvariantScan {
  int violations = 0;
  double worst_bound = std::numeric_limits<double>::infinity();
  double worst_equality = 0.0;
  std::string worst_family = "";
};

InvariantScan scan_report(const TrajectoryReport& rep, double tol = 1e-8) {
  InvariantScan s;
  auto consider = [&](const ResidualEntry& r) {
    if (r.degenerate) return;
    if (r.kind == CheckKind::Equality) {
      if (std::abs(r.residual) > s.worst_equality) {
        s.worst_equality = std::abs(r.residual);
        if (std::abs(r.residual) > tol) s.worst_family = r.family + "[" + r.subject + "]";
      }
      if (std::abs(r.residual) > tol) ++s.violations;
    } else {
      if (r.residual < s.worst_bound) {
        s.worst_bound = r.residual;
        if (r.residual < -tol) s.worst_family = r.family + "[" + r.subject + "]";
      }
      if (r.residual < -tol) ++s.violations;
    }
  };
  for (const auto& sample : rep.samples) {
    for (const auto& r : sample.residuals) consider(r);
  }
  for (const auto& r : rep.interval_checks) consider(r);
  return s;
}

std::vector<NamedObservable> select_observables(const RunConfig& cfg, const SeaModel& model) {
  auto all = default_observables(model);
  if (cfg.observables.empty()) return all;
  std::vector<NamedObservable> out;
  for (const auto& name : cfg.observables) {
    if (name == "S") continue;  // entropy snapshot is always included internally
    bool found = false;
    for (const auto& obs : all) {
      if (obs.name == name) {
        out.push_back(obs);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("config field 'run.observables': unknown observable '" + name + "'");
  }
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config, OutputBundle* bundle) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig sc = config.resolve_scenario();
  const SeaModel model = sc.make_model();

  // Scenario invariant: the anchor matches the declared mean energy.
  const double anchor_energy = sc.initial.dot(sc.levels);
  if (std::abs(anchor_energy - sc.mean_energy) > 1e-10) {
    throw ConfigError("scenario anchor violates its mean energy by " +
                      format_double(std::abs(anchor_energy - sc.mean_energy)));
  }

  Trajectory traj;
  try {
    traj = run_presented(sc, model, config.backward);
  } catch (const IntegrationError& err) {
    std::cerr << "simulate: numerical failure: " << err.what()
              << " (last good time " << format_double(err.last_good_time()) << ")\n";
    return kExitNumericalError;
  }

  const auto observables = select_observables(config, model);
  const TrajectoryReport rep = trajectory_report(traj, model, observables);
  const InvariantScan scan = scan_report(rep);

  std::filesystem::create_directories(config.output_dir);
  OutputBundle out;
  out.directory = config.output_dir;
  out.trajectory_csv = out.directory / "trajectory.csv";
  out.report_csv = out.directory / "report.csv";
  out.summary_json = out.directory / "summary.json";

  write_file(out.trajectory_csv, trajectory_csv(traj, rep));
  write_file(out.report_csv, report_csv(rep));
  for (const auto& plot : build_plots(traj, rep, model)) {
    const auto path = out.directory / plot.file;
    write_file(path, plot_csv(plot));
    out.plot_files.push_back(path);
  }

  // Final occupations (diagonal modes: the distribution itself).
  std::vector<double> final_dist;
  if (traj.mode == EvolutionMode::DiagonalFastPath) {
    const auto& p = traj.probabilities.back();
    final_dist.assign(p.data(), p.data() + p.size());
  } else {
    for (const auto& proj : energy_projectors(model.hamiltonian())) {
      final_dist.push_back(mean_value(traj.states.back(), proj.op.matrix()));
    }
  }

  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  json summary{
      {"command", "simulate"},
      {"scenario", sc.name},
      {"backward", config.backward},
      {"config_hash", hex64(config.hash())},
      {"config", config.to_text()},
      {"files",
       {{"trajectory", out.trajectory_csv.filename().string()},
        {"report", out.report_csv.filename().string()},
        {"plots", [&] {
           std::vector<std::string> names;
           for (const auto& p : out.plot_files) names.push_back(p.filename().string());
           return names;
         }()}}},
      {"samples", traj.size()},
      {"final_time", traj.times.back()},
      {"final_distribution", final_dist},
      {"diagnostics", diagnostics_json(traj.diagnostics)},
      {"invariants",
       {{"violations", scan.violations},
        {"worst_bound_residual", scan.worst_bound},
        {"worst_equality_defect", scan.worst_equality},
        {"worst_family", scan.worst_family}}},
      {"wall_time_ms", wall.count()}};
  write_file(out.summary_json, summary.dump(2) + "\n");
  if (bundle) *bundle = out;

  if (scan.violations > 0) {
    std::cerr << "simulate: invariant violation in " << scan.worst_family << "\n";
    return kExitInvariantError;
  }
  return kExitOk;
}

namespace {

/// Load a state serialized by the offender-replay writer. Validation errors
/// (bad trace, positivity) propagate to the caller.
DensityOperator load_replay_state(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw ConfigError("verify.replay: cannot read " + file.string());
  json j;
  f >> j;
  const int dim = j.at("dim").get<int>();
  const auto re = j.at("rho_re").get<std::vector<double>>();
  const auto im = j.at("rho_im").get<std::vector<double>>();
  if (static_cast<int>(re.size()) != dim * dim || im.size() != re.size()) {
    throw ConfigError("verify.replay: malformed state file");
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      m(r, c) = Complex(re[r * dim + c], im[r * dim + c]);
    }
  }
  return DensityOperator(m);
}

}  // namespace

int cmd_verify(const RunConfig& config, OutputBundle* bundle) {
  const auto t0 = std::chrono::steady_clock::now();

  if (!config.verify_replay.empty()) {
    // Replay a single serialized state; validation failures exit 1.
    const DensityOperator rho = load_replay_state(config.verify_replay);
    Eigen::VectorXd levels(rho.dim());
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
      levels[j] = double(j) / double(rho.dim() - 1);
    }
    const SeaModel model(HermitianOperator::diagonal(levels), {}, {}, TauPolicy::constant(1.0));
    const UncertaintyReport rep = inequality_suite(rho, model, default_observables(model));
    int violations = 0;
    std::string worst;
    for (const auto& r : rep.residuals) {
      if (!residual_ok(r)) {
        ++violations;
        if (worst.empty()) worst = r.family + "[" + r.subject + "]";
      }
    }
    std::filesystem::create_directories(config.output_dir);
    if (bundle) bundle->directory = config.output_dir;
    if (violations > 0) {
      std::cerr << "verify: replayed state fails " << worst << "\n";
      return kExitInvariantError;
    }
    return kExitOk;
  }

  struct Item {
    int dim;
    CorpusKind kind;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  {
    std::vector<CorpusKind> kinds;
    for (const auto& k : config.verify_kinds) {
      kinds.push_back(k == "diagonal" ? CorpusKind::Diagonal
                      : k == "full"   ? CorpusKind::Full
                                      : CorpusKind::RankDeficient);
    }
    if (kinds.empty() || config.verify_dims.empty() || config.verify_count < 1) {
      throw ConfigError("verify: empty corpus specification");
    }
    for (int i = 0; i < config.verify_count; ++i) {
      const int dim = config.verify_dims[i % config.verify_dims.size()];
      const CorpusKind kind = kinds[(i / config.verify_dims.size()) % kinds.size()];
      items.push_back({dim, kind, config.seed + static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL});
    }
  }

  struct ItemResult {
    std::vector<ResidualEntry> residuals;
    std::string error;
  };
  std::vector<ItemResult> results(items.size());

  for_each_index(items.size(), config.exec_policy(), [&](std::size_t idx) {
    const Item& item = items[idx];
    ItemResult& res = results[idx];
    try {
      const auto corpus = random_state_corpus(item.dim, 1, item.seed, item.kind);
      const DensityOperator& rho = corpus.front();

      Eigen::VectorXd levels(item.dim);
      for (int j = 0; j < item.dim; ++j) levels[j] = double(j) / double(item.dim - 1);
      const SeaModel model(HermitianOperator::diagonal(levels), {}, {},
                           TauPolicy::constant(1.0));

      UncertaintyReport rep = inequality_suite(rho, model, default_observables(model));
      res.residuals = std::move(rep.residuals);

      // Random observable pairs: generalized Schrodinger and Robertson checks.
      for (int pair = 0; pair < config.verify_pairs; ++pair) {
        const HermitianOperator f = random_observable(item.dim, item.seed ^ (0xABCDULL + pair));
        const HermitianOperator g = random_observable(item.dim, item.seed ^ (0x1234ULL + pair));
        const double cff = covariance(rho, f, f);
        const double cgg = covariance(rho, g, g);
        if (cff <= 0.0 || cgg <= 0.0) continue;
        const double cfg_ = covariance(rho, f, g);
        const double com = comm_correlation(rho, f, g);
        const double denom = cff * cgg;
        res.residuals.push_back({"schrodinger_random_pair", "FG",
                                 CheckKind::LowerBound,
                                 1.0 - (cfg_ * cfg_ + com * com) / denom, false});
        res.residuals.push_back({"robertson_pair", "FG", CheckKind::LowerBound,
                                 1.0 - com * com / denom, false});
      }
    } catch (const std::exception& err) {
      res.error = err.what();
    }
  });

  struct FamilyStat {
    long count = 0;
    long degenerate = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_item = 0;
    bool equality = false;
  };
  std::map<std::string, FamilyStat> families;
  int violations = 0;
  std::string first_error;
  std::size_t offending_item = items.size();

  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].error.empty()) {
      if (first_error.empty()) first_error = results[i].error;
      continue;
    }
    for (const auto& r : results[i].residuals) {
      FamilyStat& fs = families[r.family];
      fs.equality = r.kind == CheckKind::Equality;
      ++fs.count;
      if (r.degenerate) {
        ++fs.degenerate;
        continue;
      }
      const double key = fs.equality ? -std::abs(r.residual) : r.residual;
      if (key < fs.worst) {
        fs.worst = key;
        fs.worst_item = i;
      }
      if (!residual_ok(r)) {
        ++violations;
        if (offending_item == items.size()) offending_item = i;
      }
    }
  }

  std::filesystem::create_directories(config.output_dir);
  OutputBundle out;
  out.directory = config.output_dir;
  out.report_csv = out.directory / "verify_report.csv";
  out.summary_json = out.directory / "verify_summary.json";

  std::ostringstream csv;
  csv << "family,kind,checks,degenerate,worst_residual,worst_item\n";
  for (const auto& [name, fs] : families) {
    const double shown = fs.equality ? -fs.worst : fs.worst;
    csv << name << "," << (fs.equality ? "equality" : "bound") << "," << fs.count << ","
        << fs.degenerate << ","
        << (std::isfinite(shown) ? format_double(shown) : "") << "," << fs.worst_item << "\n";
  }
  write_file(out.report_csv, csv.str());

  // Serialize the offending state for replay when a violation occurred.
  std::string replay_file;
  if (offending_item < items.size()) {
    const Item& item = items[offending_item];
    const auto corpus = random_state_corpus(item.dim, 1, item.seed, item.kind);
    const Matrix& m = corpus.front().matrix();
    json state{{"dim", item.dim}, {"seed", item.seed}};
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        re.push_back(m(r, c).real());
        im.push_back(m(r, c).imag());
      }
    }
    state["rho_re"] = re;
    state["rho_im"] = im;
    const auto path = out.directory / "verify_offender.json";
    write_file(path, state.dump(2) + "\n");
    replay_file = path.filename().string();
  }

  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  json summary{{"command", "verify"},
               {"config_hash", hex64(config.hash())},
               {"states", items.size()},
               {"threads", config.exec_policy() == ExecPolicy::Serial ? 1 : max_threads()},
               {"violations", violations},
               {"first_error", first_error},
               {"offender_replay", replay_file},
               {"files", {{"report", out.report_csv.filename().string()}}},
               {"wall_time_ms", wall.count()}};
  write_file(out.summary_json, summary.dump(2) + "\n");
  if (bundle) *bundle = out;

  if (!first_error.empty()) {
    std::cerr << "verify: state evaluation failed: " << first_error << "\n";
    return kExitConfigError;
  }
  if (violations > 0) {
    std::cerr << "verify: " << violations << " residuals failed; see " << out.report_csv << "\n";
    return kExitInvariantError;
  }
  return kExitOk;
}

int cmd_contrast(const RunConfig& config, OutputBundle* bundle) {
  const auto t0 = std::chrono::steady_clock::now();
  const ContrastConfig cc = config.contrast.value_or(default_contrast());

  const SeaModel model(HermitianOperator::diagonal(cc.levels), {}, {},
                       TauPolicy::constant(cc.tau));
  const TransitionMatrix w(cc.w);
  bool applicable_input = false;
  for (Eigen::Index i = 0; i < cc.p0.size(); ++i) {
    if (cc.p0[i] == 0.0) applicable_input = true;
  }

  const ContrastRecord rec = contrast_run(cc.p0, w, model, cc.horizon, cc.dt, cc.sample_every);

  std::filesystem::create_directories(config.output_dir);
  OutputBundle out;
  out.directory = config.output_dir;
  out.trajectory_csv = out.directory / "contrast_trajectories.csv";
  out.summary_json = out.directory / "contrast_summary.json";

  std::ostringstream csv;
  csv << "t";
  for (Eigen::Index i = 0; i < cc.p0.size(); ++i) csv << ",pauli_p_" << (i + 1);
  for (Eigen::Index i = 0; i < cc.p0.size(); ++i) csv << ",sea_p_" << (i + 1);
  csv << "\n";
  const std::size_t n = std::min(rec.pauli_trajectory.size(), rec.sea_trajectory.size());
  for (std::size_t i = 0; i < n; ++i) {
    csv << format_double(rec.pauli_trajectory.times[i]);
    for (Eigen::Index j = 0; j < cc.p0.size(); ++j) {
      csv << "," << format_double(rec.pauli_trajectory.probabilities[i][j]);
    }
    for (Eigen::Index j = 0; j < cc.p0.size(); ++j) {
      csv << "," << format_double(rec.sea_trajectory.probabilities[i][j]);
    }
    csv << "\n";
  }
  write_file(out.trajectory_csv, csv.str());

  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  json summary{{"command", "contrast"},
               {"config_hash", hex64(config.hash())},
               {"applicable", rec.applicable},
               {"not_applicable_reason",
                rec.applicable ? ""
                : applicable_input
                    ? "the zero level receives no transitions from occupied levels"
                    : "p0 is strictly positive"},
               {"zero_level", rec.zero_level + 1},
               {"pauli_repopulation_time", rec.pauli_repopulation_time},
               {"sea_level_max", rec.sea_level_max},
               {"initial_entropy_rate_divergent", rec.initial_rate_divergent},
               {"files", {{"trajectories", out.trajectory_csv.filename().string()}}},
               {"wall_time_ms", wall.count()}};
  write_file(out.summary_json, summary.dump(2) + "\n");
  if (bundle) *bundle = out;
  return kExitOk;
}

}  // namespace seaqt

#include "mixtopo/recipes.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "mixtopo/egp.hpp"
#include "mixtopo/geometry.hpp"
#include "mixtopo/parallel.hpp"
#include "mixtopo/serialize.hpp"
#include "mixtopo/uhlmann.hpp"

namespace fs = std::filesystem;

namespace mixtopo {

namespace {

struct OutputFile {
  std::string name;
  std::string text;
};

struct TaskResult {
  TaskRecord record;
  std::vector<OutputFile> files;
  nlohmann::json summary;
};

using Task = std::function<TaskResult()>;

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_text(const CsvTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

nlohmann::json table_json(const CsvTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      try {
        obj[table.header[i]] = parse_double(row[i]);
      } catch (const ConfigError&) {
        obj[table.header[i]] = row[i];
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

/// The table in the configured format, named stem.csv or stem.json.
OutputFile render(const RunConfig& config, const std::string& stem, const CsvTable& table) {
  if (config.format == OutputFormat::json) return {stem + ".json", table_json(table).dump(2) + "\n"};
  return {stem + ".csv", csv_text(table)};
}

OutputFile render_profile(const RunConfig& config, const std::string& stem, const PhaseProfile& p) {
  if (config.format == OutputFormat::json) return {stem + ".json", phase_profile_json(p).dump(2) + "\n"};
  return {stem + ".csv", csv_text(phase_profile_table(p))};
}

/// Runs the task list on the worker pool and writes every file from this
/// thread in task order.
RunManifest execute(const std::string& command, const RunConfig& config, const std::vector<Task>& tasks,
                    const std::function<void(std::vector<TaskResult>&, RunManifest&)>& finish) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config.echo();
  manifest.started_at = now_iso8601();

  auto results = parallel_map(tasks.size(), config.jobs, [&](std::size_t i) {
    try {
      return tasks[i]();
    } catch (const Error& e) {
      TaskResult failed;
      failed.record.ok = false;
      failed.record.message = e.what();
      return failed;
    }
  });

  fs::create_directories(config.output_dir);
  for (std::size_t i = 0; i < results.size(); ++i) {
    TaskResult& r = results[i];
    if (r.record.name.empty()) r.record.name = command + "#" + std::to_string(i);
    for (const OutputFile& f : r.files) {
      write_file_atomically((fs::path(config.output_dir) / f.name).string(), f.text);
      r.record.outputs.push_back(f.name);
    }
  }
  finish(results, manifest);
  for (auto& r : results) manifest.tasks.push_back(std::move(r.record));
  manifest.finished_at = now_iso8601();
  write_file_atomically((fs::path(config.output_dir) / "manifest.json").string(),
                        manifest.to_json().dump(2) + "\n");
  return manifest;
}

/// A task that never fails on its own; wraps a body that may throw and names it.
Task named(std::string name, std::function<TaskResult()> body) {
  return [name = std::move(name), body = std::move(body)]() {
    TaskResult r;
    try {
      r = body();
    } catch (const ConfigError& e) {
      r.record.ok = false;
      r.record.config_error = true;
      r.record.message = e.what();
    } catch (const Error& e) {
      r.record.ok = false;
      r.record.message = e.what();
    }
    r.record.name = name;
    return r;
  };
}

TaskRecord written(const std::string& name, const std::string& file) {
  TaskRecord r;
  r.name = name;
  r.outputs.push_back(file);
  return r;
}

void write_summary(const RunConfig& config, const std::string& name, const nlohmann::json& j,
                   RunManifest& manifest) {
  write_file_atomically((fs::path(config.output_dir) / name).string(), j.dump(2) + "\n");
  manifest.tasks.push_back(written("summary", name));
}

double gap_or_nan(const RunConfig& config) {
  if (!has_bloch_model(config)) return std::numeric_limits<double>::quiet_NaN();
  return config_gap(config);
}

/// Temperatures to run: the configured list for thermal models, a single
/// placeholder for tabulated covariances.
std::vector<double> run_temperatures(const RunConfig& config) {
  return has_bloch_model(config) ? config.temperatures : std::vector<double>{0.0};
}

nlohmann::json nullable(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

bool RunManifest::has_config_error() const {
  for (const auto& t : tasks) {
    if (t.config_error) return true;
  }
  return false;
}

bool RunManifest::ok() const {
  for (const auto& t : tasks) {
    if (!t.ok) return false;
  }
  return true;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  j["config"] = config;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["ok"] = ok();
  nlohmann::json tasks_json = nlohmann::json::array();
  std::vector<std::string> outputs;
  for (const auto& t : tasks) {
    tasks_json.push_back({{"name", t.name}, {"status", t.ok ? "ok" : "error"},
                          {"message", t.message}, {"outputs", t.outputs}});
    outputs.insert(outputs.end(), t.outputs.begin(), t.outputs.end());
  }
  j["tasks"] = tasks_json;
  j["outputs"] = outputs;
  return j;
}

void write_file_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << text;
    if (!out.flush()) throw Error("failed writing '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "egp-profile", "egp-winding",
                                                 "invariant-scan", "chern", "gauge-reduction"};
  return names;
}

RunManifest run_command(const std::string& command, const RunConfig& config) {
  if (command == "spectrum") return cmd_spectrum(config);
  if (command == "egp-profile") return cmd_egp_profile(config);
  if (command == "egp-winding") return cmd_egp_winding(config);
  if (command == "invariant-scan") return cmd_invariant_scan(config);
  if (command == "chern") return cmd_chern(config);
  if (command == "gauge-reduction") return cmd_gauge_reduction(config);
  throw ConfigError("unknown command '" + command + "'");
}

RunManifest cmd_spectrum(const RunConfig& config) {
  const BlochModel model = build_model(config);
  const MomentumGrid grid(config.nx, config.ny);
  std::vector<Task> tasks;
  tasks.push_back(named("bands", [&] {
    CsvTable t;
    t.header = {"kx", "ky"};
    for (int n = 1; n <= model.bands(); ++n) t.header.push_back("e" + std::to_string(n));
    for (int i = 0; i < grid.nx(); ++i) {
      for (int j = 0; j < grid.ny(); ++j) {
        const BandSystem bands = band_system(model(grid.at(i, j)));
        std::vector<std::string> row{format_double(grid.kx(i)), format_double(grid.ky(j))};
        for (Eigen::Index n = 0; n < bands.energies.size(); ++n) row.push_back(format_double(bands.energies(n)));
        t.rows.push_back(std::move(row));
      }
    }
    TaskResult r;
    r.files.push_back(render(config, "spectrum", t));
    return r;
  }));
  tasks.push_back(named("gap", [&] {
    TaskResult r;
    const double gap = band_gap(model, grid, config.mu);
    r.summary = {{"gap", gap}, {"mu", config.mu}, {"nx", grid.nx()}, {"ny", grid.ny()}, {"model", model.name()}};
    CsvTable t{{"gap", "mu"}, {{format_double(gap), format_double(config.mu)}}};
    r.files.push_back(render(config, "gap", t));
    return r;
  }));
  return execute("spectrum", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    nlohmann::json j = results[1].record.ok ? results[1].summary : nlohmann::json{{"error", results[1].record.message}};
    write_summary(config, "spectrum_summary.json", j, m);
  });
}

RunManifest cmd_egp_profile(const RunConfig& config) {
  const double gap = gap_or_nan(config);
  const std::vector<double> temps = run_temperatures(config);
  struct Job {
    std::size_t t_index;
    double t_energy;
    int cells;
    Direction direction;
  };
  std::vector<Job> jobs;
  for (std::size_t ti = 0; ti < temps.size(); ++ti) {
    for (int n : config.chain_lengths) {
      for (Direction d : config.directions) jobs.push_back({ti, temperature_energy(config, temps[ti], gap), n, d});
    }
  }
  std::vector<Task> tasks;
  for (const Job& job : jobs) {
    const std::string stem = std::string("egp_") + to_string(job.direction) + "_N" +
                             std::to_string(job.cells) + "_T" + std::to_string(job.t_index);
    tasks.push_back(named(stem, [&config, job, stem] {
      const GaussianStateSpec spec = build_state(config, job.t_energy);
      PhaseProfile profile = egp_profile(spec, job.direction, job.cells, config.transverse_points);
      TaskResult r;
      r.files.push_back(render_profile(config, stem, profile));
      // Pointwise distance from the zero-temperature fictitious ground state.
      double max_dev = 0.0;
      for (std::size_t i = 0; i < profile.size(); ++i) {
        const double ref = fictitious_ground_state_phase(spec, job.direction, profile.parameters[i], job.cells);
        max_dev = std::max(max_dev, std::abs(principal_angle(profile.phases[i] - ref)));
      }
      r.summary = {{"file", r.files.front().name}, {"direction", to_string(job.direction)},
                   {"N", job.cells}, {"T", job.t_energy}, {"max_ground_state_deviation", max_dev}};
      try {
        const int w = winding_of_phase_profile(profile);
        r.summary["winding"] = w;
        r.summary["chern"] = job.direction == Direction::x ? w : -w;
      } catch (const UnderResolvedError& e) {
        r.summary["winding_error"] = e.what();
      }
      return r;
    }));
  }
  return execute("egp-profile", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    nlohmann::json profiles = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      nlohmann::json s = results[i].summary;
      if (!results[i].record.ok) s = {{"task", results[i].record.name}, {"error", results[i].record.message}};
      s["T_index"] = jobs[i].t_index;
      s["T_config"] = temps[jobs[i].t_index];
      profiles.push_back(std::move(s));
    }
    write_summary(config, "egp_profile_summary.json", {{"gap", nullable(gap)}, {"profiles", profiles}}, m);
  });
}

RunManifest cmd_egp_winding(const RunConfig& config) {
  const double gap = gap_or_nan(config);
  const std::vector<double> temps = run_temperatures(config);
  std::vector<Task> tasks;
  for (std::size_t ti = 0; ti < temps.size(); ++ti) {
    const double t = temperature_energy(config, temps[ti], gap);
    tasks.push_back(named("winding_T" + std::to_string(ti), [&config, t] {
      const GaussianStateSpec spec = build_state(config, t);
      TaskResult r;
      const PhaseProfile x = egp_profile(spec, Direction::x, config.chain_length, config.transverse_points);
      const PhaseProfile y = egp_profile(spec, Direction::y, config.chain_length, config.transverse_points);
      const ChernPair c = chern_from_zak_windings(x, y);
      r.summary = {{"cx", c.cx}, {"cy", c.cy}};
      if (!c.consistent()) {
        r.record.ok = false;
        r.record.message = "EGP Chern inconsistency";
      }
      return r;
    }));
  }
  return execute("egp-winding", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    CsvTable t{{"T", "T_gap", "beta", "N", "Cx", "Cy", "status"}, {}};
    for (std::size_t i = 0; i < results.size(); ++i) {
      const double te = temperature_energy(config, temps[i], gap);
      const auto& s = results[i].summary;
      const bool has = s.contains("cx");
      t.rows.push_back({format_double(te), format_double(te / gap),
                        format_double(te == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / te),
                        std::to_string(config.chain_length),
                        has ? std::to_string(s["cx"].get<int>()) : "",
                        has ? std::to_string(s["cy"].get<int>()) : "",
                        results[i].record.ok ? "ok" : results[i].record.message});
    }
    const OutputFile f = render(config, "egp_winding", t);
    write_file_atomically((fs::path(config.output_dir) / f.name).string(), f.text);
    m.tasks.push_back(written("table", f.name));
  });
}

RunManifest cmd_invariant_scan(const RunConfig& config) {
  const BlochModel model = build_model(config);
  const double gap = config_gap(config);
  const std::vector<double> grid_t = log_spaced(config.scan_t_min, config.scan_t_max, config.scan_points);
  // Each task fills its own slot.
  std::vector<InvariantReport> rows(grid_t.size());
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < grid_t.size(); ++i) {
    const double t = temperature_energy(config, grid_t[i], gap);
    tasks.push_back(named("scan_T" + std::to_string(i), [&config, &model, &rows, i, t] {
      ScanOptions options;
      options.transverse_points = config.transverse_points;
      options.chain_length = config.chain_length;
      options.ground_grid = config.nx;
      options.refinement = config.path;
      rows[i] = uhlmann_temperature_scan(model, config.mu, {t}, options).front();
      TaskResult r;
      r.record.ok = rows[i].ok();
      r.record.message = rows[i].ok() ? "" : rows[i].status;
      return r;
    }));
  }
  return execute("invariant-scan", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    nlohmann::json asym = nlohmann::json::array();
    bool egp_all_equal = true;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      InvariantReport& row = rows[i];
      if (row.beta == 0.0) {
        // The task died before producing a row.
        row.temperature = temperature_energy(config, grid_t[i], gap);
        row.beta = 1.0 / row.temperature;
        row.gap = gap;
        row.status = results[i].record.message;
      }
      if (row.uhlmann_asymmetric()) {
        asym.push_back(row.temperature / gap);
        lo = std::min(lo, row.temperature / gap);
        hi = std::max(hi, row.temperature / gap);
      }
      if (!row.egp_symmetric()) egp_all_equal = false;
    }
    const OutputFile f = render(config, "invariant_scan", invariant_report_table(rows));
    write_file_atomically((fs::path(config.output_dir) / f.name).string(), f.text);
    m.tasks.push_back(written("table", f.name));
    nlohmann::json summary{{"gap", gap},
                           {"rows", rows.size()},
                           {"asymmetric_uhlmann_T_gap", asym},
                           {"asymmetric_rows", asym.size()},
                           {"egp_symmetric_all_rows", egp_all_equal}};
    if (!asym.empty()) summary["asymmetric_window_T_gap"] = {lo, hi};
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : rows) all.push_back(invariant_report_json(r));
    summary["reports"] = all;
    write_summary(config, "invariant_scan_summary.json", summary, m);
  });
}

RunManifest cmd_chern(const RunConfig& config) {
  const BlochModel model = build_model(config);
  const MomentumGrid grid(config.nx, config.ny);
  const double gap = config_gap(config);
  struct Job {
    std::string source;  // "h" or "hfict"
    std::size_t t_index;
    double t_energy;
    int band;
  };
  std::vector<Job> jobs;
  for (int n = 0; n < model.bands(); ++n) jobs.push_back({"h", 0, 0.0, n});
  for (std::size_t ti = 0; ti < config.temperatures.size(); ++ti) {
    for (int n = 0; n < model.bands(); ++n) {
      jobs.push_back({"hfict", ti, temperature_energy(config, config.temperatures[ti], gap), n});
    }
  }
  std::vector<Task> tasks;
  for (const Job& job : jobs) {
    const std::string stem = job.source == "h"
                                 ? "curvature_h_band" + std::to_string(job.band)
                                 : "curvature_hfict_T" + std::to_string(job.t_index) + "_band" +
                                       std::to_string(job.band);
    tasks.push_back(named(stem, [&config, &model, grid, job, stem] {
      const FrameFunction frame =
          job.source == "h" ? band_frame(model, job.band)
                            : fictitious_band_frame(build_state(config, job.t_energy), job.band);
      const CurvatureField field = berry_curvature_plaquette(sample_frames(frame, grid));
      const int c = chern_number(field);
      TaskResult r;
      if (config.format == OutputFormat::json) {
        r.files.push_back({stem + ".json", curvature_json(field, c).dump(2) + "\n"});
      } else {
        r.files.push_back({stem + ".csv", csv_text(curvature_table(field))});
      }
      r.summary = {{"chern", c}};
      return r;
    }));
  }
  return execute("chern", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    CsvTable t{{"source", "T", "band", "chern", "status"}, {}};
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Job& job = jobs[i];
      const bool ok = results[i].record.ok;
      t.rows.push_back({job.source, job.source == "h" ? "" : format_double(job.t_energy),
                        std::to_string(job.band),
                        ok ? std::to_string(results[i].summary["chern"].get<int>()) : "",
                        ok ? "ok" : results[i].record.message});
    }
    const OutputFile f = render(config, "chern", t);
    write_file_atomically((fs::path(config.output_dir) / f.name).string(), f.text);
    m.tasks.push_back(written("table", f.name));
  });
}

RunManifest cmd_gauge_reduction(const RunConfig& config) {
  const double gap = gap_or_nan(config);
  const std::vector<double> temps = run_temperatures(config);
  struct Job {
    std::size_t t_index;
    double t_energy;
    Direction direction;
  };
  std::vector<Job> jobs;
  for (std::size_t ti = 0; ti < temps.size(); ++ti) {
    for (Direction d : config.directions) jobs.push_back({ti, temperature_energy(config, temps[ti], gap), d});
  }
  std::vector<Task> tasks;
  for (const Job& job : jobs) {
    const std::string stem = std::string("gauge_reduction_") + to_string(job.direction) + "_T" +
                             std::to_string(job.t_index);
    tasks.push_back(named(stem, [&config, job, stem] {
      const GaussianStateSpec spec = build_state(config, job.t_energy);
      const auto points = gauge_reduction_deviation(spec, job.direction, config.transverse_k, config.chain_lengths);
      CsvTable t{{"N", "egp_phase", "reference_phase", "deviation", "log_modulus"}, {}};
      bool decreasing = true;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        t.rows.push_back({std::to_string(p.cells), format_double(p.egp_phase), format_double(p.reference_phase),
                          format_double(p.deviation), format_double(p.log_modulus)});
        if (i > 0 && !(p.deviation < points[i - 1].deviation)) decreasing = false;
      }
      TaskResult r;
      r.files.push_back(render(config, stem, t));
      r.summary = {{"file", r.files.front().name}, {"direction", to_string(job.direction)},
                   {"T", job.t_energy}, {"strictly_decreasing", decreasing}};
      double largest = 0.0;
      for (const auto& p : points) largest = std::max(largest, p.deviation);
      try {
        // Pure states reduce exactly; there is no decay to fit.
        if (largest < 1e-10) throw NumericalError("exact reduction");
        r.summary["alpha_estimate"] = fit_decay_exponent(points);
      } catch (const NumericalError&) {
        r.summary["alpha_estimate"] = nullptr;
      }
      return r;
    }));
  }
  return execute("gauge-reduction", config, tasks, [&](std::vector<TaskResult>& results, RunManifest& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      nlohmann::json s = results[i].summary;
      if (!results[i].record.ok) s = {{"task", results[i].record.name}, {"error", results[i].record.message}};
      s["T_config"] = temps[jobs[i].t_index];
      rows.push_back(std::move(s));
    }
    write_summary(config, "gauge_reduction_summary.json",
                  {{"gap", nullable(gap)}, {"transverse_k", config.transverse_k}, {"series", rows}}, m);
  });
}

}  // namespace mixtopo

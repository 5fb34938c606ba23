#pragma once

// Scenario execution. Output directory layout:
//
//   manifest.txt      written first, rewritten with status and timings at the end
//   diagnostics.csv   one row per step
//   snapshots.csv     index of snapshot files (with reference_error when available)
//   snapshots/        density snapshots, four records n0..n3 per file
//   paired_densities.csv   model = both only
//   report.csv, summary.txt   validation suites only
//
// Exit codes: 0 pass, 1 check failure, 2 usage or configuration error, 3 numerical abort.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rashba/grid.hpp"
#include "rashba/kinetic.hpp"
#include "rashba/potential.hpp"
#include "rashba/qdd.hpp"
#include "rashba/scenario.hpp"
#include "rashba/snapshot.hpp"
#include "rashba/suites.hpp"
#include "rashba/validation.hpp"

namespace rashba {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_usage = 2, exit_numerical = 3 };

inline std::optional<PotentialField> build_potential(const PotentialSpec& p, const Grid& g) {
  const double c1 = p.c1.value_or(0.5 * g.spec().Lx1), c2 = p.c2.value_or(0.5 * g.spec().Lx2);
  if (p.kind == "none") return std::nullopt;
  if (p.kind == "constant") return PotentialField::constant(g, p.value);
  if (p.kind == "linear") return PotentialField::linear(g, p.e1, p.e2, p.value);
  if (p.kind == "quadratic") return PotentialField::quadratic(g, p.curvature, c1, c2);
  if (p.kind == "gaussian") return PotentialField::gaussian(g, p.amplitude, c1, c2, p.width);
  if (p.kind == "cosine") return PotentialField::cosine(g, p.amplitude, p.m1, p.m2);
  if (p.kind == "tabulated") {
    const auto snaps = read_snapshots(p.file);
    if (snaps.empty()) throw ConfigError(p.file + ": no snapshot records");
    const auto& s = snaps.front();
    if (s.shape != std::vector<std::size_t>{g.nx1(), g.nx2()}) {
      throw ConfigError(p.file + ": potential shape does not match the position grid");
    }
    Field2 v(g.shape2());
    std::copy(s.values.begin(), s.values.end(), v.begin());
    return PotentialField::tabulated(g, std::move(v));
  }
  throw ConfigError("unknown potential kind '" + p.kind + "'");
}

inline SpinDensityField build_initial(const InitialSpec& in, const Grid& g) {
  SpinDensityField n = zero_density(g);
  const double L1 = g.spec().Lx1;
  if (in.kind == "uniform") {
    n[0].fill(in.base);
    n[1].fill(in.spin1);
    n[2].fill(in.spin2);
    n[3].fill(in.spin3);
  } else if (in.kind == "gaussian-bump") {
    const double c1 = in.c1.value_or(0.5 * g.spec().Lx1), c2 = in.c2.value_or(0.5 * g.spec().Lx2);
    n[0] = periodic_gaussian(g, in.base, in.amplitude, c1, c2, in.width, in.width);
    const std::array<double, 3> pol{in.spin1, in.spin2, in.spin3};
    for (int k = 0; k < 3; ++k) {
      n[k + 1] = n[0];
      n[k + 1] *= pol[k];
    }
  } else if (in.kind == "spin-helix") {
    const double q = 2.0 * std::numbers::pi * in.mode / L1;
    n[0].fill(in.base);
    n[1] = g.sample2([&](double x1, double) { return in.amplitude * in.base * std::cos(q * x1); });
    n[2] = g.sample2([&](double x1, double) { return in.amplitude * in.base * std::sin(q * x1); });
  } else if (in.kind == "tabulated") {
    const auto snaps = read_snapshots(in.file);
    if (snaps.size() != 4) throw ConfigError(in.file + ": expected four records n0..n3");
    for (int k = 0; k < 4; ++k) {
      if (snaps[k].shape != std::vector<std::size_t>{g.nx1(), g.nx2()}) {
        throw ConfigError(in.file + ": record " + snaps[k].field + " does not match the position grid");
      }
      std::copy(snaps[k].values.begin(), snaps[k].values.end(), n[k].begin());
    }
  } else {
    throw ConfigError("unknown initial kind '" + in.kind + "'");
  }
  if (!n.finite()) throw ConfigError("initial state is not finite");
  for (double v : n[0])
    if (!(v > 0.0)) throw ConfigError("initial charge density must be positive everywhere");
  if (!(max_spin_ratio(n) < 1.0)) throw ConfigError("initial state must satisfy |n| < n0 everywhere");
  return n;
}

inline ModelParams model_params(const Scenario& s, const Grid& g) {
  ModelParams p;
  p.epsilon = s.params.epsilon;
  p.alpha = s.params.alpha;
  p.tau = s.params.tau;
  p.collisionless = s.params.collisionless;
  p.kappa = s.params.kappa;
  p.potential = build_potential(s.potential, g);
  p.validate();
  return p;
}

inline SuiteResult run_validation_suite(const Scenario& s) {
  const auto& v = s.validation;
  const std::string& name = s.suite;
  auto need_alpha = [&] {
    if (!(s.params.alpha > 0.0)) throw ConfigError("validate:" + name + " needs α > 0");
  };
  if (name == "pauli") return suite_pauli(s.seed, v.pairs);
  if (name == "identities") return suite_identities(s.grid, s.params.epsilon, v.trials, s.seed, v.tolerance);
  if (name == "aux") {
    ModelParams p;
    p.epsilon = s.params.epsilon;
    p.alpha = s.params.alpha;
    return suite_aux(s.grid, p, v.states, s.seed, v.tolerance);
  }
  if (name == "residual") return suite_residual(s.grid, s.params.epsilon, s.seed);
  if (name == "semiclassical") {
    need_alpha();
    return suite_semiclassical(s.grid, s.params.alpha, v.eps_list, s.seed, v.random_potential);
  }
  if (name == "drift-diffusion") {
    need_alpha();
    return suite_qdd(s.grid, s.params.alpha, s.seed);
  }
  if (name == "conservation") return suite_kinetic(s.grid, s.seed);
  if (name == "diffusion-limit") {
    DiffusionStudyConfig cfg;
    cfg.grid = s.grid;
    cfg.params = model_params(s, Grid(s.grid));
    cfg.taus = v.tau_list;
    cfg.t_probe = v.t_probe;
    cfg.dt_per_tau = v.dt_per_tau;
    cfg.kinetic_cfl = v.kinetic_cfl;
    cfg.qdd_c = v.qdd_c;
    cfg.min_order = v.min_order;
    cfg.parallel = v.parallel;
    return suite_diffusion(cfg, v.negative_control);
  }
  if (name == "spin-decay") {
    need_alpha();
    return suite_spin_decay(s.grid, s.params.alpha, v.tau_list);
  }
  if (name == "moyal") return suite_moyal(s.grid, s.params.epsilon);
  throw ConfigError("unknown validation suite '" + name + "'");
}

namespace detail {

class Manifest {
 public:
  Manifest(std::filesystem::path path, const Scenario& s) : path_(std::move(path)), scenario_(s) {}

  void write(const std::string& status, const std::vector<std::pair<std::string, double>>& timings = {},
             const std::string& message = {}) const {
    std::ofstream os(path_);
    if (!os) throw std::runtime_error("cannot write " + path_.string());
    os << "rashba-run manifest\n";
    os << "version " << version << '\n';
    os << "scenario " << scenario_.name << '\n';
    os << "model " << scenario_.model_name() << '\n';
    os << "seed " << scenario_.seed << '\n';
    os << "status " << status << '\n';
    if (!message.empty()) os << "message " << message << '\n';
    for (const auto& [k, t] : timings) os << "time " << k << ' ' << std::fixed << std::setprecision(3) << t << " s\n";
    os << "--- scenario\n" << emit_config(scenario_);
  }

 private:
  std::filesystem::path path_;
  Scenario scenario_;
};

inline std::string snapshot_name(const std::string& model, std::size_t index, SnapshotFormat f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu", index);
  return "snapshots/" + model + "_" + buf + (f == SnapshotFormat::csv ? ".csv" : ".bin");
}

// Writes diagnostics rows and snapshot files for one model as they are produced.
class Recorder {
 public:
  Recorder(const std::filesystem::path& out, std::string model, const Scenario& s, const Grid& g,
           std::ofstream& diagnostics, std::ofstream& index)
      : out_(out), model_(std::move(model)), scenario_(s), grid_(g), diag_(diagnostics), index_(index) {}

  void attach(RunOptions& opt) {
    opt.on_step = [this](const StepDiagnostics& d) {
      diag_ << model_ << ',' << d.step << ',' << to_text(d.t) << ',' << to_text(d.mass) << ','
            << to_text(d.spin_total) << ',' << to_text(d.max_spin_ratio) << '\n';
    };
    opt.on_snapshot = [this](const DensitySnapshot& snap) {
      const std::string file = snapshot_name(model_, count_++, scenario_.output.format);
      write_density_snapshot((out_ / file).string(), snap.n, scenario_.grid, snap.t, scenario_.output.format);
      index_ << model_ << ',' << to_text(snap.t) << ',' << file << ',' << to_text(total_mass(snap.n, grid_)) << ','
             << reference_error(snap) << '\n';
      diag_.flush();
      index_.flush();
      snapshots_.push_back(snap);
    };
  }

  const std::vector<DensitySnapshot>& snapshots() const { return snapshots_; }

 private:
  std::string reference_error(const DensitySnapshot& snap) const {
    if (scenario_.output.reference != "heat-kernel") return {};
    const auto& in = scenario_.initial;
    const double c1 = in.c1.value_or(0.5 * grid_.spec().Lx1), c2 = in.c2.value_or(0.5 * grid_.spec().Lx2);
    const double sigma = std::sqrt(in.width * in.width + 2.0 * scenario_.params.kappa * snap.t);
    const Field2 exact = periodic_gaussian(grid_, in.base, in.amplitude, c1, c2, in.width, sigma);
    return to_text(l2_norm(snap.n[0] - exact, grid_) / l2_norm(exact, grid_));
  }

  std::filesystem::path out_;
  std::string model_;
  const Scenario& scenario_;
  const Grid& grid_;
  std::ofstream& diag_;
  std::ofstream& index_;
  std::size_t count_ = 0;
  std::vector<DensitySnapshot> snapshots_;
};

// Largest step <= dt_max that divides the output interval exactly.
inline double aligned_dt(double dt_max, double interval) {
  if (interval <= 0.0) return dt_max;
  return interval / std::ceil(interval / dt_max - 1e-9);
}

inline void write_paired(const std::filesystem::path& path, const std::vector<DensitySnapshot>& kin,
                         const std::vector<DensitySnapshot>& qdd, const Grid& g) {
  if (kin.size() != qdd.size()) throw std::runtime_error("paired output: snapshot counts differ");
  std::ofstream os(path);
  os << "t,x1,x2,kinetic_n0,kinetic_n1,kinetic_n2,kinetic_n3,qdd_n0,qdd_n1,qdd_n2,qdd_n3\n";
  for (std::size_t s = 0; s < kin.size(); ++s) {
    if (std::abs(kin[s].t - qdd[s].t) > 1e-9) throw std::runtime_error("paired output: time axes differ");
    const std::string t = to_text(kin[s].t);
    std::size_t flat = 0;
    for (double x1 : g.x1())
      for (double x2 : g.x2()) {
        os << t << ',' << to_text(x1) << ',' << to_text(x2);
        for (int k = 0; k < 4; ++k) os << ',' << to_text(kin[s].n[k][flat]);
        for (int k = 0; k < 4; ++k) os << ',' << to_text(qdd[s].n[k][flat]);
        os << '\n';
        ++flat;
      }
  }
}

}  // namespace detail

/// Runs one scenario into `out`. Configuration errors that surface while building
/// fields map to exit 2, solver aborts to exit 3; the manifest records either.
inline int run_scenario(const Scenario& s, const std::filesystem::path& out, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  fs::create_directories(out);
  const detail::Manifest manifest(out / "manifest.txt", s);
  manifest.write("running");

  auto finish = [&](int code, const std::string& status, const std::string& message) {
    manifest.write(status, {{"total", elapsed()}}, message);
    if (log && !message.empty()) *log << status << ": " << message << '\n';
    return code;
  };

  try {
    if (s.model == ModelKind::validate) {
      const SuiteResult r = run_validation_suite(s);
      {
        std::ofstream os(out / "report.csv");
        os << "# seed " << s.seed << '\n';
        write_suite_csv(os, r);
      }
      const std::string text = summary(r);
      std::ofstream(out / "summary.txt") << text << '\n';
      if (log) *log << text << '\n';
      manifest.write(r.passed() ? "pass" : "check-failure", {{r.name, r.seconds}, {"total", elapsed()}});
      return r.passed() ? exit_pass : exit_check_failure;
    }

    const Grid g(s.grid);
    const ModelParams params = model_params(s, g);
    const SpinDensityField initial = build_initial(s.initial, g);
    fs::create_directories(out / "snapshots");
    std::ofstream diag(out / "diagnostics.csv");
    diag << "model,step,t,mass,spin_total,max_spin_ratio\n";
    std::ofstream index(out / "snapshots.csv");
    index << "model,t,file,mass,reference_error\n";

    auto options = [&](double dt) {
      RunOptions opt;
      opt.dt = dt;
      opt.output_interval = s.output.interval;
      opt.progress = log;
      opt.progress_every = static_cast<std::size_t>(s.output.progress_every);
      return opt;
    };
    std::vector<std::pair<std::string, double>> timings;

    if (s.model == ModelKind::kinetic || s.model == ModelKind::qdd) {
      const bool kinetic = s.model == ModelKind::kinetic;
      detail::Recorder rec(out, kinetic ? "kinetic" : "qdd", s, g, diag, index);
      auto opt = options(s.grid.dt);
      rec.attach(opt);
      const double t0 = elapsed();
      if (kinetic) {
        run_kinetic(initial, params, g, s.output.t_end, opt);
      } else {
        opt.cfl = s.validation.qdd_c;
        run_qdd(initial, params, g, s.output.t_end, opt);
      }
      timings.push_back({kinetic ? "kinetic" : "qdd", elapsed() - t0});
    } else {
      // Both models on one time axis: each step divides the output interval.
      if (s.output.interval > 0.0) {
        const double k = s.output.t_end / s.output.interval;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
          throw ConfigError("model = both needs t_end to be a multiple of the output interval");
        }
      }
      detail::Recorder kin(out, "kinetic", s, g, diag, index);
      detail::Recorder qdd(out, "qdd", s, g, diag, index);
      auto ko = options(detail::aligned_dt(s.grid.dt, s.output.interval));
      kin.attach(ko);
      double t0 = elapsed();
      run_kinetic(initial, params, g, s.output.t_end, ko);
      timings.push_back({"kinetic", elapsed() - t0});
      auto qo = options(detail::aligned_dt(
          std::min(s.grid.dt, qdd_stable_dt(g, params, s.validation.qdd_c)), s.output.interval));
      qo.cfl = s.validation.qdd_c;
      qdd.attach(qo);
      t0 = elapsed();
      run_qdd(initial, params, g, s.output.t_end, qo);
      timings.push_back({"qdd", elapsed() - t0});
      detail::write_paired(out / "paired_densities.csv", kin.snapshots(), qdd.snapshots(), g);
    }
    timings.push_back({"total", elapsed()});
    manifest.write("pass", timings);
    return exit_pass;
  } catch (const NumericalError& e) {
    return finish(exit_numerical, "numerical-abort", e.what());
  } catch (const StabilityError& e) {
    return finish(exit_usage, "config-error", e.what());
  } catch (const ConfigError& e) {
    return finish(exit_usage, "config-error", e.what());
  } catch (const std::invalid_argument& e) {
    return finish(exit_usage, "config-error", e.what());
  }
}

}  // namespace rashba

#include "expint/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>

#include <fmt/format.h>

#include "expint/errors.hpp"
#include "expint/phi.hpp"

namespace expint {
namespace fs = std::filesystem;

namespace {

std::string norm_key(NormType type) {
  switch (type) {
    case NormType::max: return "max";
    case NormType::c1_discrete: return "c1";
    case NormType::holder: return "holder";
  }
  return "unknown";
}

std::string meta_header(const std::string& hash) {
  return fmt::format("config_hash={}\nversion={}\n", hash, EXPINT_VERSION);
}

void append_fit(std::string& out, const std::string& prefix, const std::optional<FitResult>& fit,
                const std::string& flag) {
  if (fit) {
    out += fmt::format("{}.order={}\n{}.r2={}\n{}.residual={}\n{}.points={}\n", prefix,
                       format_number(fit->order), prefix, format_number(fit->r2), prefix,
                       format_number(fit->residual), prefix, fit->points);
  }
  out += fmt::format("{}.flag={}\n", prefix, flag.empty() ? "none" : flag);
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

struct Prepared {
  ExperimentConfig config;
  std::string hash;
  fs::path dir;
};

Prepared prepare(const fs::path& config_path, Command command, const RunOptions& options) {
  if (options.threads < 1) throw ConfigError("--threads must be at least 1");
  Prepared p;
  p.config = load_config(config_path, command);
  if (options.seed) apply_seed_override(p.config, *options.seed);
  p.hash = config_hash(p.config);
  p.dir = resolve_output_dir(options, p.config.output);
  std::error_code ec;
  fs::create_directories(p.dir, ec);
  if (ec) throw IoError("cannot create output directory '" + p.dir.string() + "': " + ec.message());
  write_file_atomic(p.dir / "config.echo",
                    fmt::format("; config_hash={}\n{}", p.hash, echo_config(p.config)));
  return p;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

fs::path resolve_output_dir(const RunOptions& options, const OutputConfig& output) {
  if (options.out) return *options.out;
  if (!output.directory.empty()) return output.directory;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "expint_out";
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

void apply_seed_override(ExperimentConfig& config, std::uint64_t seed) {
  config.problem.u0.seed = seed;
  config.defect.v.seed = seed;
  for (auto& n : config.study.norms) n.seed = seed;
}

std::string report_csv(const ConvergenceReport& report, const std::string& hash) {
  std::string out = fmt::format("# config_hash={}\ntau,error_max,error_c1,error_holder\n", hash);
  const NormType columns[] = {NormType::max, NormType::c1_discrete, NormType::holder};
  for (std::size_t i = 0; i < report.taus.size(); ++i) {
    out += format_number(report.taus[i]);
    for (NormType type : columns) {
      const NormSeries* s = report.series(type);
      out += ',';
      out += s ? format_number(s->errors[i]) : "nan";
    }
    out += '\n';
  }
  return out;
}

std::string report_meta(const ConvergenceReport& report, const std::string& hash) {
  std::string out = meta_header(hash);
  out += fmt::format("problem={}\nscheme={}\nT={}\nreference={}\nreference_tau={}\n",
                     report.problem, report.scheme, format_number(report.T), report.reference,
                     format_number(report.reference_tau));
  for (const auto& s : report.norms) {
    const std::string prefix = "fit." + norm_key(s.kind.type);
    if (s.kind.type == NormType::holder) {
      out += fmt::format("{}.exponent={}\n{}.samples={}\n{}.seed={}\n", prefix,
                         format_number(s.kind.exponent), prefix, s.kind.samples, prefix, s.kind.seed);
    }
    append_fit(out, prefix, s.fit, s.flag);
  }
  std::string steps;
  for (long step : report.divergence_step) steps += (steps.empty() ? "" : " ") + std::to_string(step);
  out += fmt::format("diverged={}\ndivergence_step={}\n", report.any_diverged() ? 1 : 0, steps);
  return out;
}

std::string timing_csv(const ConvergenceReport& report, const std::string& hash) {
  std::string out = fmt::format("# config_hash={}\ntau,wall_ms\n", hash);
  for (std::size_t i = 0; i < report.taus.size(); ++i) {
    out += fmt::format("{},{:.3f}\n", format_number(report.taus[i]), report.runtime_ms[i]);
  }
  return out;
}

std::string defect_csv(const DefectReport& report, const std::string& hash) {
  std::string out = fmt::format("# config_hash={}\nt,defect_norm,k,beta1\n", hash);
  for (std::size_t i = 0; i < report.ts.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", format_number(report.ts[i]), format_number(report.defects[i]),
                       report.k, format_number(report.beta1));
  }
  return out;
}

std::string defect_meta(const DefectReport& report, const std::string& hash) {
  std::string out = meta_header(hash);
  out += fmt::format("label={}\nk={}\nbeta1={}\n", report.label, report.k, format_number(report.beta1));
  append_fit(out, "fit", report.fit, report.flag);
  return out;
}

std::string state_grid_csv(const State& u, const Grid& grid, double t, const std::string& hash) {
  if (static_cast<std::size_t>(u.size()) != grid.size()) throw ShapeError("state does not match grid");
  const int n = grid.subintervals();
  const int m = n - 1;
  std::string out = fmt::format("# t={} N={}\n# config_hash={}\n", format_number(t), n, hash);
  auto row = [&](auto value) {
    for (int i = 0; i <= n; ++i) {
      if (i > 0) out += ',';
      out += format_number(value(i));
    }
    out += '\n';
  };
  if (grid.dims() == 1) {
    row([&](int i) { return i == 0 || i == n ? 0.0 : u[i - 1]; });
  } else {
    for (int j = 0; j <= n; ++j) {
      row([&](int i) {
        return i == 0 || i == n || j == 0 || j == n ? 0.0 : u[(i - 1) + m * (j - 1)];
      });
    }
  }
  return out;
}

int cmd_phi(const PhiRequest& request, std::ostream& out, std::ostream& err) {
  if (request.k > kMaxPhiOrder) {
    err << fmt::format("error: order exceeds K_MAX ({} > {})\n", request.k, kMaxPhiOrder);
    return kExitConfig;
  }
  if (request.k < 0) {
    err << "error: order must be nonnegative\n";
    return kExitConfig;
  }
  return run_guarded(err, [&] {
    out << "z, phi, oracle, rel_diff\n";
    for (double z : request.z) {
      const double value = phi_scalar(request.k, z);
      double oracle = std::nan("");
      if (request.k == 0) {
        oracle = std::exp(z);
      } else {
        try {
          oracle = phi_quadrature_oracle(request.k, z, request.tol * std::max(1.0, std::abs(value)));
        } catch (const OracleConvergenceError&) {
        }
      }
      const double diff = std::abs(value - oracle);
      const double rel = oracle != 0.0 ? diff / std::abs(oracle) : diff;
      out << fmt::format("{}, {}, {}, {}\n", format_number(z), format_number(value),
                         format_number(oracle), format_number(rel));
    }
    return kExitOk;
  });
}

int cmd_converge(const fs::path& config_path, const RunOptions& options, std::ostream& log,
                 std::ostream& err) {
  return run_guarded(err, [&] {
    const Prepared p = prepare(config_path, Command::converge, options);
    const auto& study = p.config.study;
    const Problem problem = build_problem(p.config.problem);
    StudyOptions study_options;
    study_options.threads = options.threads;
    const ConvergenceReport report = run_convergence_study(
        problem, p.config.scheme, study.taus, study.T, study.norms, study.reference, study_options);

    write_file_atomic(p.dir / "report.csv", report_csv(report, p.hash));
    write_file_atomic(p.dir / "report.meta", report_meta(report, p.hash));
    write_file_atomic(p.dir / "timing.csv", timing_csv(report, p.hash));

    log << fmt::format("{} / {}: reference {}\n", report.problem, report.scheme, report.reference);
    for (const auto& s : report.norms) {
      if (s.fit) {
        log << fmt::format("  {:<12} order {:.4f}  r2 {:.4f}\n", s.kind.name(), s.fit->order, s.fit->r2);
      } else {
        log << fmt::format("  {:<12} no fit ({})\n", s.kind.name(), s.flag);
      }
    }
    log << "wrote " << (p.dir / "report.csv").string() << '\n';

    if (report.any_diverged()) {
      for (std::size_t i = 0; i < report.taus.size(); ++i) {
        if (report.divergence_step[i] >= 0) {
          err << fmt::format("error: tau={} diverged at step {}\n", format_number(report.taus[i]),
                             report.divergence_step[i]);
        }
      }
      return static_cast<int>(kExitDivergence);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_defect(const fs::path& config_path, const RunOptions& options, std::ostream& log,
               std::ostream& err) {
  return run_guarded(err, [&] {
    const Prepared p = prepare(config_path, Command::defect, options);
    const auto& d = p.config.defect;
    const SplitOperator op = split_laplacian_2d(d.N, d.nu);
    const State v = make_initial_data(d.v, op.full.grid());
    std::string label = to_string(d.v.kind);
    if (d.v.kind == InitialKind::fourier_decay) label += fmt::format("(gamma={})", d.v.gamma);
    const DefectReport report = split_defect_study(op, d.k, v, d.beta1, d.ts, label);

    write_file_atomic(p.dir / "defect.csv", defect_csv(report, p.hash));
    write_file_atomic(p.dir / "defect.meta", defect_meta(report, p.hash));
    if (report.fit) {
      log << fmt::format("{} k={}: slope {:.4f}\n", label, d.k, report.fit->order);
    } else {
      log << fmt::format("{} k={}: no fit ({})\n", label, d.k, report.flag);
    }
    log << "wrote " << (p.dir / "defect.csv").string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_solve(const fs::path& config_path, const RunOptions& options, std::ostream& log,
              std::ostream& err) {
  return run_guarded(err, [&] {
    const Prepared p = prepare(config_path, Command::solve, options);
    const auto& s = p.config.solve;
    const Problem problem = build_problem(p.config.problem);
    const Grid& grid = problem.grid();
    const Stepper stepper = make_stepper(p.config.scheme, problem, s.tau);
    const long n = step_count(s.T, s.tau);

    std::vector<long> marks;
    for (int i = 1; i <= s.snapshots; ++i) {
      const long step = std::lround(static_cast<double>(i) * static_cast<double>(n) / (s.snapshots + 1));
      if (step > 0 && step < n && (marks.empty() || marks.back() != step)) marks.push_back(step);
    }

    const auto start = std::chrono::steady_clock::now();
    State u = problem.u0;
    std::size_t next = 0;
    for (long step = 0; step < n; ++step) {
      const double t_n = static_cast<double>(step) * s.tau;
      try {
        u = stepper.step(problem.f, t_n, u);
      } catch (const DivergenceError& e) {
        throw DivergenceError(e.time(), step);
      }
      if (next < marks.size() && marks[next] == step + 1) {
        const double t = static_cast<double>(step + 1) * s.tau;
        write_file_atomic(p.dir / fmt::format("snapshot_{:03d}.csv", next + 1),
                          state_grid_csv(u, grid, t, p.hash));
        ++next;
      }
    }
    write_file_atomic(p.dir / "state_final.csv", state_grid_csv(u, grid, s.T, p.hash));
    write_file_atomic(p.dir / "timing.csv", fmt::format("# config_hash={}\nsteps,wall_ms\n{},{:.3f}\n",
                                                        p.hash, n, elapsed_ms(start)));
    write_file_atomic(p.dir / "solve.meta",
                      meta_header(p.hash) + fmt::format("problem={}\nscheme={}\nT={}\ntau={}\nsteps={}\nsnapshots={}\n",
                                                        problem.label, stepper.label(),
                                                        format_number(s.T), format_number(s.tau), n,
                                                        marks.size()));
    log << fmt::format("{} / {}: {} steps, wrote {}\n", problem.label, stepper.label(), n,
                       (p.dir / "state_final.csv").string());
    return static_cast<int>(kExitOk);
  });
}

}  // namespace expint

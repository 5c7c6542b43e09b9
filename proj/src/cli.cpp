#include "stq/cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stq/analysis.hpp"
#include "stq/config.hpp"
#include "stq/report.hpp"

namespace stq {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;

struct RunContext {
  ExperimentConfig cfg;
  std::filesystem::path out;
  int jobs = 1;
};

RunContext make_context(const CliOptions& opts) {
  RunContext ctx{ExperimentConfig::load(opts.config_path), {}, opts.jobs};
  if (opts.seed) ctx.cfg.seed = *opts.seed;
  ctx.out = opts.out_dir.value_or(ctx.cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + ctx.out.string() +
                  "': " + ec.message());
  }
  return ctx;
}

std::string csv_header(uint64_t hash) {
  return "# config_hash=" + hash_hex(hash) + "\n";
}

void parallel_for(int jobs, size_t n, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string round4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

std::string vec_round4(const Vec& v) {
  std::ostringstream out;
  out << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << (i ? ", " : "") << round4(v[i]);
  }
  out << "]";
  return out.str();
}

void print_certificate_table(const Certificate& cert) {
  std::cout << "  c        = " << round4(cert.c)
            << "    (d1, d2) = (" << round4(cert.d1) << ", " << round4(cert.d2)
            << ")\n";
  std::cout << "  theta_cl = " << vec_round4(cert.theta_cl)
            << "    theta_op = " << vec_round4(cert.theta_op) << "\n";
  std::cout << "  R1       = " << round4(cert.R1)
            << "    R2 = " << round4(cert.R2) << "\n";
  std::cout << "  Gamma    = " << round4(cert.Gamma)
            << "    R  = " << round4(cert.R) << "\n";
  std::cout << "  alpha    = " << round4(cert.alpha)
            << "    sigma0 = " << round4(cert.sigma0) << "\n";
  std::cout << "  kappa    = [" << round4(cert.kappa_min) << ", "
            << round4(cert.kappa_max) << "]\n";
}

void print_slack_report(const char* label, const std::vector<Mat>& mats,
                        double rate, const Vec& theta) {
  const ThetaFeasibility check = verify_theta(mats, rate, theta);
  std::cout << "  " << label << ": "
            << (check.feasible ? "feasible" : "INFEASIBLE")
            << ", min slack = " << check.min_slack << "\n";
}

void write_run_csv(const RunContext& ctx, const SimResult& sim,
                   const std::string& name) {
  std::ostringstream out;
  out << csv_header(ctx.cfg.config_hash);
  out << "t";
  for (Eigen::Index i = 0; i < sim.trajectory.states.rows(); ++i) {
    out << ",x" << (i + 1);
  }
  for (Eigen::Index i = 0; i < sim.inputs.rows(); ++i) {
    out << ",u" << (i + 1);
  }
  out << "\n";
  for (int col = 0; col < sim.trajectory.size(); ++col) {
    out << format_double(sim.trajectory.times[static_cast<size_t>(col)]);
    for (Eigen::Index i = 0; i < sim.trajectory.states.rows(); ++i) {
      out << "," << format_double(sim.trajectory.states(i, col));
    }
    for (Eigen::Index i = 0; i < sim.inputs.rows(); ++i) {
      out << "," << format_double(sim.inputs(i, col));
    }
    out << "\n";
  }
  write_text_file((ctx.out / name).string(), out.str());
}

void write_sampling_csv(const RunContext& ctx, const SimResult& sim,
                        Scheme scheme, const std::string& name) {
  std::ostringstream out;
  out << csv_header(ctx.cfg.config_hash);
  const Eigen::Index n =
      sim.records.empty() ? 0 : sim.records.front().q.size();
  out << "k,t_k";
  for (Eigen::Index i = 0; i < n; ++i) out << ",q" << (i + 1);
  out << ",tau_or_ell,mu_k,trigger_cause,truncated\n";
  for (const auto& r : sim.records) {
    out << r.k << "," << format_double(r.t);
    for (Eigen::Index i = 0; i < n; ++i) {
      out << "," << format_double(r.q[i]);
    }
    if (scheme == Scheme::log_quant) {
      out << "," << format_double(r.dt_realized) << ",";
    } else {
      out << "," << r.ell << "," << format_double(r.mu);
    }
    out << "," << to_string(r.cause) << "," << (r.truncated ? 1 : 0) << "\n";
  }
  write_text_file((ctx.out / name).string(), out.str());
}

void write_verification_txt(const RunContext& ctx,
                            const VerificationReport& report,
                            const std::vector<std::string>& warnings,
                            const std::string& name) {
  std::ostringstream out;
  out << csv_header(ctx.cfg.config_hash);
  out << "samples_on_horizon = " << report.sample_count << "\n";
  out << "min_dwell_realized = " << format_double(report.min_dwell) << "\n";
  for (const auto& claim : report.claims) {
    out << claim.name << ": " << (claim.pass ? "pass" : "FAIL")
        << " (worst margin " << format_double(claim.worst_margin) << "; "
        << claim.bound << ")\n";
  }
  for (const auto& w : warnings) {
    out << "warning: " << w << "\n";
  }
  write_text_file((ctx.out / name).string(), out.str());
}

void write_state_svgs(const RunContext& ctx, const SimResult& sim,
                      const std::string& prefix) {
  std::vector<double> t(sim.trajectory.times.begin(),
                        sim.trajectory.times.end());
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::vector<SvgSeries> states;
  for (Eigen::Index i = 0; i < sim.trajectory.states.rows(); ++i) {
    std::vector<double> xi(sim.trajectory.states.cols());
    for (Eigen::Index c = 0; c < sim.trajectory.states.cols(); ++c) {
      xi[static_cast<size_t>(c)] = sim.trajectory.states(i, c);
    }
    states.push_back({"x" + std::to_string(i + 1), colors[i % 4], t, xi});
  }
  write_text_file((ctx.out / (prefix + "_state.svg")).string(),
                  render_line_chart("state", "t [s]", "x", states,
                                    ctx.cfg.config_hash));

  std::vector<SvgSeries> inputs;
  for (Eigen::Index i = 0; i < sim.inputs.rows(); ++i) {
    std::vector<double> ui(sim.inputs.cols());
    for (Eigen::Index c = 0; c < sim.inputs.cols(); ++c) {
      ui[static_cast<size_t>(c)] = sim.inputs(i, c);
    }
    inputs.push_back({"u" + std::to_string(i + 1), colors[i % 4], t, ui});
  }
  write_text_file((ctx.out / (prefix + "_input.svg")).string(),
                  render_line_chart("input", "t [s]", "u", inputs,
                                    ctx.cfg.config_hash));

  if (!sim.records.empty()) {
    SvgSeries dwell{"inter-sampling time", "#1f77b4", {}, {}};
    for (const auto& r : sim.records) {
      if (r.truncated) continue;
      dwell.x.push_back(r.t);
      dwell.y.push_back(r.dt_realized);
    }
    write_text_file(
        (ctx.out / (prefix + "_intersampling.svg")).string(),
        render_line_chart("inter-sampling times", "t_k [s]", "t_{k+1} - t_k",
                          {dwell}, ctx.cfg.config_hash));
  }
}

SimResult run_configured_log(const RunContext& ctx, const Certificate& cert) {
  const Plant plant = ctx.cfg.plant().to_plant();
  const LogQuantizer quant = ctx.cfg.make_log_quantizer(cert);
  const StmLogConfig stm = ctx.cfg.make_log_stm(cert, quant);
  SimResult sim = run_log(plant, cert, quant, stm, ctx.cfg.x0,
                          ctx.cfg.horizon, ctx.cfg.dt);
  sim.verification = verify_theorem(sim, quant, stm);
  return sim;
}

SimResult run_configured_zoom(const RunContext& ctx, const Certificate& cert) {
  const Plant plant = ctx.cfg.plant().to_plant();
  const ZoomQuantizer quant = ctx.cfg.make_zoom_quantizer(cert);
  const StmZoomConfig stm = ctx.cfg.make_zoom_stm();
  SimResult sim = run_zoom(plant, cert, quant, stm, ctx.cfg.x0,
                           ctx.cfg.horizon, ctx.cfg.dt);
  sim.verification = verify_theorem(sim, quant, stm);
  return sim;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "error (I/O): " << e.what() << "\n";
    return kExitIo;
  } catch (const CertificationError& e) {
    std::cerr << "error (certification stage: " << e.stage << "): " << e.what()
              << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
}

} // namespace

int cmd_certify(const CliOptions& opts) {
  return guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    RunContext ctx = make_context(opts);
    const Certificate cert =
        certify_lure(ctx.cfg.plant(), ctx.cfg.c, ctx.cfg.d1,
                     ctx.cfg.certify_opts);
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    write_text_file((ctx.out / "certificate.cfg").string(),
                    certificate_to_text(cert, ctx.cfg.config_hash));

    std::cout << "certificate (rounded to 4 decimals):\n";
    print_certificate_table(cert);
    const auto closed =
        closed_loop_matrices(ctx.cfg.plant(), cert.kappa_min, cert.kappa_max);
    const auto open =
        open_loop_matrices(ctx.cfg.plant(), cert.kappa_min, cert.kappa_max);
    print_slack_report("closed-loop weighting", closed, cert.c, cert.theta_cl);
    print_slack_report("open-loop weighting", open, -cert.d1, cert.theta_op);
    std::cout << "wrote " << (ctx.out / "certificate.cfg").string() << " in "
              << round4(elapsed) << " s\n";
    return kExitOk;
  });
}

int cmd_region(const CliOptions& opts) {
  return guarded([&] {
    RunContext ctx = make_context(opts);
    const Certificate cert = ctx.cfg.build_certificate();

    const int steps = ctx.cfg.region_steps;
    std::vector<double> rho(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      rho[static_cast<size_t>(i)] =
          ctx.cfg.region_rho_lo + (ctx.cfg.region_rho_hi - ctx.cfg.region_rho_lo) *
                                      static_cast<double>(i) / (steps - 1);
    }
    std::vector<RegionRow> rows(rho.size());
    parallel_for(ctx.jobs, rho.size(), [&](size_t i) {
      const auto [lo, hi] = sigma_bounds_log(rho[i], cert);
      rows[i] = {rho[i], lo, hi, lo < hi};
    });
    const auto crossing = region_crossing(cert);

    std::ostringstream csv;
    csv << csv_header(ctx.cfg.config_hash);
    csv << "rho,sigma_lower,sigma_upper,feasible\n";
    for (const auto& row : rows) {
      csv << format_double(row.rho) << "," << format_double(row.lower) << ","
          << format_double(row.upper) << "," << (row.feasible ? 1 : 0) << "\n";
    }
    if (crossing) {
      csv << "# rho_min=" << format_double(crossing->first)
          << " sigma=" << format_double(crossing->second) << "\n";
    }
    write_text_file((ctx.out / "region.csv").string(), csv.str());

    std::vector<double> lower(rows.size()), upper(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      lower[i] = rows[i].lower;
      upper[i] = rows[i].upper;
    }
    write_text_file((ctx.out / "region.svg").string(),
                    render_region_chart("stabilizable threshold window", rho,
                                        lower, upper, ctx.cfg.config_hash));

    if (crossing) {
      std::cout << "window closes at rho_min = " << round4(crossing->first)
                << " (threshold " << round4(crossing->second) << ")\n";
    } else {
      std::cout << "window bounds do not cross on (0, 1)\n";
    }
    std::cout << "wrote region.csv and region.svg under " << ctx.out.string()
              << "\n";
    return kExitOk;
  });
}

int cmd_simulate(const CliOptions& opts) {
  return guarded([&] {
    RunContext ctx = make_context(opts);
    const Certificate cert = ctx.cfg.build_certificate();

    const bool is_log = ctx.cfg.scheme == Scheme::log_quant;
    SimResult sim =
        is_log ? run_configured_log(ctx, cert) : run_configured_zoom(ctx, cert);
    const std::string prefix = is_log ? "log" : "zoom";

    write_run_csv(ctx, sim, prefix + "_run.csv");
    write_sampling_csv(ctx, sim, ctx.cfg.scheme, prefix + "_sampling.csv");
    write_verification_txt(ctx, *sim.verification, sim.warnings,
                           prefix + "_verification.txt");
    write_state_svgs(ctx, sim, prefix);

    const VerificationReport& report = *sim.verification;
    std::cout << prefix << " run: " << report.sample_count
              << " sampling instants on (0, " << ctx.cfg.horizon
              << "], min dwell " << round4(report.min_dwell) << " s\n";
    for (const auto& claim : report.claims) {
      std::cout << "  " << claim.name << ": "
                << (claim.pass ? "pass" : "FAIL") << " (worst margin "
                << claim.worst_margin << ")\n";
    }
    for (const auto& w : sim.warnings) {
      std::cout << "  warning: " << w << "\n";
    }
    return report.all_pass() ? kExitOk : kExitVerification;
  });
}

int cmd_compare(const CliOptions& opts) {
  return guarded([&] {
    RunContext ctx = make_context(opts);
    if (!ctx.cfg.has_log || !ctx.cfg.has_zoom) {
      throw std::invalid_argument(
          "compare requires both [log] and [zoom] sections");
    }
    const Certificate cert = ctx.cfg.build_certificate();
    const Plant plant = ctx.cfg.plant().to_plant();

    SimResult ideal =
        run_ideal(plant, ctx.cfg.x0, ctx.cfg.horizon, ctx.cfg.dt);
    SimResult log_sim = run_configured_log(ctx, cert);
    SimResult zoom_sim = run_configured_zoom(ctx, cert);

    const RelativeErrorSeries e_log = relative_error(log_sim, ideal);
    const RelativeErrorSeries e_zo = relative_error(zoom_sim, ideal);

    std::ostringstream csv;
    csv << csv_header(ctx.cfg.config_hash);
    csv << "t,e_log,e_zo\n";
    for (size_t i = 0; i < e_log.t.size(); ++i) {
      csv << format_double(e_log.t[i]) << ",";
      csv << (e_log.defined[i] ? format_double(e_log.value[i]) : "nan") << ",";
      csv << (e_zo.defined[i] ? format_double(e_zo.value[i]) : "nan") << "\n";
    }
    write_text_file((ctx.out / "compare.csv").string(), csv.str());

    write_text_file(
        (ctx.out / "relative_errors.svg").string(),
        render_line_chart("relative error vs ideal loop", "t [s]", "e(t)",
                          {{"log scheme", "#1f77b4", e_log.t, e_log.value},
                           {"zoom scheme", "#d62728", e_zo.t, e_zo.value}},
                          ctx.cfg.config_hash));

    std::cout << "log samples: " << log_sim.verification->sample_count
              << ", zoom samples: " << zoom_sim.verification->sample_count
              << "\n";
    std::cout << "wrote compare.csv and relative_errors.svg under "
              << ctx.out.string() << "\n";
    const bool ok = log_sim.verification->all_pass() &&
                    zoom_sim.verification->all_pass();
    return ok ? kExitOk : kExitVerification;
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"self-triggered quantized-control toolkit"};
  app.require_subcommand(1);

  CliOptions opts;
  uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "experiment config file")
        ->required();
    cmd->add_option("--out", [&opts](const std::vector<std::string>& v) {
          opts.out_dir = v.front();
          return true;
        },
        "output directory (overrides [output] dir)");
    cmd->add_option("--jobs", opts.jobs, "worker threads for sweeps");
    cmd->add_option("--seed", [&seed, &seed_set](const std::vector<std::string>& v) {
          seed = std::stoull(v.front());
          seed_set = true;
          return true;
        },
        "seed recorded for property sweeps");
  };

  CLI::App* certify = app.add_subcommand("certify", "compute a certificate");
  CLI::App* region =
      app.add_subcommand("region", "tabulate the stabilizable window");
  CLI::App* simulate =
      app.add_subcommand("simulate", "run the configured scheme");
  CLI::App* compare =
      app.add_subcommand("compare", "run ideal + both schemes");
  for (CLI::App* cmd : {certify, region, simulate, compare}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitPrecondition;
  }
  if (seed_set) opts.seed = seed;

  if (certify->parsed()) return cmd_certify(opts);
  if (region->parsed()) return cmd_region(opts);
  if (simulate->parsed()) return cmd_simulate(opts);
  if (compare->parsed()) return cmd_compare(opts);
  return kExitPrecondition;
}

} // namespace stq

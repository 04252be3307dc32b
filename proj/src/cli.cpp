#include "monret/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "monret/analysis.hpp"
#include "monret/errors.hpp"
#include "monret/superoperator.hpp"
#include "monret/trajectory.hpp"
#include "monret/two_level.hpp"
#include "monret/winding.hpp"

namespace monret::cli {
namespace {

namespace fs = std::filesystem;

// Artifacts are staged in memory and only written once every computation
// has succeeded.
using Artifacts = std::map<std::string, std::string>;

struct Context {
  const Json& config;
  const Options& options;
  std::ostream& out;
  Artifacts files;
};

void check_keys_exact(const Json& config, const std::set<std::string>& allowed) {
  if (!config.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (!allowed.count(key)) throw InvalidInput("unknown config key \"" + key + "\"");
  }
}

const Json& section(const Json& config, const char* key) {
  if (!config.contains(key)) throw InvalidInput(std::string("missing config key \"") + key + "\"");
  return config.at(key);
}

// "dist" is either an object, or the law's name with its parameters as
// top-level keys: {"dist": "exponential", "rate": 1.0, ...}.
const std::set<std::string> kFlatDistKeys = {"tau", "rate", "a", "b", "shape"};

TimeDistribution dist_from_config(const Json& config) {
  const Json& d = section(config, "dist");
  if (!d.is_string()) return dist_from_json(d);
  Json flat = {{"dist", d}};
  for (const auto& key : kFlatDistKeys)
    if (config.contains(key)) flat[key] = config.at(key);
  return dist_from_json(flat);
}

void check_keys(const Json& config, std::set<std::string> allowed) {
  if (config.contains("dist") && config.at("dist").is_string()) allowed.insert(kFlatDistKeys.begin(), kFlatDistKeys.end());
  check_keys_exact(config, allowed);
}

std::uint64_t resolve_seed(const Context& ctx) {
  if (ctx.options.seed) return *ctx.options.seed;
  return get_u64(ctx.config, "seed", kDefaultSeed);
}

std::int64_t positive_int(const Json& config, const std::string& key, std::int64_t fallback) {
  const auto v = get_int(config, key, fallback);
  if (v < 1) throw InvalidInput("\"" + key + "\" must be at least 1");
  return v;
}

std::string header(const std::string& command, std::optional<std::uint64_t> seed) {
  std::string h = "# monret " + command;
  if (seed) h += " seed=" + std::to_string(*seed);
  return h + "\n";
}

Json model_summary(const CanonicalSpectralModel& model, const TimeDistribution& dist) {
  return {{"dimension", model.dimension()},
          {"energies", model.energies()},
          {"weights", model.weights()},
          {"dist", to_json(dist)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

void cmd_exact(Context& ctx) {
  check_keys(ctx.config, {"model", "dist", "m_max", "omega_points", "dump_matrices", "seed"});
  const auto model = model_from_json(section(ctx.config, "model"));
  const auto dist = dist_from_config(ctx.config);
  const int m_max = static_cast<int>(positive_int(ctx.config, "m_max", 2));
  const auto points = static_cast<std::size_t>(positive_int(ctx.config, "omega_points", 64));

  const MomentReport report = exact_report(model, dist, m_max);
  const SuperoperatorSet s = build(model, dist);
  Json j = model_summary(model, dist);
  j["report"] = to_json(report);
  j["spectral_radius"] = spectral_radius(s);
  ctx.files["report.json"] = dump(j);

  std::ostringstream csv;
  csv << header("exact", std::nullopt) << "omega,re_F,im_F,re_Ftau,im_Ftau\n";
  for (double w : uniform_omega_grid(points)) {
    const Complex f = generating_F(s, w);
    const Complex ft = generating_F_tau(model, dist, w);
    csv << format_double(w) << ',' << format_double(f.real()) << ',' << format_double(f.imag()) << ','
        << format_double(ft.real()) << ',' << format_double(ft.imag()) << '\n';
  }
  ctx.files["sweep.csv"] = csv.str();

  if (get_bool(ctx.config, "dump_matrices", false)) {
    const std::pair<const char*, Eigen::MatrixXcd> mats[] = {
        {"gamma.csv", s.gamma()}, {"ghat.csv", s.ghat()}, {"c1.csv", s.c1()}, {"c2.csv", s.c2()}};
    for (const auto& [name, m] : mats) {
      std::ostringstream os;
      os << header("exact", std::nullopt);
      write_matrix_csv(os, m);
      ctx.files[name] = os.str();
    }
  }
  if (!ctx.options.quiet)
    ctx.out << "N = " << model.dimension() << "  mean_k = " << format_double(report.mean_k)
            << "  mean_t = " << format_double(report.mean_t) << '\n';
}

void cmd_sample(Context& ctx) {
  check_keys(ctx.config, {"model", "dist", "samples", "k_max", "m_max", "seed"});
  const auto model = model_from_json(section(ctx.config, "model"));
  const auto dist = dist_from_config(ctx.config);
  MonteCarloOptions opts;
  opts.seed = resolve_seed(ctx);
  opts.samples = positive_int(ctx.config, "samples", opts.samples);
  opts.k_max = positive_int(ctx.config, "k_max", opts.k_max);
  opts.max_order = static_cast<int>(positive_int(ctx.config, "m_max", 2));
  opts.threads = ctx.options.threads;

  const FirstDetectionStats stats = estimate_first_detection(model, dist, opts);
  Json j = model_summary(model, dist);
  j["seed"] = opts.seed;
  j["report"] = to_json(monte_carlo_report(stats));
  j["censored"] = stats.censored;
  ctx.files["report.json"] = dump(j);

  std::ostringstream csv;
  csv << header("sample", opts.seed) << "k,count,fraction\n";
  for (std::size_t i = 0; i < stats.histogram.size(); ++i) {
    if (stats.histogram[i] == 0) continue;
    csv << (i + 1) << ',' << stats.histogram[i] << ','
        << format_double(static_cast<double>(stats.histogram[i]) / static_cast<double>(stats.samples))
        << '\n';
  }
  ctx.files["histogram.csv"] = csv.str();
  if (!ctx.options.quiet)
    ctx.out << "seed = " << opts.seed << "  samples = " << stats.samples
            << "  mean_k = " << format_double(stats.moments_k[0].mean) << " +- "
            << format_double(stats.moments_k[0].std_error) << '\n';
}

void cmd_trajectory(Context& ctx) {
  check_keys(ctx.config, {"model", "dist", "realizations", "steps", "omega_points", "seed"});
  const auto model = model_from_json(section(ctx.config, "model"));
  const auto dist = dist_from_config(ctx.config);
  const std::uint64_t seed = resolve_seed(ctx);
  const auto realizations = positive_int(ctx.config, "realizations", 3);
  const auto steps = static_cast<std::size_t>(positive_int(ctx.config, "steps", 8));
  const auto points = static_cast<std::size_t>(positive_int(ctx.config, "omega_points", 1024));

  Json windings = Json::array();
  for (std::int64_t r = 0; r < realizations; ++r) {
    RandomStream rng(seed, static_cast<std::uint64_t>(r));
    const Trajectory tr = sample_trajectory(model, dist, rng, steps);
    const std::string tag = std::to_string(r);

    std::ostringstream traj;
    traj << header("trajectory", seed);
    write_trajectory_csv(traj, tr);
    ctx.files["trajectory_" + tag + ".csv"] = traj.str();

    const auto grid = uniform_omega_grid(points);
    const auto phi = truncated_ft(tr, grid);
    std::ostringstream curve;
    curve << header("trajectory", seed) << "omega,re_phi,im_phi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      curve << format_double(grid[i]) << ',' << format_double(phi[i].real()) << ','
            << format_double(phi[i].imag()) << '\n';
    ctx.files["phi_" + tag + ".csv"] = curve.str();

    Json entry{{"realization", r}};
    // A realization whose curve touches the origin has no winding number;
    // that is reported, not treated as a failure of the run.
    try {
      entry["phase_unwrap"] = to_json(trajectory_winding(tr, points));
    } catch (const UndefinedWinding& e) {
      entry["phase_unwrap"] = {{"winding", nullptr}, {"error", e.what()}};
    }
    try {
      entry["poly_roots"] = to_json(winding_poly(tr.amplitudes));
    } catch (const Error& e) {
      entry["poly_roots"] = {{"winding", nullptr}, {"error", e.what()}};
    }
    windings.push_back(entry);
    if (!ctx.options.quiet) {
      ctx.out << "realization " << r << ": winding ";
      const Json& w = entry["phase_unwrap"]["winding"];
      if (w.is_null())
        ctx.out << "undefined";
      else
        ctx.out << w.get<int>();
      ctx.out << '\n';
    }
  }
  Json j = model_summary(model, dist);
  j["seed"] = seed;
  j["steps"] = steps;
  j["windings"] = windings;
  ctx.files["windings.json"] = dump(j);
}

void cmd_fluctuations(Context& ctx) {
  check_keys(ctx.config, {"j_grid", "j_range", "tau_or_rate", "seed"});
  std::vector<double> grid;
  if (ctx.config.contains("j_grid")) {
    const Json& g = ctx.config.at("j_grid");
    if (!g.is_array() || g.empty()) throw InvalidInput("\"j_grid\" must be a non-empty array");
    for (const auto& v : g) {
      if (!v.is_number()) throw InvalidInput("\"j_grid\" must contain numbers only");
      grid.push_back(v.get<double>());
    }
  } else if (ctx.config.contains("j_range")) {
    const Json& r = ctx.config.at("j_range");
    if (!r.is_object()) throw InvalidInput("\"j_range\" must be an object with min, max, points");
    const double lo = get_number(r, "min");
    const double hi = get_number(r, "max");
    const auto n = positive_int(r, "points", 0);
    if (!(hi >= lo)) throw InvalidInput("\"j_range\" needs max >= min");
    for (std::int64_t i = 0; i < n; ++i)
      grid.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    throw InvalidInput("fluctuations needs \"j_grid\" or \"j_range\"");
  }
  for (double J : grid)
    if (!std::isfinite(J) || J <= 0.0) throw InvalidInput("J grid values must be positive");
  const double scale = get_number(ctx.config, "tau_or_rate", 1.0);
  const auto rows = fluctuation_curves(grid, scale);
  std::ostringstream csv;
  csv << header("fluctuations", std::nullopt);
  write_fluctuation_csv(csv, rows);
  ctx.files["fluctuations.csv"] = csv.str();
  if (!ctx.options.quiet) ctx.out << rows.size() << " grid points written\n";
}

struct Check {
  std::string name;
  double residual;
  double tolerance;
  bool pass() const { return residual <= tolerance; }
};

void cmd_verify(Context& ctx, int& status) {
  check_keys(ctx.config, {"model", "dist", "omega_points", "tolerance", "seed"});
  const auto model = model_from_json(section(ctx.config, "model"));
  const auto dist = dist_from_config(ctx.config);
  const auto points = static_cast<std::size_t>(positive_int(ctx.config, "omega_points", 16));
  const double tol = get_number(ctx.config, "tolerance", 1e-8);

  const SuperoperatorSet s = build(model, dist);
  s.require_off_resonance();
  const IdentityResiduals id = verify_identities(s);
  std::vector<Check> checks;
  checks.push_back({"weighted_column_sums", id.weighted_column_sums, tol});
  checks.push_back({"row_sums", id.row_sums, tol});

  // Truncation chosen well below the tolerance so the check measures the
  // identity rather than the cut-off.
  const DoubleSumTruncation trunc = choose_double_sum_truncation(s, 0.01 * tol);
  const Eigen::MatrixXcd corr = correlator_matrix(s, trunc.K);
  double norm_dev = 0.0;
  for (double w : uniform_omega_grid(points)) norm_dev = std::max(norm_dev, std::abs(averaged_norm(corr, w) - 1.0));
  checks.push_back({"averaged_norm", norm_dev, tol});

  checks.push_back({"F(0)", std::abs(generating_F(s, 0.0) - 1.0), tol});
  checks.push_back({"mean_k - N", std::abs(mean_k(s) - static_cast<double>(model.dimension())), tol});

  bool ok = true;
  Json rows = Json::array();
  ctx.out << std::left << std::setw(24) << "check" << std::setw(26) << "residual" << "status\n";
  for (const auto& c : checks) {
    ok = ok && c.pass();
    rows.push_back({{"check", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    ctx.out << std::left << std::setw(24) << c.name << std::setw(26) << format_double(c.residual)
            << (c.pass() ? "ok" : "FAIL") << '\n';
  }
  Json j = model_summary(model, dist);
  j["checks"] = rows;
  j["truncation_K"] = trunc.K;
  j["pass"] = ok;
  ctx.files["verify.json"] = dump(j);
  status = ok ? kOk : kVerifyFailed;
}

void write_artifacts(const Artifacts& files, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  // Write to temporaries first so a failing disk leaves no half-written set.
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [name, content] : files) {
      const fs::path target = dir / name;
      fs::path tmp = target;
      tmp += ".partial";
      std::ofstream os(tmp, std::ios::binary);
      os << content;
      os.close();
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
      staged.emplace_back(tmp, target);
    }
  } catch (...) {
    for (const auto& [tmp, target] : staged) fs::remove(tmp);
    throw;
  }
  for (const auto& [tmp, target] : staged) fs::rename(tmp, target);
}

}  // namespace

int run(const std::string& subcommand, const Json& config, const std::string& out_dir,
        const Options& options, std::ostream& out, std::ostream& err) {
  Context ctx{config, options, out, {}};
  int status = kOk;
  try {
    if (!config.is_object()) throw InvalidInput("config must be a JSON object");
    if (subcommand == "exact")
      cmd_exact(ctx);
    else if (subcommand == "sample")
      cmd_sample(ctx);
    else if (subcommand == "trajectory")
      cmd_trajectory(ctx);
    else if (subcommand == "fluctuations")
      cmd_fluctuations(ctx);
    else if (subcommand == "verify")
      cmd_verify(ctx, status);
    else
      throw InvalidInput("unknown subcommand \"" + subcommand + "\"");
  } catch (const InvalidInput& e) {
    err << "monret: invalid input: " << e.what() << '\n';
    return kSchemaError;
  } catch (const ResonanceError& e) {
    err << "monret: resonance: " << e.what();
    if (e.condition_estimate() > 0.0) err << " (rcond " << format_double(e.condition_estimate()) << ")";
    err << '\n';
    return kResonance;
  } catch (const NumericalHealthError& e) {
    err << "monret: numerical health check failed: " << e.what() << '\n';
    return kNumericalHealth;
  } catch (const nlohmann::json::exception& e) {
    err << "monret: invalid input: " << e.what() << '\n';
    return kSchemaError;
  }
  try {
    write_artifacts(ctx.files, out_dir);
  } catch (const std::exception& e) {
    err << "monret: " << e.what() << '\n';
    return kIoError;
  }
  return status;
}

int run_file(const std::string& subcommand, const std::string& config_path,
             const std::string& out_dir, const Options& options, std::ostream& out,
             std::ostream& err) {
  std::ifstream is(config_path);
  if (!is) {
    err << "monret: cannot open config " << config_path << '\n';
    return kSchemaError;
  }
  Json config;
  try {
    config = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    err << "monret: malformed config: " << e.what() << '\n';
    return kSchemaError;
  }
  return run(subcommand, config, out_dir, options, out, err);
}

}  // namespace monret::cli

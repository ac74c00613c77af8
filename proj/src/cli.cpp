#include "ecve/cli.hpp"

#include "ecve/csv.hpp"
#include "ecve/errors.hpp"
#include "ecve/estimator.hpp"
#include "ecve/fit_io.hpp"
#include "ecve/objective.hpp"
#include "ecve/parallel.hpp"
#include "ecve/random.hpp"
#include "ecve/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace ecve::cli {

using nlohmann::json;

namespace {

// Values from a --config JSON file. Keys are long flag names without the
// leading dashes; a section named after the command overrides top-level keys.
class ConfigFile {
public:
  void load(const std::string &path, const std::string &command) {
    std::ifstream in(path);
    if (!in)
      throw UsageError("cannot open config file '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error &e) {
      throw UsageError("config file '" + path + "': " + e.what());
    }
    if (!doc.is_object())
      throw UsageError("config file '" + path + "' must hold a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!it.value().is_object())
        values_[it.key()] = it.value();
    if (doc.contains(command) && doc[command].is_object())
      for (auto it = doc[command].begin(); it != doc[command].end(); ++it)
        values_[it.key()] = it.value();
  }

  const json *find(const std::string &key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

private:
  std::map<std::string, json> values_;
};

// Resolves one setting: command-line flag, then config file, then default.
class Settings {
public:
  Settings(const CLI::App &app, const ConfigFile &config) : app_(app), config_(config) {}

  template <class T>
  T get(const std::string &key, const T &cli_value, const T &fallback) const {
    if (given(key))
      return cli_value;
    if (const json *v = config_.find(key)) {
      try {
        return v->get<T>();
      } catch (const json::exception &) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
    }
    return fallback;
  }

  // list settings accept either a JSON array or a comma-separated string
  std::vector<std::string> list(const std::string &key,
                                const std::vector<std::string> &cli_value,
                                const std::vector<std::string> &fallback) const {
    if (given(key))
      return cli_value;
    if (const json *v = config_.find(key)) {
      std::vector<std::string> items;
      const auto add = [&](const json &item) {
        if (item.is_string())
          items.push_back(item.get<std::string>());
        else if (item.is_number_integer())
          items.push_back(std::to_string(item.get<long long>()));
        else
          throw UsageError("config key '" + key + "' has the wrong type");
      };
      if (v->is_array())
        for (const json &item : *v)
          add(item);
      else
        add(*v);
      std::vector<std::string> split;
      for (const std::string &item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ','))
          if (!part.empty())
            split.push_back(part);
      }
      return split;
    }
    return fallback;
  }

  bool given(const std::string &key) const { return app_.count("--" + key) > 0; }

private:
  const CLI::App &app_;
  const ConfigFile &config_;
};

struct OptimizerFlags {
  int attempts = 10;
  int max_iter = 50;
  double tol = 1e-4;
};

void add_optimizer_flags(CLI::App &app, OptimizerFlags &f) {
  app.add_option("--attempts", f.attempts, "Random restarts of the optimizer");
  app.add_option("--max-iter", f.max_iter, "Descent steps per restart");
  app.add_option("--tol", f.tol, "Relative-decrease stopping tolerance");
}

OptimizerConfig resolve_optimizer(const Settings &s, const OptimizerFlags &f,
                                  std::uint64_t seed, std::size_t threads) {
  const OptimizerConfig defaults;
  OptimizerConfig opt;
  opt.attempts = s.get("attempts", f.attempts, defaults.attempts);
  opt.max_iter = s.get("max-iter", f.max_iter, defaults.max_iter);
  opt.tol_rel = s.get("tol", f.tol, defaults.tol_rel);
  opt.seed = seed;
  opt.threads = threads;
  try {
    opt.validate();
  } catch (const InvalidConfig &e) {
    throw UsageError(e.what());
  }
  return opt;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  std::string out = s.str();
  if (out == "-" + std::string("0.") + std::string(static_cast<std::size_t>(digits), '0'))
    out.erase(0, 1);
  return out;
}

std::vector<Index> parse_sizes(const std::vector<std::string> &items) {
  std::vector<Index> out;
  for (const std::string &item : items) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != item.size() || v < 2)
      throw UsageError("invalid sample size '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

void write_output(const std::string &path, const std::string &content, std::ostream &out) {
  if (path.empty() || path == "-")
    out << content;
  else
    atomic_write(path, content);
}

void print_coefficients(std::ostream &out, const EcveFit &f) {
  std::size_t name_width = 8;
  for (const std::string &name : f.predictor_names)
    name_width = std::max(name_width, name.size() + 2);
  const auto header = [&](const std::string &title) {
    out << title << '\n' << std::left << std::setw(static_cast<int>(name_width)) << "";
    for (Index j = 0; j < f.k; ++j)
      out << std::right << std::setw(9) << ("B" + std::to_string(j + 1));
    out << '\n';
  };
  const auto rows = [&](const Matrix &b) {
    for (Index i = 0; i < f.p; ++i) {
      const std::string name = i < static_cast<Index>(f.predictor_names.size())
                                   ? f.predictor_names[static_cast<std::size_t>(i)]
                                   : "x" + std::to_string(i + 1);
      out << std::left << std::setw(static_cast<int>(name_width)) << name;
      for (Index j = 0; j < f.k; ++j)
        out << std::right << std::setw(9) << fixed(b(i, j), 2);
      out << '\n';
    }
  };
  header("Rounded coefficients, standardized predictors:");
  rows(f.b_hat_standardized);
  out << '\n';
  header("Rounded coefficients, original predictors (orthonormal basis):");
  rows(f.b_hat);
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string data, response = "y", method = "fourier", out;
  std::vector<std::string> drop;
  int k = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  OptimizerFlags opt;
};

int cmd_fit(const Settings &s, const FitArgs &a, std::ostream &out, std::ostream &err) {
  const std::string data = s.get("data", a.data, std::string{});
  if (data.empty())
    throw UsageError("fit: no input CSV given (--data)");
  const std::string response = s.get("response", a.response, std::string("y"));
  const int k = s.get("k", a.k, 1);
  const MethodSpec method =
      MethodSpec::parse(s.get("method", a.method, std::string("fourier")));
  const std::uint64_t seed = s.get("seed", a.seed, std::uint64_t{0});
  const std::size_t threads = resolve_threads(s.get("threads", a.threads, std::size_t{0}));
  const std::string out_path = s.get("out", a.out, std::string{});
  const std::vector<std::string> drop = s.list("drop", a.drop, {});

  const CsvTable table = read_csv(data);
  const Index y_col = table.column(response);
  std::vector<std::string> excluded = drop;
  excluded.push_back(response);
  const CsvTable predictors = table.drop(excluded);
  const Index p = predictors.data.cols();
  if (k < 1 || k >= p)
    throw UsageError("fit: need 1 <= k < p, got k=" + std::to_string(k) +
                     " with p=" + std::to_string(p) + " predictors");

  const OptimizerConfig opt =
      resolve_optimizer(s, a.opt, seed, threads);
  EcveFit f = fit(predictors.data, table.data.col(y_col), k, method.ensemble,
                  method.weighting, opt);
  f.seed = seed;
  f.predictor_names = predictors.headers;
  f.response_name = response;
  for (const std::string &w : f.warnings)
    err << "warning: " << w << '\n';

  out << "n = " << table.data.rows() << ", p = " << p << ", k = " << k
      << ", method = " << method.to_string() << " (m = " << f.config.m << ")"
      << ", bandwidth = " << fixed(f.config.bandwidth, 4)
      << ", objective = " << std::setprecision(6) << f.objective_value << "\n\n";
  print_coefficients(out, f);
  if (!out_path.empty()) {
    save_fit(out_path, f);
    out << "\nfit written to " << out_path << '\n';
  }
  return kOk;
}

struct ReduceArgs {
  std::string fit, data, out, response;
};

int cmd_reduce(const Settings &s, const ReduceArgs &a, std::ostream &out) {
  const std::string fit_path = s.get("fit", a.fit, std::string{});
  const std::string data = s.get("data", a.data, std::string{});
  if (fit_path.empty() || data.empty())
    throw UsageError("reduce: need --fit and --data");
  const EcveFit f = load_fit(fit_path);
  const std::string response = s.get("response", a.response, f.response_name);
  const CsvTable table = read_csv(data);

  const bool has_response =
      !response.empty() &&
      std::find(table.headers.begin(), table.headers.end(), response) != table.headers.end();

  Matrix x;
  if (!f.predictor_names.empty()) {
    x.resize(table.data.rows(), f.p);
    for (Index j = 0; j < f.p; ++j) {
      const std::string &name = f.predictor_names[static_cast<std::size_t>(j)];
      if (std::find(table.headers.begin(), table.headers.end(), name) == table.headers.end())
        throw UsageError("reduce: predictor column '" + name + "' missing from " + data);
      x.col(j) = table.data.col(table.column(name));
    }
  } else {
    x = has_response ? table.drop({response}).data : table.data;
  }
  if (x.cols() != f.p)
    throw UsageError("reduce: fit expects " + std::to_string(f.p) + " predictors, " +
                     data + " has " + std::to_string(x.cols()));

  const Matrix reduced = reduce(f, x);
  std::vector<std::string> headers;
  for (Index j = 0; j < f.k; ++j)
    headers.push_back("B" + std::to_string(j + 1));
  Matrix body = reduced;
  if (has_response) {
    headers.push_back(response);
    body.conservativeResize(Eigen::NoChange, f.k + 1);
    body.col(f.k) = table.data.col(table.column(response));
  }
  std::ostringstream csv;
  write_csv(csv, headers, body);
  write_output(s.get("out", a.out, std::string{}), csv.str(), out);
  return kOk;
}

struct StudyArgs {
  std::vector<std::string> models{"M1"}, dists{"I"}, ns{"100"}, methods{"fourier"};
  int reps = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out, long_out;
  OptimizerFlags opt;
};

int cmd_study(const Settings &s, const StudyArgs &a, bool bench, std::ostream &out) {
  const StudyArgs d;
  const std::vector<std::string> model_names = s.list("model", a.models, d.models);
  const std::vector<std::string> dist_names = s.list("dist", a.dists, d.dists);
  const std::vector<Index> ns = parse_sizes(s.list("n", a.ns, d.ns));
  const std::vector<std::string> method_names = s.list("method", a.methods, d.methods);
  const int reps = s.get("reps", a.reps, bench ? 30 : 100);
  const std::uint64_t seed = s.get("seed", a.seed, std::uint64_t{0});
  const std::size_t threads = resolve_threads(s.get("threads", a.threads, std::size_t{0}));
  const OptimizerConfig opt = resolve_optimizer(s, a.opt, 0, 1);
  if (reps < 1)
    throw UsageError("--reps must be at least 1");

  std::vector<ModelId> models;
  for (const std::string &m : model_names)
    models.push_back(parse_model(m));
  std::vector<DistId> dists;
  for (const std::string &m : dist_names)
    dists.push_back(parse_dist(m));
  std::vector<MethodSpec> methods;
  for (const std::string &m : method_names)
    methods.push_back(MethodSpec::parse(m));
  if (bench && (models.size() * dists.size() * ns.size() * methods.size() != 1))
    throw UsageError("bench runs a single configuration; use simulate for grids");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw UsageError("--n values must be increasing");

  const auto start = std::chrono::steady_clock::now();
  std::vector<StudyResult> results;
  for (ModelId model : models)
    for (DistId dist : dists)
      for (const MethodSpec &method : methods)
        for (StudyResult &r : consistency_sweep(model, dist, ns, method, reps, seed, opt, threads))
          results.push_back(std::move(r));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_table(out, results);
  for (const StudyResult &r : results)
    if (r.sd_degenerate)
      out << "note: sd undefined for a single replicate (" << to_string(r.model) << ", "
          << to_string(r.dist) << ", n=" << r.n << ", " << r.method << "), reported as 0\n";
  if (bench)
    out << "elapsed " << fixed(elapsed, 2) << " s over " << reps << " replicates\n";

  std::ostringstream csv;
  write_summary_csv(csv, results);
  const std::string out_path = s.get("out", a.out, std::string{});
  if (out_path.empty() || out_path == "-")
    out << '\n' << csv.str();
  else
    atomic_write(out_path, csv.str());

  const std::string long_path = s.get("long", a.long_out, std::string{});
  if (!long_path.empty()) {
    std::ostringstream long_csv;
    write_long_csv(long_csv, results);
    atomic_write(long_path, long_csv.str());
  }
  return kOk;
}

struct GradArgs {
  int p = 5, q = 3, n = 20, m = 4;
  std::string method = "fourier";
  std::uint64_t seed = 0;
  double eps = 1e-5, ratio_eps = 1e-4;
  bool constant = false;
};

int cmd_gradcheck(const Settings &s, const GradArgs &a, std::ostream &out) {
  const GradArgs d;
  const int p = s.get("p", a.p, d.p);
  const int q = s.get("q", a.q, d.q);
  const int n = s.get("n", a.n, d.n);
  const int m = s.get("m", a.m, d.m);
  MethodSpec method = MethodSpec::parse(s.get("method", a.method, d.method));
  const std::uint64_t seed = s.get("seed", a.seed, std::uint64_t{0});
  const double eps = s.get("eps", a.eps, d.eps);
  const double ratio_eps = s.get("ratio-eps", a.ratio_eps, d.ratio_eps);
  const bool constant = s.get("constant-response", a.constant, false);
  if (p < 2 || q < 1 || q >= p || n < 2 || m < 1)
    throw UsageError("gradcheck: need p >= 2, 1 <= q < p, n >= 2, m >= 1");
  if (!(eps > 0.0) || !(ratio_eps > 0.0))
    throw UsageError("gradcheck: eps must be positive");
  if (method.ensemble.kind != EnsembleKind::identity && !method.ensemble.m)
    method.ensemble.m = m;

  Rng rng = make_rng(seed, streams::kGradCheck);
  std::normal_distribution<double> normal;
  Matrix x(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i)
      x(i, j) = normal(rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i)
    y(i) = constant ? 1.0 : std::sin(x(i, 0)) + 0.5 * x(i, 1) * x(i, 1) + 0.3 * normal(rng);
  const Sample sample = Sample::with_ensemble(x, y, method.ensemble);
  const ObjectiveConfig cfg{bandwidth_rule(sample.x(), q), method.weighting, KernelSpec{}};
  const StiefelPoint v = random_stiefel(p, q, rng);

  const Matrix analytic = gradient_ensemble(v, sample, cfg);
  // relative to the FD gradient, with a floor so exact zeros stay meaningful
  const auto rel = [&](double h) {
    const Matrix fd = gradient_fd(v, sample, cfg, h);
    return (analytic - fd).norm() / std::max(fd.norm(), 1e-6);
  };
  const double error = rel(eps);
  const double coarse = rel(ratio_eps);
  const double fine = rel(ratio_eps / 2.0);

  out << std::setprecision(6);
  out << "instance: n=" << n << " p=" << p << " q=" << q << " method="
      << method.to_string() << (constant ? " (constant response)" : "") << '\n';
  out << "gradient norm: " << analytic.norm() << '\n';
  out << "max relative error (eps=" << eps << "): " << error << '\n';
  out << "error ratio when halving eps from " << ratio_eps << ": " << coarse / fine
      << " (second-order differences give about 4)\n";
  const bool ok = error < 1e-4;
  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kOk : kFailure;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Ensemble conditional variance estimation for sufficient dimension reduction",
               "ecve"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default settings")
      ->check(CLI::ExistingFile);

  FitArgs fit_args;
  CLI::App *fit_cmd = app.add_subcommand("fit", "Fit a reduction on a CSV file");
  fit_cmd->add_option("data,--data", fit_args.data, "Input CSV");
  fit_cmd->add_option("--response", fit_args.response, "Response column name (default y)");
  fit_cmd->add_option("--k", fit_args.k, "Reduction dimension (default 1)");
  fit_cmd->add_option("--method", fit_args.method,
                      "Ensemble spec with optional +weighted (default fourier)");
  fit_cmd->add_option("--drop", fit_args.drop, "Columns to ignore")->delimiter(',');
  fit_cmd->add_option("--seed", fit_args.seed, "Random seed");
  fit_cmd->add_option("--threads", fit_args.threads, "Worker threads");
  fit_cmd->add_option("--out", fit_args.out, "Where to write the fit JSON");
  add_optimizer_flags(*fit_cmd, fit_args.opt);

  ReduceArgs reduce_args;
  CLI::App *reduce_cmd = app.add_subcommand("reduce", "Apply a saved fit to a CSV file");
  reduce_cmd->add_option("--fit", reduce_args.fit, "Fit JSON written by 'fit --out'");
  reduce_cmd->add_option("data,--data", reduce_args.data, "Input CSV");
  reduce_cmd->add_option("--response", reduce_args.response,
                         "Column passed through unchanged (default: the fit's response)");
  reduce_cmd->add_option("--out", reduce_args.out, "Output CSV (default stdout)");

  StudyArgs sim_args, bench_args;
  const auto study_options = [](CLI::App *cmd, StudyArgs &a) {
    cmd->add_option("--model", a.models, "Models M1..M7")->delimiter(',');
    cmd->add_option("--dist", a.dists, "Predictor distributions I, II, III")->delimiter(',');
    cmd->add_option("--n", a.ns, "Sample sizes")->delimiter(',');
    cmd->add_option("--method", a.methods, "Ensemble spec[+weighted]")->delimiter(',');
    cmd->add_option("--reps", a.reps, "Replicates per configuration");
    cmd->add_option("--seed", a.seed, "Random seed");
    cmd->add_option("--threads", a.threads, "Worker threads");
    cmd->add_option("--out", a.out, "Summary CSV (default stdout)");
    cmd->add_option("--long", a.long_out, "Per-replicate CSV");
    add_optimizer_flags(*cmd, a.opt);
  };
  CLI::App *sim_cmd =
      app.add_subcommand("simulate", "Monte Carlo study over models, distributions, n and methods");
  study_options(sim_cmd, sim_args);
  CLI::App *bench_cmd = app.add_subcommand("bench", "Timed study of a single configuration");
  study_options(bench_cmd, bench_args);

  GradArgs grad_args;
  CLI::App *grad_cmd =
      app.add_subcommand("gradcheck", "Compare the analytic gradient with finite differences");
  grad_cmd->add_option("--p", grad_args.p);
  grad_cmd->add_option("--q", grad_args.q);
  grad_cmd->add_option("--n", grad_args.n);
  grad_cmd->add_option("--m", grad_args.m);
  grad_cmd->add_option("--method", grad_args.method, "Ensemble spec[+weighted]");
  grad_cmd->add_option("--seed", grad_args.seed);
  grad_cmd->add_option("--eps", grad_args.eps, "Finite-difference step");
  grad_cmd->add_option("--ratio-eps", grad_args.ratio_eps,
                       "Step used for the halving-order report");
  grad_cmd->add_flag("--constant-response", grad_args.constant, "Use Y = 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App *cmd = app.get_subcommands().front();
    ConfigFile config;
    if (!config_path.empty())
      config.load(config_path, cmd->get_name());
    const Settings settings(*cmd, config);

    if (cmd == fit_cmd)
      return cmd_fit(settings, fit_args, out, err);
    if (cmd == reduce_cmd)
      return cmd_reduce(settings, reduce_args, out);
    if (cmd == sim_cmd)
      return cmd_study(settings, sim_args, false, out);
    if (cmd == bench_cmd)
      return cmd_study(settings, bench_args, true, out);
    return cmd_gradcheck(settings, grad_args, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidConfig &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

} // namespace ecve::cli

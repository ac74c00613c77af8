#include "ecve/simulation.hpp"

#include "ecve/errors.hpp"
#include "ecve/parallel.hpp"
#include "ecve/random.hpp"
#include "ecve/stiefel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ecve {

namespace {

std::string upper(std::string s) {
  for (char &c : s)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Neumaier summation
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

} // namespace

std::string to_string(ModelId id) {
  return "M" + std::to_string(static_cast<int>(id) + 1);
}

std::string to_string(DistId id) {
  switch (id) {
  case DistId::I:
    return "I";
  case DistId::II:
    return "II";
  case DistId::III:
    return "III";
  }
  return "?";
}

ModelId parse_model(const std::string &text) {
  const std::string s = upper(text);
  for (int i = 0; i < 7; ++i)
    if (s == "M" + std::to_string(i + 1))
      return static_cast<ModelId>(i);
  throw UsageError("unknown model '" + text + "'; valid models: M1 M2 M3 M4 M5 M6 M7");
}

DistId parse_dist(const std::string &text) {
  const std::string s = upper(text);
  if (s == "I" || s == "1")
    return DistId::I;
  if (s == "II" || s == "2")
    return DistId::II;
  if (s == "III" || s == "3")
    return DistId::III;
  throw UsageError("unknown distribution '" + text + "'; valid distributions: I II III");
}

ModelSpec ModelSpec::make(ModelId id, Index p) {
  static constexpr Index ks[] = {1, 2, 2, 2, 3, 1, 1};
  ModelSpec spec;
  spec.id = id;
  spec.k = ks[static_cast<int>(id)];
  if (p <= spec.k)
    throw InvalidDimension("model " + to_string(id) + " needs p > " +
                           std::to_string(spec.k));
  spec.b_true = Matrix::Identity(p, spec.k);
  return spec;
}

double ModelSpec::response(const Eigen::Ref<const Eigen::RowVectorXd> &x,
                           double eps) const {
  // B is the first k coordinates, so b_j^T x = x(j - 1)
  const double x1 = x(0);
  switch (id) {
  case ModelId::M1:
    return 1.0 / x1 + 0.2 * eps;
  case ModelId::M2:
    return std::cos(2.0 * x1) + std::cos(x(1)) + 0.2 * eps;
  case ModelId::M3:
    return x(1) + (0.5 + x1 * x1) * eps;
  case ModelId::M4: {
    const double x2 = x(1);
    const double d = 1.5 + x2;
    return x1 / (0.5 + d * d) + (std::abs(x1) + x2 * x2 + 0.5) * eps;
  }
  case ModelId::M5: {
    const double x2 = x(1);
    return x(2) + std::sin(x1 * x2 * x2) * eps;
  }
  case ModelId::M6:
    return 0.5 * x1 * x1 * eps;
  case ModelId::M7:
    return std::cos(x1 - std::numbers::pi) + std::cos(2.0 * x1) * eps;
  }
  return 0.0;
}

PredictorDist PredictorDist::make(DistId id, Index p) {
  if (p < 1)
    throw InvalidDimension("predictor distribution needs p >= 1");
  PredictorDist dist;
  dist.id = id;
  dist.p = p;
  dist.sigma.resize(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      dist.sigma(i, j) = std::pow(0.5, static_cast<double>(std::abs(i - j)));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dist.sigma);
  dist.sigma_sqrt = eig.operatorSqrt();
  return dist;
}

Matrix PredictorDist::draw_z(Index n, Rng &rng) const {
  Matrix z(n, p);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (id) {
  case DistId::I:
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j)
        z(i, j) = normal(rng);
    break;
  case DistId::II: {
    const double a = std::sqrt(3.0);
    std::uniform_real_distribution<double> unif(-a, a);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j)
        z(i, j) = unif(rng);
    break;
  }
  case DistId::III: {
    std::uniform_int_distribution<Index> coord(0, p - 1);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < p; ++j)
        z(i, j) = normal(rng);
      z(i, coord(rng)) += 2.0;
    }
    break;
  }
  }
  return z;
}

GeneratedData generate(const ModelSpec &model, const PredictorDist &dist, Index n,
                       std::uint64_t seed, bool noise) {
  if (n < 1)
    throw InvalidDimension("generate: need n >= 1");
  if (model.b_true.rows() != dist.p)
    throw InvalidDimension("generate: model and distribution disagree on p");
  Rng rng(seed);
  // rows of Z times the symmetric root give rows of Sigma^{1/2} Z
  Matrix x = dist.draw_z(n, rng) * dist.sigma_sqrt;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const double eps = normal(rng);
    y(i) = model.response(x.row(i), noise ? eps : 0.0);
  }
  return {std::move(x), std::move(y), model.b_true};
}

MethodSpec MethodSpec::parse(const std::string &text) {
  MethodSpec method;
  std::string body = text;
  for (const std::string suffix : {"+weighted", "_weighted"}) {
    if (body.size() > suffix.size() &&
        body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0) {
      body.erase(body.size() - suffix.size());
      method.weighting = Weighting::weighted;
      break;
    }
  }
  try {
    method.ensemble = EnsembleSpec::parse(body);
  } catch (const Error &e) {
    throw UsageError("invalid method '" + text + "': " + e.what());
  }
  return method;
}

std::string MethodSpec::to_string() const {
  std::string s = ensemble.m ? ensemble.to_string() : ecve::to_string(ensemble.kind);
  if (weighting == Weighting::weighted)
    s += "+weighted";
  return s;
}

void summarize(StudyResult &result) {
  const auto r = result.errors.size();
  result.replicates = static_cast<int>(r);
  if (r == 0) {
    result.mean = 0.0;
    result.sd = 0.0;
    result.sd_degenerate = true;
    return;
  }
  CompensatedSum total;
  for (double e : result.errors)
    total.add(e);
  result.mean = total.value() / static_cast<double>(r);
  if (r == 1) {
    result.sd = 0.0;
    result.sd_degenerate = true;
    return;
  }
  CompensatedSum sq;
  for (double e : result.errors)
    sq.add((e - result.mean) * (e - result.mean));
  result.sd = std::sqrt(sq.value() / static_cast<double>(r - 1));
  result.sd_degenerate = false;
}

StudyResult run_study(ModelId model_id, DistId dist_id, Index n, const MethodSpec &method,
                      int r, std::uint64_t seed, const OptimizerConfig &opt,
                      std::size_t threads) {
  if (r < 1)
    throw InvalidConfig("run_study: need r >= 1");
  const ModelSpec model = ModelSpec::make(model_id);
  const PredictorDist dist = PredictorDist::make(dist_id, model.b_true.rows());

  StudyResult result;
  result.model = model_id;
  result.dist = dist_id;
  result.n = n;
  result.method = method.to_string();
  result.errors.assign(static_cast<std::size_t>(r), 0.0);

  // replicates run in parallel; each fit stays single threaded
  parallel_for(static_cast<std::size_t>(r), resolve_threads(threads), [&](std::size_t i) {
    const GeneratedData data =
        generate(model, dist, n, derive_seed(seed, streams::kSimulationData, i));
    OptimizerConfig rep_opt = opt;
    rep_opt.seed = derive_seed(seed, streams::kSimulationFit, i);
    rep_opt.threads = 1;
    const EcveFit f =
        fit(data.x, data.y, model.k, method.ensemble, method.weighting, rep_opt);
    result.errors[i] = subspace_error(data.b_true, f.b_hat);
  });
  summarize(result);
  return result;
}

std::vector<StudyResult> consistency_sweep(ModelId model, DistId dist,
                                           const std::vector<Index> &ns,
                                           const MethodSpec &method, int r,
                                           std::uint64_t seed,
                                           const OptimizerConfig &opt,
                                           std::size_t threads) {
  if (ns.empty())
    throw InvalidConfig("consistency_sweep: empty sample-size list");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw InvalidConfig("consistency_sweep: sample sizes must increase");
  std::vector<StudyResult> out;
  out.reserve(ns.size());
  for (Index n : ns)
    out.push_back(run_study(model, dist, n, method, r, seed, opt, threads));
  return out;
}

namespace {

std::string fmt(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// full precision for machine-readable output
std::string exact(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

} // namespace

void write_summary_csv(std::ostream &out, const std::vector<StudyResult> &results) {
  out << "model,dist,n,method,replicates,mean_err,sd_err\n";
  for (const StudyResult &r : results)
    out << to_string(r.model) << ',' << to_string(r.dist) << ',' << r.n << ','
        << r.method << ',' << r.replicates << ',' << exact(r.mean) << ','
        << exact(r.sd) << '\n';
}

void write_long_csv(std::ostream &out, const std::vector<StudyResult> &results) {
  out << "model,dist,n,method,rep,err\n";
  for (const StudyResult &r : results)
    for (std::size_t i = 0; i < r.errors.size(); ++i)
      out << to_string(r.model) << ',' << to_string(r.dist) << ',' << r.n << ','
          << r.method << ',' << i + 1 << ',' << exact(r.errors[i]) << '\n';
}

void write_table(std::ostream &out, const std::vector<StudyResult> &results) {
  std::vector<std::string> methods;
  std::vector<std::pair<std::string, std::string>> rows; // (model, "dist n")
  std::map<std::pair<std::string, std::string>, const StudyResult *> cell;
  for (const StudyResult &r : results) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    const std::pair<std::string, std::string> key{
        to_string(r.model), to_string(r.dist) + " " + std::to_string(r.n)};
    if (std::find(rows.begin(), rows.end(), key) == rows.end())
      rows.push_back(key);
    cell[{key.first + "|" + key.second, r.method}] = &r;
  }

  std::size_t width = 8;
  for (const std::string &m : methods)
    width = std::max(width, m.size() + 2);
  const int label = 12;

  std::string current_model;
  for (const auto &[model, row] : rows) {
    if (model != current_model) {
      if (!current_model.empty())
        out << '\n';
      current_model = model;
      out << std::left << std::setw(label) << model;
      for (const std::string &m : methods)
        out << std::right << std::setw(static_cast<int>(width)) << m;
      out << '\n';
    }
    std::ostringstream mean_line, sd_line;
    mean_line << std::left << std::setw(label) << row;
    sd_line << std::left << std::setw(label) << "";
    for (const std::string &m : methods) {
      const auto it = cell.find({model + "|" + row, m});
      if (it == cell.end()) {
        mean_line << std::right << std::setw(static_cast<int>(width)) << "-";
        sd_line << std::right << std::setw(static_cast<int>(width)) << "";
        continue;
      }
      const StudyResult &r = *it->second;
      mean_line << std::right << std::setw(static_cast<int>(width)) << fmt(r.mean, 3);
      const std::string sd = r.sd_degenerate ? "(n/a)" : "(" + fmt(r.sd, 3) + ")";
      sd_line << std::right << std::setw(static_cast<int>(width)) << sd;
    }
    out << mean_line.str() << '\n' << sd_line.str() << '\n';
  }
}

} // namespace ecve

#include "ecve/fit_io.hpp"

#include "ecve/csv.hpp"
#include "ecve/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ecve {

using nlohmann::json;

namespace {

json matrix_json(const Matrix &m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json &j, const char *name) {
  if (!j.is_array() || j.empty())
    throw ParseError(std::string("fit JSON: '") + name + "' must be a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError(std::string("fit JSON: ragged matrix '") + name + "'");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vector vector_from(const json &j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json optimizer_json(const OptimizerConfig &o) {
  return {{"attempts", o.attempts},
          {"max_iter", o.max_iter},
          {"tol_rel", o.tol_rel},
          {"armijo_c", o.armijo_c},
          {"backtrack_factor", o.backtrack_factor},
          {"initial_step", o.initial_step},
          {"max_backtracks", o.max_backtracks},
          {"seed", o.seed}};
}

OptimizerConfig optimizer_from(const json &j) {
  OptimizerConfig o;
  o.attempts = j.at("attempts").get<int>();
  o.max_iter = j.at("max_iter").get<int>();
  o.tol_rel = j.at("tol_rel").get<double>();
  o.armijo_c = j.at("armijo_c").get<double>();
  o.backtrack_factor = j.at("backtrack_factor").get<double>();
  o.initial_step = j.at("initial_step").get<double>();
  o.max_backtracks = j.at("max_backtracks").get<int>();
  o.seed = j.at("seed").get<std::uint64_t>();
  return o;
}

} // namespace

std::string fit_to_json(const EcveFit &fit) {
  json doc;
  doc["p"] = fit.p;
  doc["k"] = fit.k;
  doc["q"] = fit.q;
  doc["B_hat"] = matrix_json(fit.b_hat);
  doc["B_hat_standardized"] = matrix_json(fit.b_hat_standardized);
  doc["V_hat"] = matrix_json(fit.v_hat.matrix());
  doc["objective_value"] = fit.objective_value;
  doc["converged"] = fit.converged;
  doc["attempt_values"] = fit.attempt_values;
  doc["config"] = {{"ensemble", fit.config.ensemble.to_string()},
                   {"m", fit.config.m},
                   {"weighting", to_string(fit.config.weighting)},
                   {"kernel", fit.config.kernel},
                   {"bandwidth", fit.config.bandwidth},
                   {"n", fit.config.n},
                   {"optimizer", optimizer_json(fit.config.optimizer)}};
  doc["standardization"] = {
      {"means", std::vector<double>(fit.standardization.means.begin(),
                                    fit.standardization.means.end())},
      {"sds", std::vector<double>(fit.standardization.sds.begin(),
                                  fit.standardization.sds.end())}};
  doc["seed"] = fit.seed;
  doc["warnings"] = fit.warnings;
  if (!fit.predictor_names.empty())
    doc["predictors"] = fit.predictor_names;
  if (!fit.response_name.empty())
    doc["response"] = fit.response_name;
  return doc.dump(2) + "\n";
}

EcveFit fit_from_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("fit JSON: ") + e.what());
  }
  try {
    const json &cfg = doc.at("config");
    FitConfig config{EnsembleSpec::parse(cfg.at("ensemble").get<std::string>()),
                     cfg.at("m").get<int>(),
                     parse_weighting(cfg.at("weighting").get<std::string>()),
                     cfg.at("kernel").get<std::string>(),
                     cfg.at("bandwidth").get<double>(),
                     optimizer_from(cfg.at("optimizer")),
                     cfg.at("n").get<Index>()};
    StandardizationParams standardization{
        vector_from(doc.at("standardization").at("means")),
        vector_from(doc.at("standardization").at("sds"))};

    EcveFit fit{doc.at("p").get<Index>(),
                doc.at("k").get<Index>(),
                doc.at("q").get<Index>(),
                matrix_from(doc.at("B_hat"), "B_hat"),
                doc.contains("B_hat_standardized")
                    ? matrix_from(doc["B_hat_standardized"], "B_hat_standardized")
                    : Matrix(),
                StiefelPoint(matrix_from(doc.at("V_hat"), "V_hat")),
                doc.at("objective_value").get<double>(),
                doc.value("converged", false),
                doc.value("attempt_values", std::vector<double>{}),
                std::move(config),
                std::move(standardization),
                doc.at("seed").get<std::uint64_t>(),
                doc.value("warnings", std::vector<std::string>{}),
                doc.value("predictors", std::vector<std::string>{}),
                doc.value("response", std::string{})};

    if (!fit.predictor_names.empty() &&
        static_cast<Index>(fit.predictor_names.size()) != fit.p)
      throw ParseError("fit JSON: predictors must have p entries");

    if (fit.b_hat.rows() != fit.p || fit.b_hat.cols() != fit.k)
      throw ParseError("fit JSON: B_hat must be p x k");
    if (fit.v_hat.p() != fit.p || fit.v_hat.q() != fit.q || fit.k + fit.q != fit.p)
      throw ParseError("fit JSON: inconsistent p, k, q");
    if (fit.standardization.means.size() != fit.p || fit.standardization.sds.size() != fit.p)
      throw ParseError("fit JSON: standardization must have p entries");
    return fit;
  } catch (const json::exception &e) {
    throw ParseError(std::string("fit JSON: ") + e.what());
  } catch (const ContractViolation &e) {
    throw ParseError(std::string("fit JSON: V_hat is not orthonormal: ") + e.what());
  }
}

void save_fit(const std::string &path, const EcveFit &fit) {
  atomic_write(path, fit_to_json(fit));
}

EcveFit load_fit(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fit_from_json(buffer.str());
}

} // namespace ecve

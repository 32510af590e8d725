#include "gadd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gadd/errors.hpp"
#include "gadd/polybasis.hpp"

namespace gadd {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<int> one_based(const VariableSubset& u) {
  std::vector<int> out;
  for (int i : u) out.push_back(i + 1);
  return out;
}

json optional_real(double v, bool present) { return present ? json(v) : json(nullptr); }

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json expansion_to_json(const AddExpansion& e) {
  const BasisSet& basis = e.basis();
  json coeffs = json::array();
  for (std::size_t k = 0; k < basis.size(); ++k)
    coeffs.push_back({{"subset", one_based(basis[k].subset)},
                      {"index", basis[k].index.degrees()},
                      {"value", e.coefficients()(static_cast<Eigen::Index>(k))}});
  const SolveDiagnostics& d = e.diagnostics();
  return {{"schema", kExpansionSchema},
          {"kind", "gadd-expansion"},
          {"dimension", e.dimension()},
          {"covariance", matrix_to_json(basis.measure().covariance())},
          {"S", e.max_subset_size()},
          {"m", e.max_degree()},
          {"classical", d.classical},
          {"constant", e.constant()},
          {"coefficients", std::move(coeffs)},
          {"diagnostics",
           {{"condition_estimate", d.condition_estimate},
            {"residual", d.residual},
            {"model_evaluations", d.model_evaluations},
            {"plan_evaluations", d.plan_evaluations}}}};
}

AddExpansion expansion_from_json(const json& doc) {
  try {
    if (doc.at("schema").get<int>() != kExpansionSchema || doc.at("kind") != "gadd-expansion")
      throw ConfigError("not a schema-1 expansion document");
    const int n = doc.at("dimension").get<int>();
    const auto& rows = doc.at("covariance");
    if (static_cast<int>(rows.size()) != n) throw ConfigError("expansion covariance has the wrong shape");
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw ConfigError("expansion covariance has the wrong shape");
      for (int j = 0; j < n; ++j) cov(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    }
    auto basis = std::make_shared<const BasisSet>(
        build_basis(validate_covariance(cov), doc.at("S").get<int>(), doc.at("m").get<int>()));
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
    std::vector<bool> seen(basis->size(), false);
    for (const auto& c : doc.at("coefficients")) {
      const VariableSubset u = VariableSubset::from_one_based(c.at("subset").get<std::vector<int>>());
      const MultiIndex j(c.at("index").get<std::vector<int>>());
      const auto k = basis->find(u, j);
      if (!k) throw ConfigError("expansion coefficient " + u.to_string() + "/" + j.to_label() + " is not in the basis");
      if (seen[*k]) throw ConfigError("duplicate expansion coefficient " + u.to_string() + "/" + j.to_label());
      seen[*k] = true;
      z(static_cast<Eigen::Index>(*k)) = c.at("value").get<double>();
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ConfigError("expansion document is missing coefficients");
    SolveDiagnostics d;
    d.classical = doc.value("classical", false);
    if (auto it = doc.find("diagnostics"); it != doc.end()) {
      d.condition_estimate = it->value("condition_estimate", 1.0);
      d.residual = it->value("residual", 0.0);
      d.model_evaluations = it->value("model_evaluations", std::size_t{0});
      d.plan_evaluations = it->value("plan_evaluations", std::vector<std::size_t>{});
    }
    return AddExpansion(std::move(basis), doc.at("constant").get<double>(), std::move(z), std::move(d));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed expansion document: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid expansion document: ") + e.what());
  }
}

void save_expansion(const AddExpansion& expansion, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write '" + path.string() + "'");
  out << expansion_to_json(expansion).dump(2) << '\n';
}

AddExpansion load_expansion(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open expansion '" + path.string() + "'");
  try {
    return expansion_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("expansion '" + path.string() + "': " + e.what());
  }
}

void write_components_csv(const AddExpansion& e, std::ostream& out) {
  out << "subset,exponents,coefficient\n";
  out << ",," << format_real(e.constant()) << '\n';
  for (const auto& [u, p] : component_functions(e)) {
    const std::string label = u.to_label();
    for (const auto& [alpha, c] : p.terms()) out << label << ',' << alpha.to_label() << ',' << format_real(c) << '\n';
  }
}

json report_to_json(const SensitivityReport& r, const VarianceBreakdown& vb, const AdaptiveSelection* adaptive) {
  json subsets = json::array();
  for (const auto& s : r.subsets)
    subsets.push_back({{"subset", one_based(s.subset)},
                       {"variance_driven", s.variance_driven},
                       {"covariance_driven", s.covariance_driven},
                       {"total", s.total}});
  json effects = json::array();
  for (const auto& t : r.effects)
    effects.push_back({{"variable", t.variable + 1}, {"total_effect", t.value}, {"rank", t.rank}, {"tied", t.tied}});
  json pairs = json::array();
  for (const auto& p : vb.pairs) pairs.push_back({{"u", one_based(p.u)}, {"v", one_based(p.v)}, {"value", p.value}});
  json out = {{"schema", kExpansionSchema},
              {"dimension", r.dimension},
              {"S", r.max_subset_size},
              {"m", r.max_degree},
              {"mean", r.mean},
              {"variance", r.variance},
              {"variance_sum", vb.variance_sum},
              {"covariance_sum", vb.covariance_sum},
              {"covariance_pairs", std::move(pairs)},
              {"subsets", std::move(subsets)},
              {"sums",
               {{"variance_driven", r.variance_driven_sum()},
                {"covariance_driven", r.covariance_driven_sum()},
                {"total", r.variance_driven_sum() + r.covariance_driven_sum()}}},
              {"effects", std::move(effects)}};
  if (r.dimensions) {
    const auto& d = *r.dimensions;
    out["effective_dimensions"] = {{"threshold", d.threshold},
                                   {"superposition", d.superposition},
                                   {"superposition_saturated", d.superposition_saturated},
                                   {"truncation", d.truncation},
                                   {"truncation_saturated", d.truncation_saturated}};
  }
  if (adaptive) {
    json kept = json::array();
    for (const auto& c : adaptive->retained)
      kept.push_back({{"subset", one_based(c.subset)}, {"order", c.order}, {"index", c.index}});
    out["adaptive"] = {{"epsilon1", adaptive->epsilon1}, {"epsilon2", adaptive->epsilon2}, {"retained", std::move(kept)}};
  }
  return out;
}

void write_indices_csv(const SensitivityReport& r, std::ostream& out) {
  out << "subset,variance_driven,covariance_driven,total\n";
  for (const auto& s : r.subsets)
    out << s.subset.to_label() << ',' << format_real(s.variance_driven) << ',' << format_real(s.covariance_driven)
        << ',' << format_real(s.total) << '\n';
  const double sv = r.variance_driven_sum();
  const double sc = r.covariance_driven_sum();
  out << "sum," << format_real(sv) << ',' << format_real(sc) << ',' << format_real(sv + sc) << '\n';
}

void write_effects_csv(const SensitivityReport& r, std::ostream& out) {
  out << "variable,total_effect,rank,tied\n";
  for (const auto& t : r.effects)
    out << t.variable + 1 << ',' << format_real(t.value) << ',' << t.rank << ',' << (t.tied ? "true" : "false") << '\n';
}

SampleSummary summarize(const Eigen::VectorXd& y, int bins) {
  if (bins < 1) throw DomainError("histogram needs at least one bin");
  SampleSummary s;
  s.count = static_cast<std::size_t>(y.size());
  if (s.count == 0) return s;
  const double n = static_cast<double>(s.count);
  s.mean = y.mean();
  const Eigen::ArrayXd d = y.array() - s.mean;
  const double m2 = d.square().mean();
  const double m4 = d.square().square().mean();
  s.variance = s.count > 1 ? m2 * n / (n - 1.0) : 0.0;
  s.std_dev = std::sqrt(s.variance);
  s.mean_std_error = std::sqrt(s.variance / n);
  s.variance_std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  s.min = y.minCoeff();
  s.max = y.maxCoeff();
  const double width = s.max > s.min ? (s.max - s.min) / bins : 1.0;
  s.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) s.bin_edges[static_cast<std::size_t>(b)] = s.min + b * width;
  s.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    auto b = static_cast<long>((y(i) - s.min) / width);
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++s.bin_counts[static_cast<std::size_t>(b)];
  }
  return s;
}

json summary_to_json(const SampleSummary& s) {
  const bool any = s.count > 0;
  return {{"count", s.count},
          {"mean", optional_real(s.mean, any)},
          {"variance", optional_real(s.variance, any)},
          {"std", optional_real(s.std_dev, any)},
          {"mean_std_error", optional_real(s.mean_std_error, any)},
          {"variance_std_error", optional_real(s.variance_std_error, any)},
          {"min", optional_real(s.min, any)},
          {"max", optional_real(s.max, any)},
          {"histogram", {{"edges", s.bin_edges}, {"counts", s.bin_counts}}}};
}

void write_samples_csv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::ostream& out) {
  out << "index";
  for (Eigen::Index k = 0; k < x.cols(); ++k) out << ",x" << k + 1;
  out << ",y\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < x.cols(); ++k) out << ',' << format_real(x(i, k));
    out << ',' << format_real(y(i)) << '\n';
  }
}

}  // namespace gadd

#include "gadd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gadd/errors.hpp"
#include "gadd/measure.hpp"

namespace gadd {

using nlohmann::json;

namespace {

// ---- TOML subset -------------------------------------------------------------------------------

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

  json parse() {
    json v = value();
    skip();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  json value() {
    skip();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '[') return array();
    if (c == '"') return string();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  json array() {
    ++pos_;
    json out = json::array();
    while (true) {
      skip();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      else if (pos_ < s_.size() && s_[pos_] != ']') fail("expected ',' or ']' in array");
    }
  }

  json string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                s_[pos_] == '+' || s_[pos_] == '-'))
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("unexpected character '" + std::string(1, s_[start]) + "'");
    const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
    const char* e = tok.data() + tok.size();
    if (tok.find_first_of(".eE") == std::string::npos || tok == "inf" || tok == "nan") {
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(b, e, i);
      if (ec == std::errc() && p == e) return i;
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(b, e, d);
    if (ec != std::errc() || p != e) fail("cannot parse value '" + tok + "'");
    return d;
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Bracket depth outside strings and comments.
int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// ---- schema ------------------------------------------------------------------------------------

void check_keys(const json& table, const std::string& name, const std::set<std::string>& allowed) {
  if (!table.is_object()) throw ConfigError("'" + name + "' must be a table");
  for (const auto& [k, v] : table.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + (name.empty() ? k : name + "." + k) + "'");
}

const json* get(const json& table, const char* key) {
  auto it = table.find(key);
  return it == table.end() ? nullptr : &*it;
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("'" + where + "' must be a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError("'" + where + "' must be an integer");
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("'" + where + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_reals(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_real(x, where));
  return out;
}

Eigen::MatrixXd parse_covariance(const json& t, int n) {
  const json* matrix = get(t, "matrix");
  const json* rho = get(t, "correlations");
  const json* var = get(t, "variances");
  if (matrix && (rho || var)) throw ConfigError("'covariance.matrix' excludes 'correlations' and 'variances'");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  if (matrix) {
    if (!matrix->is_array() || static_cast<int>(matrix->size()) != n)
      throw ConfigError("'covariance.matrix' must have " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
      const auto row = as_reals((*matrix)[static_cast<std::size_t>(i)], "covariance.matrix");
      if (static_cast<int>(row.size()) != n)
        throw ConfigError("'covariance.matrix' row " + std::to_string(i + 1) + " must have " + std::to_string(n) +
                          " entries");
      for (int j = 0; j < n; ++j) cov(i, j) = row[static_cast<std::size_t>(j)];
    }
    return cov;
  }
  Eigen::VectorXd sd = Eigen::VectorXd::Ones(n);
  if (var) {
    const auto v = as_reals(*var, "covariance.variances");
    if (static_cast<int>(v.size()) != n)
      throw ConfigError("'covariance.variances' must have " + std::to_string(n) + " entries");
    for (int i = 0; i < n; ++i) {
      if (!(v[static_cast<std::size_t>(i)] > 0.0)) throw ConfigError("'covariance.variances' must be positive");
      sd(i) = std::sqrt(v[static_cast<std::size_t>(i)]);
    }
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
  if (rho) {
    if (!rho->is_array()) throw ConfigError("'covariance.correlations' must be an array of [i, j, rho] triples");
    for (const auto& entry : *rho) {
      if (!entry.is_array() || entry.size() != 3)
        throw ConfigError("'covariance.correlations' entries must be [i, j, rho] triples");
      const auto i = as_int(entry[0], "covariance.correlations");
      const auto j = as_int(entry[1], "covariance.correlations");
      const double r = as_real(entry[2], "covariance.correlations");
      if (i < 1 || j < 1 || i > n || j > n || i == j)
        throw ConfigError("'covariance.correlations' index pair (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is out of range for N=" + std::to_string(n));
      corr(i - 1, j - 1) = corr(j - 1, i - 1) = r;
    }
  }
  return sd.asDiagonal() * corr * sd.asDiagonal();
}

ModelSpec parse_model(const json& t, int n) {
  check_keys(t, "model",
             {"kind", "parameters", "coefficients", "constant", "terms", "command", "timeout", "restart", "pool"});
  ModelSpec m;
  const json* kind = get(t, "kind");
  if (!kind) throw ConfigError("'model.kind' is required");
  m.kind = as_string(*kind, "model.kind");
  if (m.kind == "quadratic_symmetric") {
    if (n != 3) throw ConfigError("model 'quadratic_symmetric' needs N=3, got N=" + std::to_string(n));
    if (const json* p = get(t, "parameters")) {
      const auto v = as_reals(*p, "model.parameters");
      if (v.size() != 6) throw ConfigError("'model.parameters' must list a0 a1 b0 b1 c0 c1");
      std::copy(v.begin(), v.end(), m.quadratic.begin());
    }
  } else if (m.kind == "additive_linear") {
    const json* c = get(t, "coefficients");
    if (!c) throw ConfigError("'model.coefficients' is required for additive_linear");
    m.coefficients = as_reals(*c, "model.coefficients");
    if (static_cast<int>(m.coefficients.size()) != n)
      throw ConfigError("'model.coefficients' must have N=" + std::to_string(n) + " entries");
    if (const json* c0 = get(t, "constant")) m.constant = as_real(*c0, "model.constant");
  } else if (m.kind == "polynomial") {
    const json* terms = get(t, "terms");
    if (!terms || !terms->is_array()) throw ConfigError("'model.terms' must be an array of [coef, e1, ..., eN]");
    for (const auto& term : *terms) {
      if (!term.is_array() || static_cast<int>(term.size()) != n + 1)
        throw ConfigError("'model.terms' entries must hold a coefficient and " + std::to_string(n) + " exponents");
      std::vector<int> e;
      for (int k = 1; k <= n; ++k) {
        const auto ek = as_int(term[static_cast<std::size_t>(k)], "model.terms");
        if (ek < 0) throw ConfigError("'model.terms' exponents must be non-negative");
        e.push_back(static_cast<int>(ek));
      }
      m.terms.emplace_back(as_real(term[0], "model.terms"), std::move(e));
    }
  } else if (m.kind == "external") {
    const json* cmd = get(t, "command");
    if (!cmd) throw ConfigError("'model.command' is required for external models");
    m.external.command = as_string(*cmd, "model.command");
    if (const json* to = get(t, "timeout")) m.external.timeout_seconds = as_real(*to, "model.timeout");
    if (!(m.external.timeout_seconds > 0.0)) throw ConfigError("'model.timeout' must be positive");
    if (const json* r = get(t, "restart")) {
      const std::string policy = as_string(*r, "model.restart");
      if (policy == "on_failure") m.external.restart_on_failure = true;
      else if (policy != "never") throw ConfigError("'model.restart' must be \"never\" or \"on_failure\"");
    }
    if (const json* p = get(t, "pool")) m.external.pool = static_cast<int>(as_int(*p, "model.pool"));
    if (m.external.pool < 1) throw ConfigError("'model.pool' must be >= 1");
  } else {
    throw ConfigError("unknown model kind '" + m.kind + "'");
  }
  return m;
}

}  // namespace

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.max_subset_size = max_subset_size;
  o.max_degree = max_degree;
  o.method = method;
  o.reduction_order = reduction_order;
  o.quadrature_points = quadrature_points > 0 ? quadrature_points : (max_degree + 1) | 1;
  return o;
}

json parse_toml_subset(std::string_view text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      const auto close = t.find(']');
      if (close == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": bad table header");
      const std::string name = trim(std::string_view(t).substr(1, close - 1));
      const std::string rest = trim(std::string_view(t).substr(close + 1));
      if (!valid_key(name) || (!rest.empty() && rest[0] != '#'))
        throw ConfigError("config line " + std::to_string(lineno) + ": bad table header '" + t + "'");
      if (root.contains(name))
        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate table or key '" + name + "'");
      root[name] = json::object();
      table = &root[name];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (!valid_key(key)) throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    std::string value = t.substr(eq + 1);
    const int start = lineno;
    while (bracket_balance(value) > 0 && std::getline(in, line)) {
      ++lineno;
      value += "\n" + line;
    }
    if (table->contains(key))
      throw ConfigError("config line " + std::to_string(start) + ": duplicate key '" + key + "'");
    (*table)[key] = ValueParser(value, start).parse();
  }
  return root;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "", {"schema", "covariance", "model", "truncation", "quadrature", "sampling", "sensitivity", "output"});
  const json* schema = get(doc, "schema");
  if (!schema) throw ConfigError("'schema' is required (schema = " + std::to_string(kConfigSchema) + ")");
  if (as_int(*schema, "schema") != kConfigSchema)
    throw ConfigError("unsupported schema " + schema->dump() + "; expected " + std::to_string(kConfigSchema));

  RunConfig c;
  const json* cov = get(doc, "covariance");
  if (!cov) throw ConfigError("'covariance' table is required");
  check_keys(*cov, "covariance", {"dimension", "matrix", "correlations", "variances"});
  const json* dim = get(*cov, "dimension");
  if (!dim) throw ConfigError("'covariance.dimension' is required");
  c.dimension = static_cast<int>(as_int(*dim, "covariance.dimension"));
  if (c.dimension < 1) throw ConfigError("'covariance.dimension' must be >= 1");
  c.covariance = parse_covariance(*cov, c.dimension);
  try {
    (void)validate_covariance(c.covariance);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid covariance: ") + e.what());
  }

  const json* model = get(doc, "model");
  if (!model) throw ConfigError("'model' table is required");
  c.model = parse_model(*model, c.dimension);

  if (const json* t = get(doc, "truncation")) {
    check_keys(*t, "truncation", {"S", "m"});
    if (const json* v = get(*t, "S")) c.max_subset_size = static_cast<int>(as_int(*v, "truncation.S"));
    if (const json* v = get(*t, "m")) c.max_degree = static_cast<int>(as_int(*v, "truncation.m"));
  }
  if (c.max_subset_size < 1 || c.max_subset_size > c.dimension)
    throw ConfigError("'truncation.S' must lie in 1..N");
  if (c.max_degree < 1) throw ConfigError("'truncation.m' must be >= 1");

  if (const json* t = get(doc, "quadrature")) {
    check_keys(*t, "quadrature", {"method", "points", "order"});
    if (const json* v = get(*t, "method")) {
      const std::string m = as_string(*v, "quadrature.method");
      if (m == "auto") c.method = IntegrationMethod::Auto;
      else if (m == "exact") c.method = IntegrationMethod::Exact;
      else if (m == "reduction") c.method = IntegrationMethod::DimensionReduction;
      else throw ConfigError("'quadrature.method' must be \"auto\", \"exact\" or \"reduction\"");
    }
    if (const json* v = get(*t, "points")) {
      c.quadrature_points = static_cast<int>(as_int(*v, "quadrature.points"));
      if (c.quadrature_points < 1 || c.quadrature_points % 2 == 0)
        throw ConfigError("'quadrature.points' must be a positive odd integer");
    }
    if (const json* v = get(*t, "order")) c.reduction_order = static_cast<int>(as_int(*v, "quadrature.order"));
    if (c.reduction_order < 1 || c.reduction_order > 2) throw ConfigError("'quadrature.order' must be 1 or 2");
  }
  if (c.method == IntegrationMethod::Exact && c.model.kind == "external")
    throw ConfigError("exact integration needs a polynomial model");

  if (const json* t = get(doc, "sampling")) {
    check_keys(*t, "sampling", {"count", "seed", "bins"});
    if (const json* v = get(*t, "count")) {
      const auto n = as_int(*v, "sampling.count");
      if (n < 0) throw ConfigError("'sampling.count' must be >= 0");
      c.sample_count = static_cast<std::size_t>(n);
    }
    if (const json* v = get(*t, "seed")) c.seed = static_cast<std::uint64_t>(as_int(*v, "sampling.seed"));
    if (const json* v = get(*t, "bins")) c.histogram_bins = static_cast<int>(as_int(*v, "sampling.bins"));
    if (c.histogram_bins < 1) throw ConfigError("'sampling.bins' must be >= 1");
  }

  if (const json* t = get(doc, "sensitivity")) {
    check_keys(*t, "sensitivity", {"threshold", "adaptive", "epsilon1", "epsilon2", "max_order"});
    if (const json* v = get(*t, "threshold")) c.threshold = as_real(*v, "sensitivity.threshold");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw ConfigError("'sensitivity.threshold' must lie in [0, 1]");
    bool adaptive = false;
    if (const json* v = get(*t, "adaptive")) {
      if (!v->is_boolean()) throw ConfigError("'sensitivity.adaptive' must be true or false");
      adaptive = v->get<bool>();
    }
    if (adaptive) {
      AdaptiveSpec a;
      if (const json* v = get(*t, "epsilon1")) a.epsilon1 = as_real(*v, "sensitivity.epsilon1");
      if (const json* v = get(*t, "epsilon2")) a.epsilon2 = as_real(*v, "sensitivity.epsilon2");
      if (const json* v = get(*t, "max_order")) a.max_order = static_cast<int>(as_int(*v, "sensitivity.max_order"));
      if (a.epsilon1 < 0.0 || a.epsilon2 < 0.0) throw ConfigError("adaptive tolerances must be non-negative");
      if (a.max_order < 1) throw ConfigError("'sensitivity.max_order' must be >= 1");
      c.adaptive = a;
    }
  }

  if (const json* t = get(doc, "output")) {
    check_keys(*t, "output", {"directory", "expansion"});
    if (const json* v = get(*t, "directory")) c.output_directory = as_string(*v, "output.directory");
    if (const json* v = get(*t, "expansion")) c.expansion_path = as_string(*v, "output.expansion");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  if (path.extension() == ".json") {
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + path.string() + "': " + e.what());
    }
  } else {
    doc = parse_toml_subset(ss.str());
  }
  return parse_config(doc);
}

}  // namespace gadd

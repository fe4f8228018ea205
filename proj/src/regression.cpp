#include "equishrink/regression.hpp"

#include <cmath>
#include <istream>
#include <random>
#include <sstream>

#include "equishrink/error.hpp"
#include "parallel.hpp"

namespace equishrink {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::MatrixXd centered(const Eigen::MatrixXd& z) { return z.rowwise() - z.colwise().mean(); }

std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("csv line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

CanonicalForm canonicalize(const RegressionData& data) {
  const int m = static_cast<int>(data.z.rows());
  const int p = static_cast<int>(data.z.cols());
  if (data.y.size() != m) throw DimensionMismatch("regression: y and Z have different row counts");
  if (p < 1) throw DomainError("regression: at least one predictor is required");
  if (m <= p + 1) throw DomainError("regression: need m > p + 1 observations");
  if (!data.y.allFinite() || !data.z.allFinite()) throw DomainError("regression: non-finite data");

  CanonicalForm c;
  c.m = m;
  c.p = p;
  c.n = m - p - 1;
  const Eigen::MatrixXd zc = centered(data.z);
  c.ybar = data.y.mean();
  const Eigen::VectorXd yc = data.y.array() - c.ybar;
  if (yc.squaredNorm() == 0.0) throw DegenerateScale("regression: response is constant");

  const Eigen::MatrixXd gram = zc.transpose() * zc;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.maxCoeff();
  c.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(c.gram_condition < kMaxCondition)) {
    throw DomainError("regression: centered predictors are rank deficient or ill-conditioned (Gram condition " +
                      std::to_string(c.gram_condition) + ")");
  }
  c.half_gram = eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(zc);
  c.beta_hat = qr.solve(yc);
  c.x = c.half_gram * c.beta_hat;
  c.s = (yc - zc * c.beta_hat).squaredNorm();
  const double xx = c.x.squaredNorm();
  c.r_squared = xx / (xx + c.s);
  c.w = c.s > 0.0 ? xx / c.s : std::numeric_limits<double>::infinity();
  c.t_values = c.s > 0.0 ? Eigen::VectorXd(c.x / std::sqrt(c.s))
                         : Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
  return c;
}

double shrink_factor(const CanonicalForm& c, const ShrinkageRule& rule) {
  if (rule.dims().p != c.p) throw DimensionMismatch("regression: rule dimension differs from predictor count");
  if (!(c.s > 0.0)) throw DegenerateScale("regression: zero residual sum of squares");
  return 1.0 - rule.psi(c.w);
}

Eigen::VectorXd shrink_coefficients(const CanonicalForm& c, const ShrinkageRule& rule) {
  return shrink_factor(c, rule) * c.beta_hat;
}

double predictive_loss(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta_true, const Eigen::MatrixXd& z,
                       double eta) {
  if (beta_est.size() != beta_true.size() || z.cols() != beta_est.size()) {
    throw DimensionMismatch("predictive loss: dimensions differ");
  }
  if (!(eta > 0.0)) throw DomainError("predictive loss: eta must be positive");
  return eta * (z * (beta_est - beta_true)).squaredNorm();
}

double predictive_loss_half_gram(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta_true,
                                 const Eigen::MatrixXd& half_gram, double eta) {
  return predictive_loss(beta_est, beta_true, half_gram, eta);
}

RiskPoint mc_predictive_risk(const ShrinkageRule& rule, const Eigen::MatrixXd& z, const Eigen::VectorXd& beta,
                             double eta, std::int64_t n_reps, std::uint64_t seed, const McConfig& mc) {
  if (z.cols() != beta.size()) throw DimensionMismatch("predictive risk: beta length differs from Z columns");
  if (!(eta > 0.0)) throw DomainError("predictive risk: eta must be positive");
  if (n_reps < 2) throw DomainError("predictive risk: need at least 2 replications");
  const int m = static_cast<int>(z.rows());
  const Eigen::MatrixXd zc = centered(z);
  const Eigen::VectorXd mean = Eigen::VectorXd::Ones(m) + z * beta;
  const double sd = 1.0 / std::sqrt(eta);
  const int chunks = static_cast<int>((n_reps + static_cast<std::int64_t>(mc.chunk) - 1) / mc.chunk);
  constexpr std::uint64_t kRegressionStream = 0x7265'6772'6573'73ULL;
  struct Part {
    detail::CompensatedSum sum, sum_sq;
    std::int64_t count = 0;
  };
  std::vector<Part> parts(chunks);
  const RegressionData proto{Eigen::VectorXd(), z, {}, {}};
  detail::parallel_for(chunks, mc.threads, [&](int c) {
    const std::int64_t len =
        std::min<std::int64_t>(static_cast<std::int64_t>(mc.chunk), n_reps - static_cast<std::int64_t>(c) * mc.chunk);
    Rng rng(stream_seed(seed, kRegressionStream, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal;
    RegressionData data = proto;
    data.y.resize(m);
    Part& part = parts[c];
    for (std::int64_t i = 0; i < len; ++i) {
      for (int r = 0; r < m; ++r) data.y[r] = mean[r] + sd * normal(rng);
      const CanonicalForm cf = canonicalize(data);
      const double loss = predictive_loss(shrink_coefficients(cf, rule), beta, zc, eta);
      part.sum.add(loss);
      part.sum_sq.add(loss * loss);
      ++part.count;
    }
  });
  detail::CompensatedSum sum, sum_sq;
  std::int64_t count = 0;
  for (const auto& part : parts) {
    sum.add(part.sum.value());
    sum_sq.add(part.sum_sq.value());
    count += part.count;
  }
  RiskPoint pt;
  pt.lambda = eta * (zc * beta).squaredNorm();
  pt.n_reps = count;
  pt.risk = sum.value() / count;
  const double var = std::max(0.0, (sum_sq.value() - count * pt.risk * pt.risk) / (count - 1));
  pt.std_err = std::sqrt(var / count);
  pt.estimator_id = rule.id();
  return pt;
}

RegressionData read_regression_csv(std::istream& in, const std::string& response) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_csv_line(line, line_no);
    break;
  }
  if (header.empty()) throw ParseError("csv: missing header row");
  for (auto& h : header) h = trim(h);
  int resp = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response) {
      if (resp >= 0) throw ParseError("csv: response column '" + response + "' appears twice");
      resp = static_cast<int>(j);
    }
  }
  if (resp < 0) throw ParseError("csv: response column '" + response + "' not found in header");

  RegressionData data;
  data.response_name = response;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) != resp) data.predictor_names.push_back(header[j]);
  }
  std::vector<double> ys;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string cell = trim(fields[j]);
      const std::string where = "csv line " + std::to_string(line_no) + ", column '" + header[j] + "'";
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") throw ParseError(where + ": missing value");
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError(where + ": not a number: '" + cell + "'");
      }
      if (used != cell.size()) throw ParseError(where + ": not a number: '" + cell + "'");
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
      if (static_cast<int>(j) == resp) {
        ys.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  const int m = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size()) - 1;
  data.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), m);
  data.z.resize(m, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) data.z(i, j) = rows[i][j];
  return data;
}

}  // namespace equishrink

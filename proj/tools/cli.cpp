#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "equishrink/blyth.hpp"
#include "equishrink/core_model.hpp"
#include "equishrink/error.hpp"
#include "equishrink/estimators.hpp"
#include "equishrink/io.hpp"
#include "equishrink/regression.hpp"
#include "equishrink/risk_lab.hpp"

namespace equishrink::cli {

namespace {

/// Bad flag combinations found after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned threads = 0;
  std::string format;
  std::string out;
};

struct Meta {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> params;
};

// Every option of the subcommand, as given or as its default.
Meta collect_meta(const CLI::App& sub, std::optional<std::uint64_t> seed) {
  Meta m;
  m.command = sub.get_name();
  m.seed = seed;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "version" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t k = 0; k < res.size(); ++k) value += (k ? "," : "") + res[k];
    } else {
      value = opt->get_default_str();
      // vector defaults come back as "[a,b]"
      if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
    }
    m.params.emplace_back(name, value);
  }
  return m;
}

void write_csv_meta(std::ostream& os, const Meta& m) {
  os << "# command: " << m.command << '\n';
  os << "# version: " << version() << '\n';
  os << "# seed: " << (m.seed ? std::to_string(*m.seed) : std::string("none")) << '\n';
  for (const auto& [k, v] : m.params) os << "# param " << k << ": " << v << '\n';
}

void write_json_meta(io::JsonWriter& j, const Meta& m) {
  j.key("meta").begin_object();
  j.field("command", m.command).field("version", version());
  j.key("seed");
  if (m.seed) {
    j.value(*m.seed);
  } else {
    j.null();
  }
  j.key("params").begin_object();
  for (const auto& [k, v] : m.params) j.field(k, v);
  j.end_object();
  j.end_object();
}

bool is_json(const Common& c, const char* fallback) {
  const std::string f = c.format.empty() ? fallback : c.format;
  return f == "json";
}

/// Writes `text` to --out (binary mode, so LF stays LF) or to `out`.
void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty() || c.out == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open output file '" + c.out + "'");
  f << text;
  if (!f) throw UsageError("failed writing output file '" + c.out + "'");
}

void add_common(CLI::App* sub, Common& c, const char* default_format) {
  sub->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)");
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Output file (default stdout)");
}

/// Splits "js,psi-alpha:0,simple-bayes:1,0" into rules; a piece that does not
/// start a new rule belongs to the previous one.
std::vector<std::string> split_rule_list(const std::string& list) {
  static const char* heads[] = {"natural", "js", "psi-alpha:", "simple-bayes:", "bayes:"};
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    const bool starts = std::any_of(std::begin(heads), std::end(heads), [&](const char* h) {
      const std::string hs(h);
      return hs.back() == ':' ? piece.rfind(hs, 0) == 0 : piece == hs;
    });
    if (starts || out.empty()) {
      out.push_back(piece);
    } else {
      out.back() += "," + piece;
    }
  }
  return out;
}

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "'");
  std::vector<double> v;
  std::string tok;
  char c;
  auto flush = [&] {
    if (tok.empty()) return;
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ParseError("'" + path + "': not a number: '" + tok + "'");
    v.push_back(x);
    tok.clear();
  };
  while (f.get(c)) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  return v;
}

std::string json_text(const std::function<void(io::JsonWriter&)>& body) {
  std::ostringstream os;
  io::JsonWriter j(os);
  j.begin_object();
  body(j);
  j.end_object();
  std::string text = os.str();
  if (text.empty() || text.back() != '\n') text += '\n';
  return text;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
  std::string rule;
  std::optional<int> p;
  int n = 0;
  std::vector<double> x;
  std::string x_file;
  double s = 0.0;
  std::string density = "gaussian";
  Common common;
};

int cmd_estimate(const EstimateOpts& o, const CLI::App& sub, std::ostream& out) {
  std::vector<double> xs = o.x_file.empty() ? o.x : read_vector_file(o.x_file);
  if (o.x_file.empty() == o.x.empty()) throw UsageError("give exactly one of --x and --x-file");
  if (xs.empty()) throw UsageError("x is empty");
  if (o.p && *o.p != static_cast<int>(xs.size())) {
    throw DimensionMismatch("--p is " + std::to_string(*o.p) + " but x has " + std::to_string(xs.size()) +
                            " entries");
  }
  const ProblemDim dims(static_cast<int>(xs.size()), o.n);
  const RadialDensity density = parse_density(o.density, dims);
  const ShrinkageRule rule = parse_rule(o.rule, density, o.common.threads);
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Observation obs(x, o.s);
  const Eigen::VectorXd est = apply_shrinkage(rule, obs);
  const double w = w_statistic(obs);
  const double psi = rule.kind() == ShrinkageRule::Kind::Natural ? 0.0 : rule.psi(w);
  const Meta meta = collect_meta(sub, std::nullopt);

  std::string text;
  if (is_json(o.common, "csv")) {
    text = json_text([&](io::JsonWriter& j) {
      write_json_meta(j, meta);
      j.field("estimator", rule.id()).field("w", w).field("psi", psi).field("factor", 1.0 - psi);
      j.field("x", xs);
      j.field("estimate", std::vector<double>(est.data(), est.data() + est.size()));
    });
  } else {
    std::ostringstream os;
    write_csv_meta(os, meta);
    os << "i,x,estimate,factor,psi,w\n";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      os << i << ',' << io::format_double(x[i]) << ',' << io::format_double(est[i]) << ','
         << io::format_double(1.0 - psi) << ',' << io::format_double(psi) << ',' << io::format_double(w) << '\n';
    }
    text = os.str();
  }
  emit(o.common, text, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// risk-curve

struct RiskOpts {
  std::string rule;
  std::vector<std::string> compare;
  std::string density = "gaussian";
  int p = 0;
  int n = 0;
  std::vector<double> lambda;
  std::int64_t reps = 100000;
  std::uint64_t seed = 0;
  std::string check = "none";
  Common common;
};

int cmd_risk_curve(const RiskOpts& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  std::vector<std::string> specs;
  if (!o.rule.empty()) specs.push_back(o.rule);
  for (const auto& c : o.compare) {
    for (auto& s : split_rule_list(c)) specs.push_back(std::move(s));
  }
  if (specs.empty()) throw UsageError("give --rule and/or --compare");
  const bool paired = !o.compare.empty();
  if (o.check == "dominance" && specs.size() < 2) throw UsageError("--check dominance needs at least two rules");
  for (std::size_t j = 1; j < o.lambda.size(); ++j) {
    if (!(o.lambda[j] > o.lambda[j - 1])) throw DomainError("lambda grid must be strictly increasing");
  }

  const ProblemDim dims(o.p, o.n);
  const RadialDensity density = parse_density(o.density, dims);
  std::vector<ShrinkageRule> rules;
  for (const auto& s : specs) rules.push_back(parse_rule(s, density, o.common.threads));

  McConfig mc;
  mc.threads = o.common.threads;
  const std::size_t nl = o.lambda.size();
  std::vector<MultiRisk> grid;
  for (std::size_t j = 0; j < nl; ++j) {
    grid.push_back(mc_risk_multi(rules, density, o.lambda[j], o.reps, o.seed, j, mc));
  }

  // Checks: minimax for every rule, dominance of the first rule over the others.
  std::vector<blyth::Check> checks;
  if (o.check == "minimax") {
    for (std::size_t r = 0; r < rules.size(); ++r) {
      double worst = -std::numeric_limits<double>::infinity();
      double at = 0.0;
      for (std::size_t j = 0; j < nl; ++j) {
        const RiskPoint& pt = grid[j].risks[r];
        const double margin = (pt.risk - dims.p) / pt.std_err;
        if (margin > worst) {
          worst = margin;
          at = pt.lambda;
        }
      }
      checks.push_back({"minimax " + rules[r].id(), worst <= 3.0, worst, 3.0, "lambda=" + io::format_double(at)});
    }
  } else if (o.check == "dominance") {
    for (std::size_t r = 1; r < rules.size(); ++r) {
      double worst = -std::numeric_limits<double>::infinity();
      double at = 0.0;
      for (std::size_t j = 0; j < nl; ++j) {
        const RiskPoint& d = grid[j].paired[r];  // loss_r - loss_0
        const double z = -d.risk / d.std_err;
        if (z > worst) {
          worst = z;
          at = d.lambda;
        }
      }
      checks.push_back({rules[0].id() + " not worse than " + rules[r].id(), worst <= 3.0, worst, 3.0,
                        "lambda=" + io::format_double(at)});
    }
  }

  const Meta meta = collect_meta(sub, o.seed);
  std::string text;
  if (is_json(o.common, "csv")) {
    text = json_text([&](io::JsonWriter& j) {
      write_json_meta(j, meta);
      j.field("density", density.id());
      j.key("curves").begin_array();
      for (std::size_t r = 0; r < rules.size(); ++r) {
        j.begin_object();
        j.field("estimator", rules[r].id());
        j.key("points").begin_array();
        for (std::size_t l = 0; l < nl; ++l) {
          const RiskPoint& pt = grid[l].risks[r];
          j.begin_object();
          j.field("lambda", pt.lambda).field("risk", pt.risk).field("std_err", pt.std_err);
          j.field("n_reps", pt.n_reps).field("rejected", pt.rejected);
          if (paired) {
            j.field("paired_diff", grid[l].paired[r].risk).field("paired_std_err", grid[l].paired[r].std_err);
          }
          j.end_object();
        }
        j.end_array();
        j.end_object();
      }
      j.end_array();
      if (!checks.empty()) {
        j.key("checks");
        blyth::write_json(j, checks);
      }
    });
  } else {
    std::ostringstream os;
    write_csv_meta(os, meta);
    os << "lambda,risk,std_err,n_reps,estimator" << (paired ? ",paired_diff,paired_std_err" : "") << '\n';
    for (std::size_t r = 0; r < rules.size(); ++r) {
      for (std::size_t l = 0; l < nl; ++l) {
        const RiskPoint& pt = grid[l].risks[r];
        os << io::format_double(pt.lambda) << ',' << io::format_double(pt.risk) << ','
           << io::format_double(pt.std_err) << ',' << pt.n_reps << ',' << io::csv_field(pt.estimator_id);
        if (paired) {
          os << ',' << io::format_double(grid[l].paired[r].risk) << ','
             << io::format_double(grid[l].paired[r].std_err);
        }
        os << '\n';
      }
    }
    text = os.str();
  }
  emit(o.common, text, out);

  bool ok = true;
  for (const auto& c : checks) {
    if (!c.passed) {
      ok = false;
      err << "check failed: " << c.name << " (" << io::format_double(c.value) << " SE at " << c.detail << ")\n";
    }
  }
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  std::string scope;
  std::string density = "gaussian";
  std::string prior = "power:0";
  int p = 5;
  int n = 10;
  std::vector<double> w = {0.0, 0.5, 2.0, 10.0, 100.0};
  std::vector<int> i = {1, 10, 100, 1000};
  Common common;
};

struct Section {
  std::string scope;
  std::vector<blyth::Check> checks;
};

int cmd_verify(const VerifyOpts& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const bool all = o.scope == "all";
  const ProblemDim dims(o.p, o.n);
  std::vector<Section> sections;
  std::vector<std::function<void(io::JsonWriter&)>> details;

  if (all || o.scope == "density") {
    const RadialDensity d = parse_density(o.density, dims);
    Section s{"density", {}};
    bool positive = true;
    for (double t : {0.0, 1e-3, 0.1, 1.0, 10.0, 100.0, 1e4, 1e6}) {
      // log f avoids underflow of the Gaussian far out.
      if (!std::isfinite(d.log_value(t))) positive = false;
    }
    s.checks.push_back({"F1 positive and finite", positive, 0.0, 0.0, "t in [0, 1e6]"});
    const QuadResult norm = d.normalization();
    s.checks.push_back({"normalization", std::abs(norm.value - 1.0) <= 1e-8, norm.value, 1.0, "tolerance 1e-8"});
    const QuadResult m2 = d.second_moment();
    s.checks.push_back({"unit coordinate variance", std::abs(m2.value - dims.total()) <= 1e-6, m2.value,
                        static_cast<double>(dims.total()), "tolerance 1e-6"});
    const TailReport tr = d.check_tail_assumption();
    s.checks.push_back({"F3 tail (F3.1 or F3.2)", !tr.indeterminate && (tr.satisfies_f31 || tr.satisfies_f32),
                        tr.limsup_estimate, -0.5 * dims.total() - 2.0, "limsup t f'/f estimate"});
    details.push_back([d, tr](io::JsonWriter& j) {
      j.key("density").begin_object();
      j.field("id", d.id()).field("variance_override", d.variance_override());
      j.field("limsup_estimate", tr.limsup_estimate).field("F3_1", tr.satisfies_f31).field("F3_2", tr.satisfies_f32);
      j.field("indeterminate", tr.indeterminate).field("grid", tr.grid).field("log_slopes", tr.log_slopes);
      j.end_object();
    });
    sections.push_back(std::move(s));
  }

  std::optional<PriorSpec> prior;
  if (all || o.scope == "prior" || o.scope == "blyth") prior = parse_prior(o.prior, o.p);

  if (all || o.scope == "prior") {
    const blyth::AssumptionReport rep = blyth::assumption_report(*prior);
    Section s{"prior", {}};
    s.checks.push_back({"A1 differentiable", rep.a1, rep.a1_max_fd_gap, 0.0, "max |kappa - finite difference|"});
    s.checks.push_back({"A2 origin behaviour", rep.a2, rep.alpha_hat, -0.5, "alpha_hat > -1/2"});
    s.checks.push_back({"A3 tail behaviour", rep.a3 != blyth::TailClass::Fails, rep.kappa_limit, 0.0,
                        blyth::to_string(rep.a3)});
    const PriorSpec pr = *prior;
    details.push_back([pr, rep](io::JsonWriter& j) {
      j.key("prior").begin_object();
      j.field("id", pr.id()).field("proper", pr.is_proper());
      if (pr.kind() == PriorSpec::Kind::Strawderman) {
        j.field("assumption_region", blyth::strawderman_assumptions_hold(pr.alpha(), pr.beta(), pr.b()));
      }
      j.key("assumptions");
      blyth::write_json(j, rep);
      j.end_object();
    });
    sections.push_back(std::move(s));
  }

  if (all || o.scope == "blyth") {
    Section s{"blyth", blyth::lemma_suite()};
    const auto chain = blyth::prior_chain_checks(*prior, o.i);
    s.checks.insert(s.checks.end(), chain.begin(), chain.end());
    const RadialDensity d = parse_density(o.density, dims);
    const blyth::ConvergenceReport conv =
        blyth::psi_convergence_diagnostic(*prior, d, o.w, o.i, QuadConfig{}, o.common.threads);
    s.checks.push_back({"psi_i converges to psi (nonincreasing deviation)", conv.passed(), 0.0, 0.0, conv.prior_id});
    details.push_back([conv](io::JsonWriter& j) {
      j.key("convergence");
      blyth::write_json(j, conv);
    });
    sections.push_back(std::move(s));
  }

  bool ok = true;
  for (const auto& s : sections) ok = ok && blyth::all_passed(s.checks);

  const Meta meta = collect_meta(sub, std::nullopt);
  std::string text;
  if (is_json(o.common, "json")) {
    text = json_text([&](io::JsonWriter& j) {
      write_json_meta(j, meta);
      j.field("scope", o.scope).field("passed", ok);
      j.key("checks").begin_object();
      for (const auto& s : sections) {
        j.key(s.scope);
        blyth::write_json(j, s.checks);
      }
      j.end_object();
      for (const auto& fn : details) fn(j);
    });
  } else {
    std::ostringstream os;
    write_csv_meta(os, meta);
    os << "scope,check,passed,value,bound,detail\n";
    for (const auto& s : sections) {
      for (const auto& c : s.checks) {
        os << s.scope << ',' << io::csv_field(c.name) << ',' << (c.passed ? "true" : "false") << ','
           << io::format_double(c.value) << ',' << io::format_double(c.bound) << ',' << io::csv_field(c.detail)
           << '\n';
      }
    }
    text = os.str();
  }
  emit(o.common, text, out);
  for (const auto& s : sections) {
    for (const auto& c : s.checks) {
      if (!c.passed) err << "check failed: " << s.scope << ": " << c.name << " (value " << io::format_double(c.value) << ")\n";
    }
  }
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// regress

struct RegressOpts {
  std::string data;
  std::string response;
  std::string rule;
  std::string density = "gaussian";
  Common common;
};

int cmd_regress(const RegressOpts& o, const CLI::App& sub, std::ostream& out) {
  std::ifstream f(o.data);
  if (!f) throw UsageError("cannot open '" + o.data + "'");
  const RegressionData data = read_regression_csv(f, o.response);
  const CanonicalForm c = canonicalize(data);
  const ProblemDim dims = c.dims();
  const RadialDensity density = parse_density(o.density, dims);
  const ShrinkageRule rule = parse_rule(o.rule, density, o.common.threads);
  const double factor = shrink_factor(c, rule);
  const Eigen::VectorXd shrunk = factor * c.beta_hat;
  const Meta meta = collect_meta(sub, std::nullopt);
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };

  std::string text;
  if (is_json(o.common, "csv")) {
    text = json_text([&](io::JsonWriter& j) {
      write_json_meta(j, meta);
      j.field("estimator", rule.id()).field("m", c.m).field("p", c.p).field("n", c.n);
      j.key("predictors").begin_array();
      for (const auto& name : data.predictor_names) j.value(name);
      j.end_array();
      j.field("beta_hat", vec(c.beta_hat)).field("shrunk", vec(shrunk)).field("t_values", vec(c.t_values));
      j.field("x", vec(c.x)).field("s", c.s).field("ybar", c.ybar);
      j.field("r_squared", c.r_squared).field("w", c.w).field("factor", factor);
    });
  } else {
    std::ostringstream os;
    write_csv_meta(os, meta);
    os << "predictor,beta_hat,shrunk,t_value,factor,r_squared,w\n";
    for (int k = 0; k < c.p; ++k) {
      os << io::csv_field(data.predictor_names[k]) << ',' << io::format_double(c.beta_hat[k]) << ','
         << io::format_double(shrunk[k]) << ',' << io::format_double(c.t_values[k]) << ','
         << io::format_double(factor) << ',' << io::format_double(c.r_squared) << ',' << io::format_double(c.w)
         << '\n';
    }
    text = os.str();
  }
  emit(o.common, text, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equivariant shrinkage estimators: evaluation, risk simulation and diagnostics", "equishrink"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));
  app.option_defaults()->always_capture_default();

  EstimateOpts eo;
  auto* est = app.add_subcommand("estimate", "Apply a shrinkage rule to one observation");
  est->add_option("--rule", eo.rule, "natural | js | psi-alpha:A | simple-bayes:A,B | bayes:PRIOR")->required();
  est->add_option("--p", eo.p, "Length of x (checked against --x)");
  est->add_option("--n", eo.n, "Residual dimension")->required();
  est->add_option("--x", eo.x, "Comma-separated x")->delimiter(',');
  est->add_option("--x-file", eo.x_file, "File with x (comma or whitespace separated)");
  est->add_option("--s", eo.s, "Residual sum of squares ||u||^2")->required();
  est->add_option("--density", eo.density, "gaussian | gt:A[,B] (used by bayes rules)");
  add_common(est, eo.common, "csv");

  RiskOpts ro;
  auto* risk = app.add_subcommand("risk-curve", "Monte Carlo risk over a lambda grid");
  risk->add_option("--rule", ro.rule, "Rule specification");
  risk->add_option("--compare", ro.compare, "Comma-separated rules evaluated on common draws");
  risk->add_option("--density", ro.density, "gaussian | gt:A[,B]");
  risk->add_option("--p", ro.p, "Location dimension")->required();
  risk->add_option("--n", ro.n, "Residual dimension")->required();
  risk->add_option("--lambda", ro.lambda, "Comma-separated lambda grid")->delimiter(',')->required();
  risk->add_option("--reps", ro.reps, "Replications per grid point")->check(CLI::PositiveNumber);
  risk->add_option("--seed", ro.seed, "Root seed")->required();
  risk->add_option("--check", ro.check, "none | minimax | dominance")
      ->check(CLI::IsMember({"none", "minimax", "dominance"}));
  add_common(risk, ro.common, "csv");

  VerifyOpts vo;
  auto* ver = app.add_subcommand("verify", "Assumption checks and tapering diagnostics");
  ver->add_option("--scope", vo.scope, "density | prior | blyth | all")
      ->required()
      ->check(CLI::IsMember({"density", "prior", "blyth", "all"}));
  ver->add_option("--density", vo.density, "gaussian | gt:A[,B]");
  ver->add_option("--prior", vo.prior, "power:ALPHA | strawderman:ALPHA,BETA,B");
  ver->add_option("--p", vo.p, "Location dimension");
  ver->add_option("--n", vo.n, "Residual dimension");
  ver->add_option("--w", vo.w, "w grid for the convergence table")->delimiter(',');
  ver->add_option("--i", vo.i, "Taper indices for the convergence table")->delimiter(',');
  add_common(ver, vo.common, "json");

  RegressOpts go;
  auto* reg = app.add_subcommand("regress", "Shrink least-squares regression coefficients");
  reg->add_option("--data", go.data, "CSV file with a header row")->required();
  reg->add_option("--response", go.response, "Name of the response column")->required();
  reg->add_option("--rule", go.rule, "Rule specification")->required();
  reg->add_option("--density", go.density, "Error density for bayes rules");
  add_common(reg, go.common, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (est->parsed()) return cmd_estimate(eo, *est, out);
    if (risk->parsed()) return cmd_risk_curve(ro, *risk, out, err);
    if (ver->parsed()) return cmd_verify(vo, *ver, out, err);
    if (reg->parsed()) return cmd_regress(go, *reg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kUsage;
}

}  // namespace equishrink::cli

#pragma once

// Command-line front end. Parsing (CLI11) produces a RunConfig; run()
// dispatches it and writes JSON or CSV. Exit codes: 0 success, 2 usage or
// parameter error, 3 data error, 4 numerical non-convergence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oxg/baseline.hpp"
#include "oxg/datasets.hpp"
#include "oxg/errors.hpp"
#include "oxg/family.hpp"
#include "oxg/gof.hpp"
#include "oxg/mle.hpp"
#include "oxg/series.hpp"

namespace oxg::cli {

using json = nlohmann::ordered_json;

enum class Command {
  fit, eval, sample, quantile, moments, entropy, reliability, order_stat, residual, gof,
  plot_data, datasets
};

enum class Format { json, csv };

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_convergence = 4;

class usage_error : public error {
 public:
  using error::error;
};

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names = {
      {"fit", Command::fit},           {"eval", Command::eval},
      {"sample", Command::sample},     {"quantile", Command::quantile},
      {"moments", Command::moments},   {"entropy", Command::entropy},
      {"reliability", Command::reliability}, {"order-stat", Command::order_stat},
      {"residual", Command::residual}, {"gof", Command::gof},
      {"plot-data", Command::plot_data}, {"datasets", Command::datasets}};
  return names;
}

struct RunConfig {
  Command command = Command::datasets;
  BaselineKind baseline_kind = BaselineKind::exponential;
  std::optional<OxgParams> params;
  std::optional<std::string> input_path;  // file path or built-in dataset name
  std::optional<std::string> output_path;
  std::uint64_t seed = 20240101;
  TruncationPolicy policy;
  std::optional<Format> format;
  Method method = Method::quadrature;

  std::optional<double> u, t, beta, x, lambda1, lambda2, mgf_at;
  std::optional<unsigned> r, n;
  // Baseline parameters as given, kept for commands that need them without
  // a family shape (reliability).
  std::optional<BaselineModel> baseline;
};

// Output helpers.

/// Writes j as indented JSON with every floating-point number in %.17g.
inline void write_json(std::ostream& os, const json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 2);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json params_json(const OxgParams& p) {
  json j;
  j["lambda"] = p.lambda();
  const auto& b = p.baseline();
  switch (b.kind()) {
    case BaselineKind::uniform:
    case BaselineKind::exponential:
      j["theta"] = b.param(0);
      break;
    case BaselineKind::burr_xii:
      j["alpha"] = b.param(0);
      j["theta"] = b.param(1);
      break;
    case BaselineKind::normal:
      j["mu"] = b.param(0);
      j["sigma"] = b.param(1);
      break;
  }
  return j;
}

inline json series_json(const SeriesResult& r) {
  return json{{"value", r.value}, {"converged", r.converged}, {"terms", r.terms}};
}

inline const char* method_name(Method m) { return m == Method::series ? "series" : "quadrature"; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt17(row[i]);
    os << "\n";
  }
}

inline json table_json(const Table& t) {
  json j = json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    json col = json::array();
    for (const auto& row : t.rows) col.push_back(row[c]);
    j[t.columns[c]] = std::move(col);
  }
  return j;
}

/// Flattens scalar leaves to "key,value" rows, nested keys joined by '.'.
inline void write_flat_csv(std::ostream& os, const json& j, const std::string& prefix = "") {
  if (prefix.empty()) os << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      std::ostringstream nested;
      write_flat_csv(nested, *it, key);
      os << nested.str();
    } else if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& e = (*it)[i];
        os << key << "." << i << ",";
        if (e.is_number_float()) {
          os << fmt17(e.get<double>());
        } else {
          os << e.dump();
        }
        os << "\n";
      }
    } else if (it->is_number_float()) {
      os << key << "," << fmt17(it->get<double>()) << "\n";
    } else if (it->is_string()) {
      os << key << "," << it->get<std::string>() << "\n";
    } else {
      os << key << "," << it->dump() << "\n";
    }
  }
}

// Command implementations.

namespace detail {

struct Output {
  Output() = default;
  Output(json d, std::optional<Table> t = std::nullopt, std::optional<Table> h = std::nullopt,
         bool ok = true)
      : doc(std::move(d)), table(std::move(t)), histogram(std::move(h)), converged(ok) {}

  json doc = json::object();
  std::optional<Table> table;       // primary CSV payload
  std::optional<Table> histogram;   // plot-data overlay
  bool converged = true;
};

inline const OxgParams& need_params(const RunConfig& c) {
  if (!c.params) throw usage_error("this command needs --lambda and the baseline parameters");
  return *c.params;
}

template <class T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) throw usage_error(std::string("missing required option ") + flag);
  return *v;
}

inline Dataset need_data(const RunConfig& c) {
  if (!c.input_path) throw usage_error("missing required option --data");
  return ingest(*c.input_path);
}

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json fit_json(const Dataset& d, const FitResult& f) {
  return json{{"command", "fit"},
              {"dataset", d.name},
              {"n", d.size()},
              {"baseline", std::string(to_string(f.params.baseline().kind()))},
              {"params", params_json(f.params)},
              {"log_likelihood", f.log_likelihood},
              {"aic", f.aic},
              {"converged", f.converged},
              {"iterations", f.iterations},
              {"score_norm", f.score_norm},
              {"restarts_used", f.restarts_used}};
}

inline Output cmd_fit(const RunConfig& c) {
  const auto d = need_data(c);
  const auto f = fit(d, c.baseline_kind);
  return {fit_json(d, f), std::nullopt, std::nullopt, f.converged};
}

inline json pointwise(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  const bool interior = x > b.lower() && x < b.upper();
  const double F = cdf(p, x);
  json j{{"x", x},
         {"pdf", pdf(p, x)},
         {"log_pdf", nullable(log_pdf(p, x))},
         {"cdf", F},
         {"survival", survival(p, x)}};
  j["hazard"] = interior ? nullable(hazard(p, x)) : json(nullptr);
  j["reversed_hazard"] = interior && F > 0.0 ? nullable(reversed_hazard(p, x)) : json(nullptr);
  return j;
}

inline Output cmd_eval(const RunConfig& c) {
  const auto& p = need_params(c);
  json j{{"command", "eval"}, {"baseline", std::string(to_string(p.baseline().kind()))},
         {"params", params_json(p)}};
  const json values = pointwise(p, need(c.x, "--x"));
  for (auto it = values.begin(); it != values.end(); ++it) j[it.key()] = it.value();
  return {j};
}

inline Output cmd_sample(const RunConfig& c) {
  const auto& p = need_params(c);
  const unsigned n = need(c.n, "--n");
  const auto xs = sample(p, n, c.seed);
  Table t{{"x"}, {}};
  for (double x : xs) t.rows.push_back({x});
  json j{{"command", "sample"}, {"params", params_json(p)}, {"seed", c.seed}, {"n", n},
         {"x", xs}};
  return {j, t};
}

inline Output cmd_quantile(const RunConfig& c) {
  const auto& p = need_params(c);
  const double u = need(c.u, "--u");
  const double x = quantile(p, u);
  return {json{{"command", "quantile"}, {"params", params_json(p)}, {"u", u}, {"x", x},
               {"check_cdf", cdf(p, x)}}};
}

inline Output cmd_moments(const RunConfig& c) {
  const auto& p = need_params(c);
  const auto m = moment_set(p, c.method, c.policy);
  Output o;
  o.converged = m.converged;
  json j{{"command", "moments"}, {"params", params_json(p)}, {"method", method_name(c.method)},
         {"raw_moments", json(m.raw_moments)}, {"mean", m.mean}, {"variance", m.variance},
         {"skewness", m.skewness}, {"kurtosis", m.kurtosis}, {"converged", m.converged}};
  const auto md = mean_deviations(p, c.method, c.policy);
  j["mean_deviation_mean"] = md.delta1;
  j["mean_deviation_median"] = md.delta2;
  o.converged = o.converged && md.converged;
  if (c.t) {
    const unsigned r = c.r.value_or(1);
    const auto im = incomplete_moment(p, r, *c.t, c.method, c.policy);
    j["incomplete_moment"] = json{{"r", r}, {"t", *c.t}, {"value", im.value}, {"converged", im.converged}};
    o.converged = o.converged && im.converged;
  }
  if (c.mgf_at) {
    const auto g = mgf(p, *c.mgf_at, c.method, c.policy);
    j["mgf"] = json{{"at", *c.mgf_at}, {"value", g.value}, {"converged", g.converged}};
    o.converged = o.converged && g.converged;
  }
  if (c.u && p.baseline().nonnegative_support()) {
    const auto l = lorenz(p, *c.u, c.method, c.policy);
    j["lorenz"] = json{{"p", *c.u}, {"value", l.value}};
    j["bonferroni"] = json{{"p", *c.u}, {"value", l.value / *c.u}};
    o.converged = o.converged && l.converged;
  }
  o.doc = j;
  return o;
}

inline Output cmd_entropy(const RunConfig& c) {
  const auto& p = need_params(c);
  const double beta = need(c.beta, "--beta");
  const auto h = renyi_entropy(p, beta, c.method, c.policy);
  return {json{{"command", "entropy"}, {"params", params_json(p)}, {"beta", beta},
               {"method", method_name(c.method)}, {"renyi", nullable(h.value)},
               {"converged", h.converged}, {"terms", h.terms}},
          std::nullopt, std::nullopt, h.converged};
}

inline Output cmd_reliability(const RunConfig& c) {
  if (!c.baseline) throw usage_error("reliability needs the baseline parameters");
  ReliabilityInputs in{need(c.lambda1, "--lambda1"), need(c.lambda2, "--lambda2"), *c.baseline};
  const auto r = stress_strength_R(in, c.method, c.policy);
  return {json{{"command", "reliability"}, {"baseline", c.baseline->describe()},
               {"lambda1", in.lambda1}, {"lambda2", in.lambda2}, {"method", method_name(c.method)},
               {"R", r.value}, {"converged", r.converged}, {"terms", r.terms}},
          std::nullopt, std::nullopt, r.converged};
}

inline Output cmd_order_stat(const RunConfig& c) {
  const auto& p = need_params(c);
  const OrderStatSpec s{need(c.r, "--r"), need(c.n, "--n")};
  const double x = need(c.x, "--x");
  Output o;
  json j{{"command", "order-stat"}, {"params", params_json(p)}, {"r", s.r}, {"n", s.n}, {"x", x},
         {"density", order_stat_pdf(p, s, x)}};
  if (c.method == Method::series) {
    const auto e = order_stat_pdf_series(p, s, x, c.policy);
    j["series"] = series_json(e);
    o.converged = e.converged;
  }
  o.doc = j;
  return o;
}

inline Output cmd_residual(const RunConfig& c) {
  const auto& p = need_params(c);
  const double t = need(c.t, "--t");
  const unsigned r = c.r.value_or(1);
  const auto a = residual_moment(p, r, t, c.method, c.policy);
  const auto b = reversed_residual_moment(p, r, t, c.method, c.policy);
  return {json{{"command", "residual"}, {"params", params_json(p)}, {"r", r}, {"t", t},
               {"method", method_name(c.method)}, {"residual", series_json(a)},
               {"reversed_residual", series_json(b)}},
          std::nullopt, std::nullopt, a.converged && b.converged};
}

inline Output cmd_gof(const RunConfig& c) {
  const auto d = need_data(c);
  Output o;
  std::optional<FitResult> f;
  OxgParams p = c.params ? *c.params : (f = fit(d, c.baseline_kind), f->params);
  const double ll = log_likelihood(p, d);
  json j{{"command", "gof"}, {"dataset", d.name}, {"n", d.size()},
         {"baseline", std::string(to_string(p.baseline().kind()))}, {"params", params_json(p)},
         {"fitted", f.has_value()}, {"log_likelihood", ll}, {"aic", aic(ll, p.size())},
         {"ks", ks_statistic(d.observations, [&](double x) { return cdf(p, x); })}};
  if (f) {
    j["converged"] = f->converged;
    o.converged = f->converged;
  }
  o.doc = j;
  return o;
}

inline Table histogram(const std::vector<double>& xs) {
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  const auto bins = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(xs.size())))) + 1;
  const double w = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double x : xs) {
    auto k = w > 0.0 ? static_cast<std::size_t>((x - lo) / w) : 0;
    counts[std::min(k, bins - 1)] += 1.0;
  }
  Table t{{"bin_lower", "bin_upper", "count", "density"}, {}};
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = lo + w * static_cast<double>(k);
    const double b = k + 1 == bins ? hi : lo + w * static_cast<double>(k + 1);
    t.rows.push_back({a, b, counts[k], w > 0.0 ? counts[k] / (n * w) : 0.0});
  }
  return t;
}

inline Table curve_grid(const OxgParams& p, std::size_t points = 512) {
  const double a = quantile(p, 1e-4), b = quantile(p, 1.0 - 1e-4);
  Table t{{"x", "pdf", "cdf", "survival", "hazard", "reversed_hazard"}, {}};
  for (std::size_t i = 0; i < points; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    t.rows.push_back({x, pdf(p, x), cdf(p, x), survival(p, x), hazard(p, x), reversed_hazard(p, x)});
  }
  return t;
}

inline Output cmd_plot_data(const RunConfig& c) {
  Output o;
  std::optional<Dataset> d;
  if (c.input_path) d = ingest(*c.input_path);
  std::optional<FitResult> f;
  if (!c.params) {
    if (!d) throw usage_error("plot-data needs model parameters or --data to fit");
    f = fit(*d, c.baseline_kind);
    o.converged = f->converged;
  }
  const OxgParams p = c.params ? *c.params : f->params;
  o.table = curve_grid(p);
  o.doc = json{{"command", "plot-data"}, {"params", params_json(p)},
               {"baseline", std::string(to_string(p.baseline().kind()))},
               {"grid", table_json(*o.table)}};
  if (d) {
    o.histogram = histogram(d->observations);
    o.doc["dataset"] = d->name;
    o.doc["histogram"] = table_json(*o.histogram);
  }
  return o;
}

inline Output cmd_datasets(const RunConfig& c) {
  json list = json::array();
  auto describe = [](const Dataset& d) {
    const auto [lo, hi] = std::minmax_element(d.observations.begin(), d.observations.end());
    double s = 0.0;
    for (double x : d.observations) s += x;
    return json{{"name", d.name}, {"n", d.size()}, {"min", *lo}, {"max", *hi},
                {"mean", s / static_cast<double>(d.size())}};
  };
  if (c.input_path) {
    const auto d = ingest(*c.input_path);
    auto j = describe(d);
    j["observations"] = d.observations;
    Table t{{"x"}, {}};
    for (double x : d.observations) t.rows.push_back({x});
    return {json{{"command", "datasets"}, {"dataset", j}}, t};
  }
  for (const auto& name : builtin_dataset_names()) list.push_back(describe(builtin_dataset(name)));
  return {json{{"command", "datasets"}, {"builtin", list}}};
}

inline Output dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::fit: return cmd_fit(c);
    case Command::eval: return cmd_eval(c);
    case Command::sample: return cmd_sample(c);
    case Command::quantile: return cmd_quantile(c);
    case Command::moments: return cmd_moments(c);
    case Command::entropy: return cmd_entropy(c);
    case Command::reliability: return cmd_reliability(c);
    case Command::order_stat: return cmd_order_stat(c);
    case Command::residual: return cmd_residual(c);
    case Command::gof: return cmd_gof(c);
    case Command::plot_data: return cmd_plot_data(c);
    case Command::datasets: return cmd_datasets(c);
  }
  throw usage_error("unknown command");
}

inline std::string histogram_path(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + "-histogram";
  return out.substr(0, dot) + "-histogram" + out.substr(dot);
}

inline void emit(const RunConfig& c, const Output& o, std::ostream& os) {
  const Format fmt = c.format.value_or(o.table && (c.command == Command::sample || c.command == Command::plot_data)
                                           ? Format::csv
                                           : Format::json);
  if (fmt == Format::json) {
    write_json(os, o.doc);
    os << "\n";
    return;
  }
  if (o.table) {
    write_csv(os, *o.table);
  } else {
    write_flat_csv(os, o.doc);
  }
}

inline int write_error(std::ostream& err, const char* kind, const std::string& message,
                       std::optional<std::size_t> index = std::nullopt) {
  json j{{"error", {{"kind", kind}, {"message", message}}}};
  if (index) j["error"]["index"] = *index;
  write_json(err, j);
  err << "\n";
  if (std::string(kind) == "data") return exit_data;
  if (std::string(kind) == "convergence") return exit_convergence;
  return exit_usage;
}

}  // namespace detail

/// Executes a parsed configuration. Results go to out (or the --out file),
/// error objects to err.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.policy.validate();
    const auto o = detail::dispatch(c);
    if (c.output_path) {
      std::ofstream f(*c.output_path, std::ios::binary);
      if (!f) throw usage_error("cannot write to '" + *c.output_path + "'");
      detail::emit(c, o, f);
      if (o.histogram) {
        std::ofstream h(detail::histogram_path(*c.output_path), std::ios::binary);
        if (!h) throw usage_error("cannot write histogram next to '" + *c.output_path + "'");
        write_csv(h, *o.histogram);
      }
    } else {
      detail::emit(c, o, out);
      if (o.histogram && c.format.value_or(Format::csv) == Format::csv) {
        out << "\n";
        write_csv(out, *o.histogram);
      }
    }
    if (!o.converged) {
      return detail::write_error(err, "convergence", "numerical procedure did not converge");
    }
    return exit_ok;
  } catch (const data_error& e) {
    std::optional<std::size_t> idx;
    if (e.index() != data_error::npos) idx = e.index();
    return detail::write_error(err, "data", e.what(), idx);
  } catch (const convergence_error& e) {
    return detail::write_error(err, "convergence", e.what());
  } catch (const unsupported_error& e) {
    return detail::write_error(err, "unsupported", e.what());
  } catch (const parameter_error& e) {
    return detail::write_error(err, "parameter", e.what());
  } catch (const error& e) {
    return detail::write_error(err, "usage", e.what());
  }
}

/// Parses argv into a RunConfig and runs it.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Odds xgamma-G distributions: evaluation, summaries and fitting", "oxg"};
  std::string command, baseline = "exponential", method = "quadrature", format;
  double lambda = 0, theta = 0, alpha = 0, mu = 0, sigma = 0, u = 0, t = 0, beta = 0, x = 0,
         l1 = 0, l2 = 0, tail_tol = 1e-10, mgf_at = 0;
  unsigned r = 1, n = 1;
  std::size_t max_index = 40;
  std::uint64_t seed = 20240101;
  std::string data, out_path;

  std::vector<std::string> names;
  for (const auto& [k, v] : command_names()) names.push_back(k);
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--data", data, "Built-in dataset name or path to a numeric file");
  app.add_option("--baseline", baseline, "uniform, exponential, burr-xii or normal")
      ->check(CLI::IsMember({"uniform", "exponential", "burr-xii", "normal"}));
  auto* o_lambda = app.add_option("--lambda", lambda, "Family shape lambda");
  auto* o_theta = app.add_option("--theta", theta, "Baseline theta");
  auto* o_alpha = app.add_option("--alpha", alpha, "Burr XII alpha");
  auto* o_mu = app.add_option("--mu", mu, "Normal mean");
  auto* o_sigma = app.add_option("--sigma", sigma, "Normal standard deviation");
  auto* o_u = app.add_option("--u", u, "Probability (quantile; Lorenz point for moments)");
  auto* o_r = app.add_option("--r", r, "Moment order or order-statistic rank");
  auto* o_n = app.add_option("--n", n, "Sample size");
  auto* o_t = app.add_option("--t", t, "Age for residual life; bound for incomplete moments");
  auto* o_beta = app.add_option("--beta", beta, "Renyi entropy order");
  auto* o_x = app.add_option("--x", x, "Evaluation point");
  auto* o_l1 = app.add_option("--lambda1", l1, "Strength shape");
  auto* o_l2 = app.add_option("--lambda2", l2, "Stress shape");
  auto* o_mgf = app.add_option("--mgf-at", mgf_at, "Point at which moments reports the mgf");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--method", method, "series or quadrature")
      ->check(CLI::IsMember({"series", "quadrature"}));
  app.add_option("--max-index", max_index, "Series cap per index");
  app.add_option("--tail-tol", tail_tol, "Series tail tolerance");
  app.add_option("--out", out_path, "Output file");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    return detail::write_error(err, "usage", e.what());
  }

  RunConfig c;
  try {
    for (const auto& [k, v] : command_names()) {
      if (k == command) c.command = v;
    }
    c.baseline_kind = parse_baseline_kind(baseline);
    c.method = method == "series" ? Method::series : Method::quadrature;
    c.policy.max_index_per_sum = max_index;
    c.policy.tail_tolerance = tail_tol;
    c.seed = seed;
    if (!data.empty()) c.input_path = data;
    if (!out_path.empty()) c.output_path = out_path;
    if (!format.empty()) c.format = format == "csv" ? Format::csv : Format::json;
    if (*o_u) c.u = u;
    if (*o_t) c.t = t;
    if (*o_beta) c.beta = beta;
    if (*o_x) c.x = x;
    if (*o_l1) c.lambda1 = l1;
    if (*o_l2) c.lambda2 = l2;
    if (*o_mgf) c.mgf_at = mgf_at;
    if (*o_r) c.r = r;
    if (*o_n) c.n = n;

    bool have_baseline = false;
    switch (c.baseline_kind) {
      case BaselineKind::uniform:
        if (*o_theta) c.baseline = BaselineModel::uniform(theta);
        break;
      case BaselineKind::exponential:
        if (*o_theta) c.baseline = BaselineModel::exponential(theta);
        break;
      case BaselineKind::burr_xii:
        if (*o_alpha && *o_theta) c.baseline = BaselineModel::burr_xii(alpha, theta);
        break;
      case BaselineKind::normal:
        if (*o_mu && *o_sigma) c.baseline = BaselineModel::normal(mu, sigma);
        break;
    }
    have_baseline = c.baseline.has_value();
    if (have_baseline && *o_lambda) c.params.emplace(lambda, *c.baseline);
    if (*o_lambda && !have_baseline) {
      throw usage_error("--lambda given without the parameters of the " + baseline + " baseline");
    }
  } catch (const parameter_error& e) {
    return detail::write_error(err, "parameter", e.what());
  } catch (const error& e) {
    return detail::write_error(err, "usage", e.what());
  }
  return run(c, out, err);
}

}  // namespace oxg::cli

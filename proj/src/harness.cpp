#include "kcut/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kcut/errors.hpp"
#include "kcut/exactmean.hpp"
#include "kcut/limitdist.hpp"
#include "kcut/report.hpp"
#include "kcut/rng.hpp"
#include "kcut/series.hpp"

namespace kcut::harness {

namespace {

constexpr const char* kVersion = "kcut 1.0.0";

double circular_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

// Solves lg x - lg lg x = v on the increasing branch (lg x > 1/ln 2).
double solve_phase(double v) {
  double y = std::max(v + std::log2(std::max(v, 2.0)), 1.5);
  for (int i = 0; i < 100; ++i) {
    const double g = y - std::log2(y) - v;
    const double dg = 1.0 - 1.0 / (y * std::log(2.0));
    const double step = g / dg;
    y -= step;
    if (std::abs(step) < 1e-14 * y) break;
  }
  return std::exp2(y);
}

template <class E>
[[noreturn]] void rethrow_with(const E& e, const std::string& context) {
  throw E(std::string(e.what()) + " " + context);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
  }
  return m;
}

std::uint64_t get_u64(const nlohmann::json& j, const char* name) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string("config: '") + name + "' must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

}  // namespace

double size_phase(double n) {
  const double lg = std::log2(n);
  const double v = lg - std::log2(lg);
  return v - std::floor(v);
}

std::vector<std::uint64_t> subsequence_select(double gamma, std::uint64_t n_min,
                                              std::uint64_t n_max, int count, double delta) {
  if (n_min < 16 || n_min >= n_max) {
    throw DomainError("subsequence_select: need 16 <= n_min < n_max");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("subsequence_select: gamma in [0,1]");
  if (count < 1) return {};
  auto phase_value = [](double n) {
    const double lg = std::log2(n);
    return lg - std::log2(lg);
  };
  std::vector<std::uint64_t> candidates;
  const auto j_lo = static_cast<long>(std::ceil(phase_value(static_cast<double>(n_min)) - gamma));
  const auto j_hi = static_cast<long>(std::floor(phase_value(static_cast<double>(n_max)) - gamma));
  for (long j = j_lo; j <= j_hi; ++j) {
    const double x = solve_phase(static_cast<double>(j) + gamma);
    std::uint64_t best = 0;
    double best_dist = delta;
    for (double c : {std::floor(x), std::ceil(x)}) {
      if (c < static_cast<double>(n_min) || c > static_cast<double>(n_max)) continue;
      const double dist = circular_distance(size_phase(c), gamma);
      if (dist <= best_dist) {
        best_dist = dist;
        best = static_cast<std::uint64_t>(c);
      }
    }
    if (best != 0) candidates.push_back(best);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (static_cast<int>(candidates.size()) <= count) return candidates;

  std::set<std::uint64_t> picked;
  const double lo = std::log(static_cast<double>(n_min));
  const double hi = std::log(static_cast<double>(n_max));
  for (int i = 0; i < count; ++i) {
    const double target = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
    const auto nearest = std::min_element(
        candidates.begin(), candidates.end(), [target](std::uint64_t a, std::uint64_t b) {
          return std::abs(std::log(static_cast<double>(a)) - target) <
                 std::abs(std::log(static_cast<double>(b)) - target);
        });
    picked.insert(*nearest);
  }
  return {picked.begin(), picked.end()};
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  static const std::set<std::string> known{"k",     "r",       "variant", "gamma",  "delta",
                                           "n",     "n_min",   "n_max",   "count",  "samples",
                                           "seed",  "threads", "tolerance", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (!j.contains("k")) throw ConfigError("config: 'k' is required");
    c.k = static_cast<int>(get_u64(j.at("k"), "k"));
    if (j.contains("r")) {
      const auto& r = j.at("r");
      if (r.is_string()) {
        if (r.get<std::string>() != "total") {
          throw ConfigError("config: 'r' must be an integer or \"total\"");
        }
        c.total = true;
        c.r = 1;
      } else {
        c.r = static_cast<int>(get_u64(r, "r"));
      }
    }
    if (j.contains("variant")) c.variant = cutsim::parse_variant(j.at("variant").get<std::string>());
    if (j.contains("gamma")) c.gamma_target = j.at("gamma").get<double>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("n")) {
      for (const auto& v : j.at("n")) c.n_list.push_back(get_u64(v, "n"));
    }
    if (j.contains("n_min")) c.n_min = get_u64(j.at("n_min"), "n_min");
    if (j.contains("n_max")) c.n_max = get_u64(j.at("n_max"), "n_max");
    if (j.contains("count")) c.count = static_cast<int>(get_u64(j.at("count"), "count"));
    if (j.contains("samples")) c.samples = get_u64(j.at("samples"), "samples");
    if (j.contains("seed")) c.seed = get_u64(j.at("seed"), "seed");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(get_u64(j.at("threads"), "threads"));
    if (j.contains("tolerance")) {
      const auto& t = j.at("tolerance");
      if (t.contains("mean_sigmas")) c.mean_sigmas = t.at("mean_sigmas").get<double>();
      if (t.contains("delta")) c.delta = t.at("delta").get<double>();
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("csv")) c.csv_path = o.at("csv").get<std::string>();
      if (o.contains("json")) c.json_path = o.at("json").get<std::string>();
      if (o.contains("samples_csv")) c.samples_csv_path = o.at("samples_csv").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.k < 1) throw ConfigError("config: k must be >= 1");
  if (!c.total && (c.r < 1 || c.r > c.k)) throw ConfigError("config: r must lie in [1,k]");
  if (!(c.gamma_target >= 0.0 && c.gamma_target < 1.0)) {
    throw ConfigError("config: gamma must lie in [0,1)");
  }
  if (!(c.delta > 0.0 && c.delta <= 0.5)) throw ConfigError("config: delta must lie in (0,0.5]");
  if (c.n_list.empty() && (c.n_min == 0 || c.n_max == 0 || c.count == 0)) {
    throw ConfigError("config: give either 'n' or all of 'n_min', 'n_max', 'count'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  std::vector<std::uint64_t> sizes = config.n_list;
  if (sizes.empty()) {
    sizes = subsequence_select(config.gamma_target, config.n_min, config.n_max, config.count,
                               config.delta);
    if (sizes.empty()) {
      report.warnings.push_back("subsequence selection found no n within delta of gamma");
    }
  } else {
    for (auto n : sizes) {
      if (n >= 16 && circular_distance(size_phase(static_cast<double>(n)), config.gamma_target) >
                         config.delta) {
        report.warnings.push_back("n=" + std::to_string(n) + " is farther than delta from gamma");
      }
    }
  }

  const auto tables = series::all_constants(config.k);
  const int r_limit = config.total ? 1 : config.r;
  const auto& table = tables[static_cast<std::size_t>(r_limit - 1)];

  for (auto n : sizes) {
    SizeResult res;
    res.n = n;
    res.seed = rng::derive_seed(config.seed, n);
    const std::string context =
        "(n=" + std::to_string(n) + ", seed=" + std::to_string(config.seed) + ")";
    try {
      if (n < 4) throw ConfigError("experiment sizes must be >= 4");
      const double nd = static_cast<double>(n);
      res.gamma_n = size_phase(nd);
      if (res.gamma_n < 1e-12 || res.gamma_n > 1.0 - 1e-12) {
        res.gamma_ambiguous = true;
        res.gamma_n = 0.0;
      }

      exactmean::MeanQuery q;
      q.n = n;
      q.k = config.k;
      q.variant = config.variant;
      if (config.total) {
        for (int r = 1; r <= config.k; ++r) {
          q.r = r;
          res.exact_mean += exactmean::expected_records(q);
        }
      } else {
        q.r = config.r;
        res.exact_mean = exactmean::expected_records(q);
      }

      res.samples = config.samples;
      if (config.samples > 0) {
        const CompleteTree tree(n);
        const auto batch = cutsim::simulate_batch(tree, config.k, config.variant,
                                                  cutsim::Method::records, config.samples,
                                                  res.seed, config.threads);
        for (const auto& s : batch) {
          if (config.total) {
            res.raw.push_back(static_cast<double>(s.total));
            res.rescaled.push_back(cutsim::rescale_total(s, tables, nd));
          } else {
            res.raw.push_back(static_cast<double>(s.per_r[static_cast<std::size_t>(config.r - 1)]));
            res.rescaled.push_back(cutsim::rescale_sample(s, config.r, table, nd));
          }
        }
        const auto mr = moments(res.raw);
        const auto ms = moments(res.rescaled);
        res.mean_raw = mr.mean;
        res.var_raw = mr.var;
        res.mean_rescaled = ms.mean;
        res.var_rescaled = ms.var;
        const double se = std::sqrt(mr.var / static_cast<double>(config.samples));
        res.mean_z = se > 0.0 ? (mr.mean - res.exact_mean) / se
                              : (mr.mean == res.exact_mean ? 0.0 : HUGE_VAL);
        res.mean_ok = std::abs(res.mean_z) <= config.mean_sigmas;

        limitdist::LimitParams lp;
        lp.r = r_limit;
        lp.k = config.k;
        lp.gamma = res.gamma_n;
        const auto law = limitdist::law_for(lp);
        res.ks = ks_statistic(res.rescaled,
                              [&](double w) { return law->limit_cdf(w, table.C3); });
        res.inversion_error = law->inversion_error();
      }
    } catch (const ConfigError& e) {
      rethrow_with(e, context);
    } catch (const DomainError& e) {
      rethrow_with(e, context);
    } catch (const NumericError& e) {
      rethrow_with(e, context);
    }
    if (!res.mean_ok) {
      report.warnings.push_back("n=" + std::to_string(n) + ": empirical mean is " +
                                report::format_real(res.mean_z) + " standard errors from exact");
    }
    report.sizes.push_back(std::move(res));
  }
  return report;
}

std::string summary_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,gamma_n,gamma_ambiguous,samples,mean_raw,var_raw,mean_rescaled,var_rescaled,ks,"
         "inversion_error,exact_mean,mean_z\n";
  for (const auto& s : report.sizes) {
    out << s.n << ',' << report::format_real(s.gamma_n) << ',' << (s.gamma_ambiguous ? 1 : 0)
        << ',' << s.samples << ',' << report::format_real(s.mean_raw) << ','
        << report::format_real(s.var_raw) << ',' << report::format_real(s.mean_rescaled) << ','
        << report::format_real(s.var_rescaled) << ',' << report::format_real(s.ks) << ','
        << report::format_real(s.inversion_error) << ',' << report::format_real(s.exact_mean)
        << ',' << report::format_real(s.mean_z) << '\n';
  }
  return out.str();
}

std::string samples_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,sample_index,raw,rescaled\n";
  for (const auto& s : report.sizes) {
    for (std::size_t i = 0; i < s.rescaled.size(); ++i) {
      out << s.n << ',' << i << ',' << report::format_real(s.raw[i]) << ','
          << report::format_real(s.rescaled[i]) << '\n';
    }
  }
  return out.str();
}

std::string report_json(const ExperimentReport& report) {
  const auto& c = report.config;
  report::JsonWriter w;
  w.begin_object();
  w.key("version").value(kVersion);
  w.key("config").begin_object();
  w.key("k").value(c.k);
  if (c.total) {
    w.key("r").value("total");
  } else {
    w.key("r").value(c.r);
  }
  w.key("variant").value(cutsim::to_string(c.variant));
  w.key("gamma").value(c.gamma_target);
  w.key("delta").value(c.delta);
  w.key("samples").value(c.samples);
  w.key("seed").value(c.seed);
  w.key("mean_sigmas").value(c.mean_sigmas);
  w.end_object();
  w.key("sizes").begin_array();
  for (const auto& s : report.sizes) {
    w.begin_object();
    w.key("n").value(s.n);
    w.key("seed").value(s.seed);
    w.key("gamma_n").value(s.gamma_n);
    w.key("gamma_ambiguous").value(s.gamma_ambiguous);
    if (s.gamma_ambiguous) {
      w.key("gamma_endpoints").begin_array().value(0.0).value(1.0).end_array();
    }
    w.key("samples").value(s.samples);
    w.key("mean_raw").value(s.mean_raw);
    w.key("var_raw").value(s.var_raw);
    w.key("mean_rescaled").value(s.mean_rescaled);
    w.key("var_rescaled").value(s.var_rescaled);
    w.key("ks").value(s.ks);
    w.key("inversion_error").value(s.inversion_error);
    w.key("exact_mean").value(s.exact_mean);
    w.key("mean_z").value(s.mean_z);
    w.key("mean_ok").value(s.mean_ok);
    w.end_object();
  }
  w.end_array();
  w.key("warnings").begin_array();
  for (const auto& msg : report.warnings) w.value(msg);
  w.end_array();
  w.end_object();
  return w.str();
}

void write_outputs(const ExperimentReport& report) {
  const auto& c = report.config;
  if (!c.csv_path.empty()) report::write_file(c.csv_path, summary_csv(report));
  if (!c.samples_csv_path.empty()) report::write_file(c.samples_csv_path, samples_csv(report));
  if (!c.json_path.empty()) report::write_file(c.json_path, report_json(report));
}

}  // namespace kcut::harness

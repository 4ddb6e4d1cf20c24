#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kcut/cutsim.hpp"
#include "kcut/errors.hpp"
#include "kcut/exactmean.hpp"
#include "kcut/harness.hpp"
#include "kcut/limitdist.hpp"
#include "kcut/report.hpp"
#include "kcut/series.hpp"
#include "kcut/tree.hpp"

namespace {

using kcut::report::format_real;

struct Grid {
  double a = 0.0;
  double b = 0.0;
  int steps = 0;
};

Grid parse_grid(const std::string& text) {
  Grid g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.a, &g.b, &g.steps, &tail) != 3 ||
      g.steps < 1) {
    throw kcut::ConfigError("--grid expects a:b:steps with steps >= 1");
  }
  return g;
}

double grid_point(const Grid& g, int i) {
  return g.steps == 1 ? g.a : g.a + (g.b - g.a) * i / (g.steps - 1);
}

std::string real15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-cut numbers of complete binary trees"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Sample record counts");
  std::uint64_t sim_n = 0, sim_samples = 1, sim_seed = 1;
  int sim_k = 1;
  unsigned threads = 0;
  std::string sim_variant = "node", sim_method = "records", sim_out;
  sim->add_option("--n", sim_n, "tree size")->required();
  sim->add_option("--k", sim_k, "cuts needed to remove a node")->required();
  sim->add_option("--variant", sim_variant, "node or edge");
  sim->add_option("--samples", sim_samples, "number of samples");
  sim->add_option("--seed", sim_seed, "seed");
  sim->add_option("--out", sim_out, "CSV output path")->required();
  sim->add_option("--threads", threads, "worker threads (default KCUT_THREADS)");
  sim->add_option("--method", sim_method, "records or process");

  auto* em = app.add_subcommand("exact-mean", "Exact expected number of r-records");
  kcut::exactmean::MeanQuery query;
  bool edge = false, compare = false;
  em->add_option("--n", query.n)->required();
  em->add_option("--k", query.k)->required();
  em->add_option("--r", query.r)->required();
  em->add_option("--y", query.y, "condition on the root's removal time");
  em->add_flag("--edge", edge, "edge variant");
  em->add_flag("--compare-asymptotic", compare, "also print the asymptotic value and gap");

  auto* cst = app.add_subcommand("constants", "Constant table as JSON");
  int c_k = 1, c_r = 1;
  cst->add_option("--k", c_k)->required();
  cst->add_option("--r", c_r)->required();

  auto* lim = app.add_subcommand("limit", "Evaluate the limit law on a grid");
  kcut::limitdist::LimitParams lp;
  std::string grid_text, lim_out;
  lim->add_option("--r", lp.r)->required();
  lim->add_option("--k", lp.k)->required();
  lim->add_option("--gamma", lp.gamma)->required();
  auto* f_density = lim->add_flag("--density", "Levy density (default)");
  auto* f_tail = lim->add_flag("--tail", "Levy tail mass");
  auto* f_cf = lim->add_flag("--cf", "characteristic function of W");
  auto* f_cdf = lim->add_flag("--cdf", "CDF of 1 - C3 W");
  f_density->excludes(f_tail)->excludes(f_cf)->excludes(f_cdf);
  f_tail->excludes(f_cf)->excludes(f_cdf);
  f_cf->excludes(f_cdf);
  lim->add_option("--grid", grid_text, "a:b:steps")->required();
  lim->add_option("--out", lim_out, "CSV output path")->required();

  auto* exp = app.add_subcommand("experiment", "Run a configured experiment");
  std::string config_path;
  exp->add_option("--config", config_path, "JSON config")->required();
  exp->add_option("--threads", threads, "worker threads (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      const auto variant = kcut::cutsim::parse_variant(sim_variant);
      kcut::cutsim::Method method;
      if (sim_method == "records") {
        method = kcut::cutsim::Method::records;
      } else if (sim_method == "process") {
        method = kcut::cutsim::Method::process;
      } else {
        throw kcut::ConfigError("--method must be records or process");
      }
      const kcut::CompleteTree tree(sim_n);
      const auto batch =
          kcut::cutsim::simulate_batch(tree, sim_k, variant, method, sim_samples, sim_seed, threads);
      std::ostringstream out;
      out << "sample_index,r,count\n";
      for (std::size_t i = 0; i < batch.size(); ++i) {
        for (std::size_t r = 0; r < batch[i].per_r.size(); ++r) {
          out << i << ',' << r + 1 << ',' << batch[i].per_r[r] << '\n';
        }
        out << i << ",total," << batch[i].total << '\n';
      }
      kcut::report::write_file(sim_out, out.str());
    } else if (em->parsed()) {
      query.variant = edge ? kcut::cutsim::Variant::edge : kcut::cutsim::Variant::node;
      const double exact = kcut::exactmean::expected_records(query);
      std::cout << real15(exact) << '\n';
      if (compare) {
        const auto table = kcut::series::constants(query.k, query.r);
        const double approx = kcut::exactmean::asymptotic_mean(query.n, table);
        std::cout << "asymptotic " << real15(approx) << '\n';
        std::cout << "gap " << real15(exact - approx) << '\n';
      }
    } else if (cst->parsed()) {
      std::cout << kcut::series::table_json(kcut::series::constants(c_k, c_r)) << '\n';
    } else if (lim->parsed()) {
      kcut::limitdist::validate(lp);
      const Grid g = parse_grid(grid_text);
      const auto law = kcut::limitdist::law_for(lp);
      std::ostringstream out;
      if (f_cf->count() > 0) {
        out << "t,re,im\n";
        for (int i = 0; i < g.steps; ++i) {
          const double t = grid_point(g, i);
          const auto v = law->char_fn(t);
          out << format_real(t) << ',' << format_real(v.real()) << ',' << format_real(v.imag())
              << '\n';
        }
      } else if (f_cdf->count() > 0) {
        const double c3 = kcut::series::constants(lp.k, lp.r).C3;
        out << "w,cdf\n";
        for (int i = 0; i < g.steps; ++i) {
          const double w = grid_point(g, i);
          out << format_real(w) << ',' << format_real(law->limit_cdf(w, c3)) << '\n';
        }
      } else {
        const bool tail = f_tail->count() > 0;
        out << (tail ? "x,tail\n" : "x,density\n");
        for (int i = 0; i < g.steps; ++i) {
          const double x = grid_point(g, i);
          out << format_real(x) << ',' << format_real(tail ? law->tail(x) : law->density(x))
              << '\n';
        }
      }
      kcut::report::write_file(lim_out, out.str());
    } else if (exp->parsed()) {
      auto config = kcut::harness::load_config(config_path);
      if (exp->count("--threads")) config.threads = threads;
      const auto report = kcut::harness::run_experiment(config);
      kcut::harness::write_outputs(report);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      if (config.csv_path.empty() && config.json_path.empty()) {
        std::cout << kcut::harness::summary_csv(report);
      }
    }
  } catch (const kcut::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const kcut::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

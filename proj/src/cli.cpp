#include "qsn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qsn/copt.hpp"
#include "qsn/harness.hpp"
#include "qsn/protocols.hpp"
#include "qsn/qfi.hpp"
#include "qsn/ssbound.hpp"

namespace qsn {
namespace {

enum class OutFormat { Csv, Json };

OutFormat format_for(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return OutFormat::Csv;
  if (ext == ".json") return OutFormat::Json;
  throw Error(ErrorCode::BadParameters, "--out must end in .csv or .json: " + path);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  f << content;
  if (!f) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::string costs_csv(const std::vector<StrategyCost>& costs) {
  std::string s = "strategy,value,achievable\n";
  for (const StrategyCost& c : costs) {
    s += std::string(to_string(c.strategy)) + ',' + format_double(c.value) + ',' +
         (c.achievable ? "true" : "false") + '\n';
  }
  return s;
}

std::string costs_json(const std::vector<StrategyCost>& costs) {
  nlohmann::json doc{{"costs", nlohmann::json::array()}};
  for (const StrategyCost& c : costs) {
    doc["costs"].push_back({{"strategy", to_string(c.strategy)}, {"value", c.value}, {"achievable", c.achievable}});
  }
  return doc.dump(2) + '\n';
}

std::string records_json(std::span<const SweepRecord> records) {
  nlohmann::json doc = nlohmann::json::array();
  for (const SweepRecord& r : records) {
    doc.push_back({{"instance_id", r.instance_id},
                   {"d", r.d},
                   {"n", r.n},
                   {"G_opt_omega", r.g_opt_omega},
                   {"M_local", r.m_local},
                   {"M_naive", r.m_naive},
                   {"M_ss", r.m_ss},
                   {"M_opt", r.m_opt},
                   {"alpha_dot", r.alpha_dot ? nlohmann::json(*r.alpha_dot) : nlohmann::json()},
                   {"wall_seconds",
                    {{"local", r.wall.local}, {"naive", r.wall.naive}, {"ss", r.wall.ss}, {"opt", r.wall.opt}}}});
  }
  return doc.dump(2) + '\n';
}

struct EvalArgs {
  std::string path;
  std::string strategy = "all";
  std::string out;
  int restarts = 64;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  const ProblemInstance inst = load_instance(a.path);
  std::vector<StrategyCost> costs;
  const bool all = a.strategy == "all";
  if (all || a.strategy == "local") costs.push_back(local_cost(inst));
  if (all || a.strategy == "naive") costs.push_back(naive_cost(inst).first);
  if (all || a.strategy == "opt") {
    OptimizerOptions opts;
    opts.restarts = a.restarts;
    costs.push_back(opt_sequential_cost(inst, opts).as_cost(inst.d()));
  }
  if (all || a.strategy == "ss") costs.push_back(ss_bound(inst).as_cost(inst.d()));

  char line[128];
  std::snprintf(line, sizeof line, "%-26s %-22s %s\n", "strategy", "cost", "achievable");
  out << line;
  for (const StrategyCost& c : costs) {
    std::snprintf(line, sizeof line, "%-26s %-22.17g %s\n", std::string(to_string(c.strategy)).c_str(),
                  c.value, c.achievable ? "yes" : "no (bound)");
    out << line;
  }
  if (!a.out.empty()) {
    write_file(a.out, format_for(a.out) == OutFormat::Csv ? costs_csv(costs) : costs_json(costs));
  }
  return 0;
}

struct SweepArgs {
  std::vector<int> d{2, 8, 64};
  int n = 2;
  int samples = 200;
  std::uint64_t seed = 20210915;
  bool orthant = false;
  std::string weights;
  int restarts = 64;
  std::string out;
};

int run_sweep_cmd(const SweepArgs& a, std::ostream& out) {
  SweepConfig config;
  config.d_values = a.d;
  config.n = a.n;
  config.samples = a.samples;
  config.seed = a.seed;
  config.orthant_restricted = a.orthant;
  config.restarts = a.restarts;
  config.weights = a.weights.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(a.n, 0)), 1.0)
                                     : parse_list(a.weights);
  validate(config);
  const std::vector<SweepRecord> records = run_sweep(config);
  std::ostringstream csv;
  write_sweep_csv(csv, records);
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_file(a.out, format_for(a.out) == OutFormat::Csv ? csv.str() : records_json(records));
  }
  return 0;
}

struct ReproduceArgs {
  std::string target;
  std::vector<int> d;
  int samples = 200;
  std::uint64_t seed = 20210915;
  int restarts = 64;
  std::string out;
};

int run_reproduce(const ReproduceArgs& a, std::ostream& out) {
  Report report;
  std::ostringstream data;
  bool has_data = false;
  if (a.target == "example2") {
    report = reproduce_example2();
  } else if (a.target == "example1") {
    std::vector<Example1Row> rows;
    report = reproduce_example1(a.d.empty() ? std::vector<int>{16, 64, 256} : a.d, 2.0, 1.0, 0.5, 1e-3,
                                &rows, a.restarts);
    data << "d,kappa,delta,M_opt,M_ss,ratio,prediction\n";
    for (const Example1Row& r : rows) {
      data << r.d << ',' << r.kappa << ',' << format_double(r.delta) << ',' << format_double(r.m_opt)
           << ',' << format_double(r.m_ss) << ',' << format_double(r.ratio) << ','
           << format_double(r.prediction) << '\n';
    }
    has_data = true;
  } else if (a.target == "fig3") {
    SweepConfig config;
    if (!a.d.empty()) config.d_values = a.d;
    config.samples = a.samples;
    config.seed = a.seed;
    config.restarts = a.restarts;
    std::vector<SweepRecord> records;
    report = reproduce_fig3(config, &records);
    write_sweep_csv(data, records);
    has_data = true;
  } else {
    std::vector<Fig4Point> points;
    report = reproduce_fig4(a.samples, a.seed, &points, a.restarts);
    write_fig4_csv(data, points);
    has_data = true;
  }
  out << report.to_text();
  if (!a.out.empty()) {
    if (format_for(a.out) == OutFormat::Json) {
      write_file(a.out, report.to_json());
    } else if (has_data) {
      write_file(a.out, data.str());
    } else {
      throw Error(ErrorCode::BadParameters, a.target + " has no tabular data; use a .json path");
    }
  }
  return report.passed() ? 0 : 2;
}

struct QfiArgs {
  int d = 2;
  double j = 0.0;
  double t = 1.0;
  std::string omega;
  std::string instance;
};

int run_qfi(const QfiArgs& a, std::ostream& out) {
  if (a.d < 1) throw Error(ErrorCode::BadDimensions, "d must be positive");
  const SignVector omega = a.omega.empty() ? SignVector::ones(a.d) : SignVector::from(parse_list(a.omega));
  if (omega.size() != a.d) throw Error(ErrorCode::DimensionMismatch, "omega must have d entries");
  const QfiModel model = QfiModel::make(omega, a.t, a.j);
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n", "  ", "");
  out << "F =\n" << qfi_matrix(model).format(fmt) << "\n";
  out << "F^-1 =\n" << qfi_inverse_closed(model).format(fmt) << "\n";
  const QfiSpectrum spec = qfi_eigenvalues(model);
  out << "eigenvalues: " << format_double(spec.aligned) << " (x1), " << format_double(spec.transverse)
      << " (x" << a.d - 1 << ")\n";
  if (!a.instance.empty()) {
    const ProblemInstance inst = load_instance(a.instance).with_time(a.t);
    out << "crb cost: " << format_double(crb_cost(inst, model)) << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategy costs for estimating linear functions with a quantum sensor network", "qsn"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate strategy costs for an instance file");
  eval->add_option("instance", eval_args.path, "Instance JSON")->required();
  eval->add_option("--strategy", eval_args.strategy)
      ->check(CLI::IsMember({"all", "local", "naive", "opt", "ss"}));
  eval->add_option("--restarts", eval_args.restarts, "Optimizer restarts");
  eval->add_option("--out", eval_args.out, "Write .csv or .json");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Random-instance strategy comparison");
  sweep->add_option("--d", sweep_args.d, "Dimensions to sample")->delimiter(',');
  sweep->add_option("--n", sweep_args.n, "Number of functions");
  sweep->add_option("--samples", sweep_args.samples, "Instances per d");
  sweep->add_option("--seed", sweep_args.seed);
  sweep->add_flag("--orthant", sweep_args.orthant, "Nonnegative rows; M_ss at omega = (1,...,1)");
  sweep->add_option("--weights", sweep_args.weights, "Comma-separated, default all ones");
  sweep->add_option("--restarts", sweep_args.restarts, "Optimizer restarts");
  sweep->add_option("--out", sweep_args.out, "Write .csv or .json instead of stdout");

  ReproduceArgs repro_args;
  auto* repro = app.add_subcommand("reproduce", "Rerun a worked example or figure and check it");
  repro->add_option("target", repro_args.target)
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "fig3", "fig4"}));
  repro->add_option("--d", repro_args.d, "Dimensions (example1, fig3)")->delimiter(',');
  repro->add_option("--samples", repro_args.samples, "Samples (per d for fig3)");
  repro->add_option("--seed", repro_args.seed);
  repro->add_option("--restarts", repro_args.restarts, "Optimizer restarts");
  repro->add_option("--out", repro_args.out, ".json for the report, .csv for the data");

  QfiArgs qfi_args;
  auto* oracle = app.add_subcommand("oracle", "Independent reference computations");
  oracle->require_subcommand(1);
  auto* qfi = oracle->add_subcommand("qfi", "Fisher matrix of the correlated sensor-symmetric state");
  qfi->add_option("--d", qfi_args.d)->required();
  qfi->add_option("--j", qfi_args.j, "Inter-sensor correlation")->required();
  qfi->add_option("--t", qfi_args.t, "Total time");
  qfi->add_option("--omega", qfi_args.omega, "Comma-separated signs, default all +1");
  qfi->add_option("--instance", qfi_args.instance, "Also report the Cramér-Rao cost for this instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 64;
  }

  try {
    if (*eval) return run_eval(eval_args, out);
    if (*sweep) return run_sweep_cmd(sweep_args, out);
    if (*repro) return run_reproduce(repro_args, out);
    if (*qfi) return run_qfi(qfi_args, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 64;
}

int cli_main(int argc, char** argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace qsn

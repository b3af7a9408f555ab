// qtomo: simulate tomography experiments, compare models, estimate power.

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtomo/io.hpp"
#include "qtomo/models.hpp"
#include "qtomo/qubit_analytic.hpp"
#include "qtomo/simulator.hpp"
#include "qtomo/twoqubit.hpp"

namespace {

using namespace qtomo;
using io::Json;

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitAnalysis = 4;

// Raised for flag values that parse but make no sense together.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SimulateFlags {
  int qubits = 1;
  std::string blocks;
  std::string schedule = "blocked";
  double p = 0.9;
  double drift_sigma = 0.0;
  double phi0 = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  bool force = false;
};

struct AnalyzeFlags {
  std::string in;
  std::string models;
  bool aicc = false;
  bool analytic = false;
  std::string engine = "auto";
  double z_threshold = 3.0;
  std::string report;
  std::string plot_data;
  bool force = false;
};

struct PowerFlags {
  SimulateFlags sim;
  int trials = 100;
  std::string sigma_grid = "0";
  std::string models;
  unsigned threads = 0;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_simulate_options(CLI::App* cmd, SimulateFlags& f) {
  cmd->add_option("--qubits", f.qubits, "number of qubits")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--blocks", f.blocks, "block list such as X:500,Y:500,Z:500 (XX:500,... for two qubits)");
  cmd->add_option("--schedule", f.schedule, "shot ordering")->check(CLI::IsMember({"blocked", "randomized"}));
  cmd->add_option("--p", f.p, "source Bloch-vector length")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--drift-sigma", f.drift_sigma, "random-walk step of the source phase, per shot")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--phi0", f.phi0, "initial source phase");
  cmd->add_option("--seed", f.seed, "random seed");
}

sim::Schedule schedule_of(const SimulateFlags& f) {
  const sim::Ordering ordering = sim::ordering_from_string(f.schedule);
  if (f.blocks.empty()) {
    sim::Schedule s = f.qubits == 1 ? sim::drift_schedule() : sim::two_qubit_schedule(500);
    s.ordering = ordering;
    return s;
  }
  return sim::parse_schedule(f.blocks, ordering);
}

sim::SourceConfig config_of(const SimulateFlags& f) {
  sim::SourceConfig cfg;
  cfg.p = f.p;
  cfg.phi0 = f.phi0;
  cfg.sigma_step = f.drift_sigma;
  cfg.seed = f.seed;
  cfg.n_qubits = f.qubits;
  return cfg;
}

void emit(const std::string& path, const std::string& text, bool force) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  io::write_text_file(path, text, force);
}

int cmd_simulate(const SimulateFlags& f) {
  const sim::Schedule sched = schedule_of(f);
  const ExperimentRecord rec = sim::run_experiment(config_of(f), sched);
  emit(f.out, io::dump_record(rec), f.force);
  return 0;
}

Json bloch_json(const BlochVector& b) { return Json::array({b.x, b.y, b.z}); }

Json estimate_json(const DensityMatrix& rho) {
  Json j;
  if (rho.n_qubits() == 1) j["bloch"] = bloch_json(density_to_bloch(rho));
  Json exp = Json::object();
  for (const PauliString& p : pauli_basis(rho.n_qubits())) exp[p.str()] = expectation(rho, p);
  j["expectations"] = exp;
  const Eigen::VectorXd ev = rho.eigenvalues();
  j["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
  return j;
}

Json analytic_section(const ExperimentRecord& rec) {
  const qubit::QubitSummary s = qubit::summarize(rec);
  Json j;
  j["averages"] = Json::array({s.x, s.y, s.z});
  j["shots_per_block"] = s.n;
  j["R"] = s.radius();
  j["delta_exact"] = qubit::delta_aic_exact(s);
  j["limiting_form"] = qubit::uses_limiting_form(s);
  const double taylor = qubit::delta_aic_taylor(s);
  j["delta_taylor"] = std::isfinite(taylor) ? Json(taylor) : Json(nullptr);
  j["taylor_regime"] = qubit::taylor_regime(s);
  const std::optional<double> c = qubit::consistency_threshold(s.x, s.y, s.z);
  j["threshold_C"] = c ? Json(*c) : Json(nullptr);
  j["consistent_by_threshold"] = qubit::consistent_by_threshold(s);
  j["normalized_average_estimate"] = bloch_json(qubit::normalized_average_estimate(s));
  j["refined_mle"] = bloch_json(density_to_bloch(qubit::standard_mle_qubit(s)));
  return j;
}

int cmd_analyze(const AnalyzeFlags& f) {
  const std::string text = io::read_text_file(f.in);
  const ExperimentRecord rec = io::parse_record(text);

  std::string model_list = f.models;
  if (model_list.empty()) {
    model_list = rec.n_qubits == 1 ? "standard,per-block,halves,mask:halves:shared=Z" : "standard,per-setting,scan";
  }
  std::vector<ModelSpec> specs;
  std::optional<Json> scan_json;
  bool have_standard = false;
  for (const std::string& token : split_list(model_list)) {
    if (token == "scan") {
      if (rec.n_qubits != 2) throw UsageError("the scan model family needs a two-qubit record");
      const auto scan = twoqubit::inconsistency_scan(twoqubit::multiplicity_table(rec));
      const auto flagged = twoqubit::flag_inconsistent(scan, f.z_threshold);
      Json sj = Json::array();
      for (const auto& e : scan) {
        sj.push_back({{"observable", e.observable.str()}, {"max_z", std::isfinite(e.max_z) ? Json(e.max_z) : Json("inf")},
                      {"flagged", e.max_z > f.z_threshold}});
      }
      scan_json = sj;
      for (ModelSpec& m : twoqubit::build_alternative_models(rec, flagged)) {
        if (m.shared) specs.push_back(std::move(m));
      }
      continue;
    }
    ModelSpec m = io::parse_model_spec(token, rec);
    if (m.is_standard()) {
      if (have_standard) throw UsageError("more than one single-state model requested");
      have_standard = true;
    }
    specs.push_back(std::move(m));
  }
  if (!have_standard) specs.insert(specs.begin(), standard_model(rec.blocks.size()));

  if (f.engine != "auto" && f.engine != "numeric") throw UsageError("--engine must be auto or numeric");
  if (f.analytic && f.engine == "numeric") throw UsageError("--analytic and --engine numeric are exclusive");
  const FitEngine engine = f.engine == "numeric" ? FitEngine::Numeric : FitEngine::Auto;

  std::vector<std::string> notes;
  std::vector<FittedModel> fitted;
  for (const ModelSpec& m : specs) {
    try {
      fitted.push_back(fit_model(m, rec, engine));
    } catch (const ImpossibleData&) {
      if (m.is_standard()) throw;
      notes.push_back("model " + m.name + " excluded by data");
    }
  }
  const Scoring scoring = f.aicc ? Scoring::Aicc : Scoring::Aic;
  if (f.aicc) {
    for (const FittedModel& m : fitted) {
      if (!m.omega_c()) throw std::runtime_error("AICc undefined for model " + m.spec.name + ": n <= K + 1");
    }
  }
  const AicReport report = rank_models(std::move(fitted), scoring);

  io::Provenance prov;
  prov.input_sha256 = io::sha256_hex(text);
  prov.seed = rec.metadata.seed;
  io::ReportDocument doc = io::make_report(report, prov);
  doc.notes = notes;
  doc.standard_estimate = estimate_json(report.fitted[report.standard_index].estimates.front());
  if (f.analytic) {
    if (rec.n_qubits != 1) throw UsageError("--analytic needs a single-qubit record");
    doc.analytic = analytic_section(rec);
  }
  Json out = io::report_to_json(doc);
  if (scan_json) out["scan"] = *scan_json;

  std::cout << io::format_table(doc);
  if (!f.report.empty()) io::write_text_file(f.report, out.dump(2) + "\n", f.force);
  if (!f.plot_data.empty()) io::write_text_file(f.plot_data, io::plot_data_csv(rec), f.force);
  return 0;
}

int cmd_power(const PowerFlags& f) {
  const sim::Schedule sched = schedule_of(f.sim);
  const sim::SourceConfig base = config_of(f.sim);
  if (f.trials < 1) throw UsageError("--trials must be at least 1");

  std::vector<double> sigmas;
  for (const std::string& s : split_list(f.sigma_grid)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !(v >= 0.0)) throw UsageError("bad sigma '" + s + "' in --sigma-grid");
    sigmas.push_back(v);
  }
  if (sigmas.empty()) throw UsageError("--sigma-grid is empty");

  // Models are built against a template record so that grouping tokens
  // resolve to the schedule's block count.
  ExperimentRecord tmpl;
  tmpl.n_qubits = f.sim.qubits;
  for (std::size_t b = 0; b < sched.blocks.size(); ++b) {
    tmpl.blocks.push_back({sched.blocks[b].setting,
                           std::vector<std::int64_t>(sched.blocks[b].setting.n_outcomes(), 1), static_cast<int>(b)});
  }
  std::vector<ModelSpec> models;
  if (f.models.empty()) {
    models = f.sim.qubits == 1 ? sim::drift_model_set(sched.blocks.size())
                               : std::vector<ModelSpec>{standard_model(sched.blocks.size()), per_setting_model(tmpl)};
  } else {
    for (const std::string& token : split_list(f.models)) models.push_back(io::parse_model_spec(token, tmpl));
  }

  std::vector<io::PowerRow> rows;
  for (double sigma : sigmas) {
    sim::SourceConfig cfg = base;
    cfg.sigma_step = sigma;
    // The same trial seeds at every sigma, so the grid shares random numbers.
    const sim::PowerResult r = sim::monte_carlo_power(cfg, sched, models, f.trials, f.threads);
    rows.push_back({sigma, r.n_trials, r.n_inconsistent, r.fraction, r.std_error});
  }
  emit(f.sim.out, io::power_csv(rows), f.sim.force);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-selection checks for quantum state tomography data"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1);

  SimulateFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate a drifting-source tomography experiment");
  add_simulate_options(simulate, sim_flags);
  simulate->add_option("--out", sim_flags.out, "output JSON path (stdout if omitted)");
  simulate->add_flag("--force", sim_flags.force, "overwrite an existing output file");

  AnalyzeFlags an;
  CLI::App* analyze = app.add_subcommand("analyze", "fit and rank models for a recorded experiment");
  analyze->add_option("--in", an.in, "experiment JSON")->required();
  analyze->add_option("--models", an.models, "comma-separated model list");
  analyze->add_flag("--aicc", an.aicc, "rank by the small-sample corrected score");
  analyze->add_flag("--analytic", an.analytic, "add the single-qubit closed-form section");
  analyze->add_option("--engine", an.engine, "fitting engine: auto or numeric");
  analyze->add_option("--z-threshold", an.z_threshold, "flag level for the two-qubit scan");
  analyze->add_option("--report", an.report, "report JSON path");
  analyze->add_option("--plot-data", an.plot_data, "per-block counts CSV path");
  analyze->add_flag("--force", an.force, "overwrite existing output files");

  PowerFlags pw;
  CLI::App* power = app.add_subcommand("power", "Monte Carlo detection rate across drift strengths");
  add_simulate_options(power, pw.sim);
  power->add_option("--trials", pw.trials, "experiments per sigma");
  power->add_option("--sigma-grid", pw.sigma_grid, "comma-separated drift steps");
  power->add_option("--models", pw.models, "comma-separated model list");
  power->add_option("--threads", pw.threads, "worker threads (0: hardware concurrency)");
  power->add_option("--out", pw.sim.out, "output CSV path (stdout if omitted)");
  power->add_flag("--force", pw.sim.force, "overwrite an existing output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim_flags);
    if (*analyze) return cmd_analyze(an);
    return cmd_power(pw);
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
}

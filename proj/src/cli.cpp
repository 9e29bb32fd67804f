// Copyright 2026 The qdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdt/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qdt/crosstalk.hpp"
#include "qdt/entanglement.hpp"
#include "qdt/error.hpp"
#include "qdt/io.hpp"
#include "qdt/report.hpp"
#include "qdt/simulator.hpp"
#include "qdt/tomography.hpp"

namespace qdt::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct SimulateOptions {
  int n = 2;
  std::string noise = "local_flip";
  std::vector<double> p = {0.0};
  double w = 0.0;
  double q = 0.5;
  std::vector<int> pair = {0, 1};
  std::vector<int> qubits;
  std::int64_t shots = 8192;
  std::uint64_t seed = 0;
  bool exact = false;
  std::string out;
  std::string truth;
};

struct ReconstructOptions {
  std::string in;
  std::string out;
  std::string diagnostics;
  std::string truth;
  double epsilon = 1e-6;
  int max_iters = 10000;
};

struct AnalyzeOptions {
  std::string in;
  std::string out;
  std::string format;
  int restarts = 16;
  std::uint64_t seed = 2021;
  double ppt_tol = kDefaultPptTolerance;
  std::string partitions;
};

struct ReportOptions {
  std::vector<std::string> in;
  std::vector<std::string> ppt;
  std::string table = "all";
  std::string out;
};

report::InputDigest digest(const fs::path& path) {
  return {path.filename().string(), report::sha256_hex(io::read_text_file(path))};
}

report::Provenance provenance(const std::string& command, const Json& config,
                              std::vector<report::InputDigest> inputs) {
  return {command, report::sha256_hex(config.dump()), std::move(inputs), report::utc_timestamp()};
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  NoiseSpec spec;
  spec.kind = parse_noise_kind(o.noise);
  spec.seed = o.seed;
  if (spec.kind == NoiseKind::entangled) {
    if (o.p.size() != 1) throw ArgumentError("--p takes one Bell weight for entangled noise");
    spec.p = o.p.front();
  } else {
    spec.flip = o.p;
    spec.w = o.w;
    spec.q = o.q;
  }
  if (o.pair.size() != 2) throw ArgumentError("--pair takes two qubit positions");
  spec.pair = {o.pair[0], o.pair[1]};
  if (o.n < 1) throw ArgumentError("--n must be at least 1");
  const std::vector<int> qubits = o.qubits.empty() ? default_labels(o.n) : o.qubits;
  if (static_cast<int>(qubits.size()) != o.n) throw ArgumentError("--qubits must list --n labels");
  if (o.shots < 1) throw ArgumentError("--shots must be at least 1");

  const Povm truth = make_noisy_povm(qubits, spec);
  const PreparationSet preps = mub_preparations(qubits, o.shots);
  const CountsDataset data =
      o.exact ? exact_counts(truth, preps, o.shots) : sample_counts(truth, preps, o.shots, o.seed);

  const fs::path counts_path(o.out);
  const fs::path truth_path = o.truth.empty() ? sibling(counts_path, ".truth.json") : fs::path(o.truth);
  io::write_json_file(counts_path, io::counts_to_json(data));
  io::write_json_file(truth_path, io::povm_to_json(truth));
  out << "wrote " << data.preparations.size() << " preparations to " << counts_path.string()
      << " and the true POVM to " << truth_path.string() << "\n";
  return kOk;
}

int cmd_reconstruct(const ReconstructOptions& o, std::ostream& out, std::ostream& err) {
  MleConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.max_iters = o.max_iters;
  cfg.validate();

  const fs::path in_path(o.in);
  const CountsDataset data = io::counts_from_json(io::read_json_file(in_path));
  const TomographyInput input = to_tomography_input(data);
  const MleResult result = mle_reconstruct(input.preparations, input.frequencies, cfg);

  std::vector<report::InputDigest> inputs = {digest(in_path)};
  Json config = {{"command", "reconstruct"}, {"mle", report::mle_config_to_json(cfg)}};
  Json diag = report::diagnostics_to_json(result.diagnostics, cfg, provenance("reconstruct", config, inputs));
  if (!o.truth.empty()) {
    const Povm truth = io::povm_from_json(io::read_json_file(o.truth));
    if (truth.dim() != result.povm.dim()) throw ArgumentError("--truth POVM has the wrong size");
    Json distances = Json::object();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      distances[outcome_string(i, truth.num_qubits())] =
          trace_distance(normalize(truth[i]), normalize(result.povm[i]));
    }
    diag["truth_trace_distance"] = distances;
  }

  const fs::path out_path(o.out);
  const fs::path diag_path = o.diagnostics.empty() ? sibling(out_path, ".diag.json") : fs::path(o.diagnostics);
  io::write_json_file(out_path, io::povm_to_json(result.povm));
  io::write_json_file(diag_path, diag);
  if (!result.diagnostics.converged) {
    err << "warning: MLE did not converge in " << cfg.max_iters << " iterations (final epsilon "
        << result.diagnostics.final_epsilon << "); wrote the highest-likelihood iterate\n";
  }
  out << "reconstructed " << result.povm.size() << "-outcome POVM in "
      << result.diagnostics.iterations << " iterations -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  FitConfig fit;
  fit.restarts = o.restarts;
  fit.seed = o.seed;
  fit.validate();
  if (!(o.ppt_tol > 0.0)) throw ArgumentError("--ppt-tol must be positive");
  const bool want_json = o.format.empty() || o.format == "json";
  const bool want_csv = o.format.empty() || o.format == "csv";

  const fs::path in_path(o.in);
  const Povm povm = io::povm_from_json(io::read_json_file(in_path));
  const auto validity = validate_povm(povm, 1e-8);
  if (!validity.passed()) {
    throw SchemaError(in_path.string() + ": not a valid POVM (completeness residual " +
                      std::to_string(validity.completeness_residual) + ")");
  }

  std::vector<Partition> partitions;
  if (o.partitions.empty()) {
    if (povm.num_qubits() >= 2) partitions = default_partitions(povm.labels());
  } else {
    std::stringstream ss(o.partitions);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (!item.empty()) partitions.push_back(Partition::parse(item));
    }
  }
  if (partitions.empty()) throw ArgumentError("analysis needs at least two qubits");

  std::vector<report::InputDigest> inputs = {digest(in_path)};
  Json parts = Json::array();
  for (const auto& p : partitions) parts.push_back(p.to_string());
  const Json config = {{"command", "analyze"},
                       {"fit", report::fit_config_to_json(fit)},
                       {"ppt_tol", o.ppt_tol},
                       {"partitions", parts}};
  const auto prov = provenance("analyze", config, inputs);

  const CrosstalkReport xt = analyze_povm(povm, partitions, fit);
  const PptTable ppt = classify_povm(povm, o.ppt_tol);

  const fs::path prefix(o.out);
  if (want_json) {
    io::write_json_file(prefix.string() + ".crosstalk.json", report::crosstalk_to_json(xt, prov));
    io::write_json_file(prefix.string() + ".ppt.json", report::ppt_to_json(ppt, prov));
  }
  if (want_csv) {
    io::write_text_file(prefix.string() + ".crosstalk.csv", report::crosstalk_to_csv(xt));
    io::write_text_file(prefix.string() + ".ppt.csv", report::ppt_to_csv(ppt));
  }
  out << "analyzed " << xt.outcomes.size() << " outcomes x " << partitions.size()
      << " partitions -> " << prefix.string() << ".{crosstalk,ppt}." << (o.format.empty() ? "{json,csv}" : o.format)
      << "\n";
  return kOk;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  std::vector<Json> xt;
  std::vector<Json> ppt;
  for (const auto& path : o.in) {
    Json j = io::read_json_file(path);
    if (j.value("schema", "") != report::kCrosstalkSchema) {
      throw SchemaError(path + ": not a crosstalk report");
    }
    xt.push_back(std::move(j));
  }
  for (const auto& path : o.ppt) {
    Json j = io::read_json_file(path);
    if (j.value("schema", "") != report::kPptSchema) throw SchemaError(path + ": not a PPT report");
    ppt.push_back(std::move(j));
  }
  std::ostringstream text;
  const bool all = o.table == "all";
  if ((all || o.table == "errors") && !xt.empty()) {
    text << "Crosstalk errors (D_N, D_C, D_L*)\n" << report::render_error_table(xt) << "\n";
  }
  if (all || o.table == "partitions") {
    for (const auto& rep : xt) text << "D_C by partition\n" << report::render_partition_table(rep) << "\n";
  }
  if ((all || o.table == "ppt") && !ppt.empty()) {
    text << "Partial-transpose verdicts (N = NPPT, P = PPT)\n" << report::render_ppt_table(ppt) << "\n";
  }
  if (o.out.empty()) {
    out << text.str();
  } else {
    io::write_text_file(o.out, text.str());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("QDT_THREADS")) kernels::set_max_threads(std::atoi(env));

  CLI::App app{"Detector tomography and measurement crosstalk analysis", "qdt"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a counts file from a synthetic noisy detector");
  simulate->add_option("--n", sim.n, "Number of qubits")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "local_flip | classical_corr | entangled")
      ->check(CLI::IsMember({"local_flip", "classical_corr", "entangled"}))
      ->capture_default_str();
  simulate->add_option("--p", sim.p, "Flip probability (one or per qubit); Bell weight for entangled")
      ->delimiter(',');
  simulate->add_option("--w", sim.w, "Correlation weight for classical_corr")->capture_default_str();
  simulate->add_option("--q", sim.q, "Joint flip probability of the correlated pair")->capture_default_str();
  simulate->add_option("--pair", sim.pair, "Qubit positions of the correlated or entangled pair")
      ->delimiter(',');
  simulate->add_option("--qubits", sim.qubits, "Qubit labels (default 0..n-1)")->delimiter(',');
  simulate->add_option("--shots", sim.shots, "Shots per preparation")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Sampling seed")->capture_default_str();
  simulate->add_flag("--exact", sim.exact, "Write noiseless counts (probability x shots)");
  simulate->add_option("--out", sim.out, "Counts file to write")->required();
  simulate->add_option("--truth", sim.truth, "True POVM file (default <out>.truth.json)");

  ReconstructOptions rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Maximum-likelihood POVM reconstruction from counts");
  reconstruct->add_option("--in", rec.in, "Counts file")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--out", rec.out, "POVM file to write")->required();
  reconstruct->add_option("--diagnostics", rec.diagnostics, "Diagnostics file (default <out>.diag.json)");
  reconstruct->add_option("--truth", rec.truth, "Reference POVM; adds per-element trace distances")
      ->check(CLI::ExistingFile);
  reconstruct->add_option("--epsilon", rec.epsilon, "Termination threshold")->capture_default_str();
  reconstruct->add_option("--max-iters", rec.max_iters, "Iteration cap")->capture_default_str();

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Crosstalk and partial-transpose analysis of a POVM");
  analyze->add_option("--in", ana.in, "POVM file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", ana.out, "Output prefix; writes <out>.crosstalk.* and <out>.ppt.*")->required();
  analyze->add_option("--format", ana.format, "json | csv (default: both)")->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--restarts", ana.restarts, "Product-fit restarts")->capture_default_str();
  analyze->add_option("--seed", ana.seed, "Product-fit seed")->capture_default_str();
  analyze->add_option("--ppt-tol", ana.ppt_tol, "NPPT eigenvalue tolerance")->capture_default_str();
  analyze->add_option("--partitions", ana.partitions, "Partitions such as \"0|1,2;1|2,0\" or \"0:(1,2)\"");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Render analysis files as text tables");
  report_cmd->add_option("--in", rep.in, "Crosstalk report JSON (repeatable)")->check(CLI::ExistingFile);
  report_cmd->add_option("--ppt", rep.ppt, "PPT report JSON (repeatable)")->check(CLI::ExistingFile);
  report_cmd->add_option("--table", rep.table, "errors | partitions | ppt | all")
      ->check(CLI::IsMember({"errors", "partitions", "ppt", "all"}))
      ->capture_default_str();
  report_cmd->add_option("--out", rep.out, "Write the tables here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*reconstruct) return cmd_reconstruct(rec, out, err);
    if (*analyze) return cmd_analyze(ana, out);
    if (*report_cmd) {
      if (rep.in.empty() && rep.ppt.empty()) throw ArgumentError("report needs --in or --ppt");
      return cmd_report(rep, out);
    }
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const LabelConflictError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace qdt::cli

#include "experiment.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>

#include "qntk/csv.hpp"
#include "qntk/error.hpp"
#include "qntk/kernels.hpp"
#include "qntk/numeric.hpp"
#include "svg_plot.hpp"

namespace qntk::lab {

using nlohmann::json;

namespace {

std::vector<std::string> observable_names(const CircuitOptions& c) {
  if (!c.observables.empty()) return c.observables;
  return {std::string(c.qubits, 'Z')};
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  const auto& ci = c.circuit;
  const auto& d = c.data;
  const auto& g = c.descent;
  const auto& r = c.reference;
  const auto& h = c.hybrid;
  return json{
      {"command", c.command},
      {"out", c.out},
      {"seed", c.seed},
      {"plots", c.plots},
      {"mode", c.mode},
      {"asymptotic", c.asymptotic},
      {"circuit",
       {{"qubits", ci.qubits},
        {"ansatz", ci.ansatz},
        {"reps", ci.reps},
        {"ansatz_file", ci.ansatz_file},
        {"feature_map", "zz"},
        {"feature_reps", ci.feature_reps},
        {"observables", observable_names(ci)}}},
      {"targets", c.targets},
      {"data",
       {{"dataset", d.dataset}, {"n_train", d.n_train}, {"n_test", d.n_test}, {"gap", d.gap}, {"data_seed", d.data_seed}}},
      {"descent",
       {{"eta", g.eta},
        {"steps", g.steps},
        {"early_stop", g.early_stop},
        {"grad_tol", g.grad_tol},
        {"record_kernel_every", g.record_kernel_every},
        {"divergence_factor", g.divergence_factor}}},
      {"reference",
       {{"init", r.init},
        {"theta_star", r.policy},
        {"pretrain_steps", r.pretrain_steps},
        {"pretrain_eta", r.pretrain_eta},
        {"theta_star_values", r.values},
        {"delta", r.delta}}},
      {"hybrid",
       {{"widths", h.widths},
        {"samples", h.samples},
        {"qubits", h.qubits},
        {"depth", h.depth},
        {"out_dim", h.out_dim},
        {"cw", h.c_w},
        {"cb", h.c_b},
        {"distribution", h.distribution},
        {"control", h.control}}},
  };
}

LayeredAnsatz build_ansatz(const CircuitOptions& c) {
  if (c.ansatz == "real-amplitudes") return real_amplitudes(c.qubits, c.reps);
  if (c.ansatz == "ry") return ry_layers(c.qubits, c.reps);
  if (c.ansatz == "file") {
    if (c.ansatz_file.empty()) throw ValidationError("--ansatz file needs --ansatz-file");
    LayeredAnsatz a = parse_ansatz(read_file(c.ansatz_file));
    if (a.n_qubits() != c.qubits)
      throw DimensionError("ansatz file acts on " + std::to_string(a.n_qubits()) + " qubits, --qubits is " +
                           std::to_string(c.qubits));
    return a;
  }
  throw ValidationError("unknown ansatz '" + c.ansatz + "'");
}

std::vector<PauliObservable> build_observables(const CircuitOptions& c) {
  std::vector<PauliObservable> out;
  for (const auto& name : observable_names(c)) {
    PauliObservable o = PauliObservable::parse(name);
    if (o.n_qubits() != c.qubits) throw DimensionError("observable '" + name + "' does not act on --qubits qubits");
    out.push_back(std::move(o));
  }
  return out;
}

Dataset build_dataset(const ExperimentConfig& config) {
  const auto& d = config.data;
  Dataset data = d.dataset.empty()
                     ? adhoc_generate(config.circuit.qubits, d.n_train, d.n_test, d.gap, d.data_seed)
                     : load_dataset(d.dataset);
  data.validate();
  if (data.metadata.d != config.circuit.qubits)
    throw DimensionError("dataset has " + std::to_string(data.metadata.d) + " features, --qubits is " +
                         std::to_string(config.circuit.qubits));
  return data;
}

std::vector<StateVector> encode(const ExperimentConfig& config, std::span<const LabeledSample> samples) {
  const FeatureMap map = zz_feature_map(config.circuit.qubits, config.circuit.feature_reps);
  std::vector<StateVector> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(map.encode(s.x));
  return out;
}

Problem optimization_problem(const ExperimentConfig& config) {
  auto obs = build_observables(config.circuit);
  std::vector<double> targets = config.targets;
  if (targets.empty()) targets.assign(obs.size(), -1.0);
  if (targets.size() != obs.size())
    throw ValidationError(std::to_string(targets.size()) + " targets for " + std::to_string(obs.size()) +
                          " observables");
  return Problem(build_ansatz(config.circuit), {StateVector(config.circuit.qubits)}, std::move(obs),
                 std::move(targets), Mode::Optimization);
}

Problem learning_problem(const ExperimentConfig& config, const Dataset& data) {
  auto obs = build_observables(config.circuit);
  std::vector<double> targets;
  for (const auto& s : data.train()) targets.insert(targets.end(), obs.size(), s.y);
  return Problem(build_ansatz(config.circuit), encode(config, data.train()), std::move(obs), std::move(targets),
                 Mode::Learning);
}

std::vector<double> initial_angles(const ExperimentConfig& config, std::size_t n_params) {
  std::vector<double> theta(n_params, 0.0);
  if (config.reference.init == "zeros") return theta;
  if (config.reference.init != "random") throw ValidationError("unknown --init '" + config.reference.init + "'");
  std::mt19937_64 rng(derive_seed(config.seed, 0x1a));
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (double& t : theta) t = u(rng);
  return theta;
}

DescentConfig descent_config(const DescentOptions& d) {
  if (!(d.eta > 0.0)) throw ValidationError("--eta must be positive");
  DescentConfig c;
  c.learning_rate = d.eta;
  c.steps = d.steps;
  c.record_kernel_every = d.record_kernel_every;
  c.grad_tolerance = d.early_stop ? d.grad_tol : 0.0;
  c.divergence_factor = d.divergence_factor;
  return c;
}

Reference resolve_reference(const ExperimentConfig& config, const Problem& problem) {
  const auto& r = config.reference;
  const std::size_t n = problem.n_params();
  Reference ref;
  ref.theta0 = initial_angles(config, n);
  if (r.policy == "zeros") {
    ref.theta_star.assign(n, 0.0);
  } else if (r.policy == "explicit") {
    if (r.values.size() != n)
      throw ValidationError("--theta-star-values has " + std::to_string(r.values.size()) + " entries, the ansatz has " +
                            std::to_string(n) + " parameters");
    ref.theta_star = r.values;
  } else if (r.policy == "pretrain") {
    DescentOptions pre;
    pre.eta = r.pretrain_eta;
    pre.steps = r.pretrain_steps;
    pre.divergence_factor = config.descent.divergence_factor;
    const TrainingTrace t = train(problem, ref.theta0, descent_config(pre));
    ref.theta_star = t.steps.back().theta;
    ref.theta0 = ref.theta_star;
    ref.pretrain_steps_run = t.steps.size() - 1;
  } else {
    throw ValidationError("unknown --theta-star policy '" + r.policy + "'");
  }
  if (!(r.delta > 0.0)) throw ValidationError("--delta must be positive");
  return ref;
}

namespace {

class Artifacts {
 public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& contents) {
    write_file((std::filesystem::path(dir_) / name).string(), contents);
    names_.push_back(name);
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::string dir_;
  std::vector<std::string> names_;
};

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

std::vector<std::string> column_names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Eigen::MatrixXd measured_eps(const TrainingTrace& trace) {
  const Eigen::Index n = trace.steps.front().eps.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(trace.steps.size()), n);
  for (std::size_t t = 0; t < trace.steps.size(); ++t) m.row(static_cast<Eigen::Index>(t)) = trace.steps[t].eps.transpose();
  return m;
}

std::vector<double> step_axis(std::size_t rows) {
  std::vector<double> t(rows);
  for (std::size_t i = 0; i < rows; ++i) t[i] = static_cast<double>(i);
  return t;
}

double loss_of(const Eigen::VectorXd& eps) { return 0.5 * eps.squaredNorm(); }

struct MainRun {
  Problem problem;
  Reference reference;
  std::vector<double> coords0;
  TrainingTrace trace;
};

MainRun main_run(const ExperimentConfig& config, const Problem& base) {
  Reference ref = resolve_reference(config, base);
  Problem p = base.with_reference(ref.theta_star, config.reference.delta);
  std::vector<double> coords0 = p.coords_for(ref.theta0);
  TrainingTrace trace = train(p, coords0, descent_config(config.descent));
  return {std::move(p), std::move(ref), std::move(coords0), std::move(trace)};
}

json trace_summary(const MainRun& run) {
  const auto& tr = run.trace;
  return {{"steps_run", tr.steps.size() - 1},
          {"pretrain_steps_run", run.reference.pretrain_steps_run},
          {"theta_star", run.reference.theta_star},
          {"initial_loss", tr.steps.front().loss},
          {"final_loss", tr.steps.back().loss},
          {"final_max_abs_eps", tr.steps.back().eps.cwiseAbs().maxCoeff()},
          {"eta_lambda_max_initial", tr.steps.front().eta_lambda_max},
          {"stability_warning", tr.stability_warning},
          {"monotone", tr.monotone},
          {"monotone_check_applies", tr.monotone_check_applies},
          {"early_stopped", tr.early_stopped}};
}

void write_trace_artifacts(const ExperimentConfig& config, const TrainingTrace& trace, Artifacts& art) {
  art.write("trace.csv", render([&](std::ostream& o) { write_trace_csv(o, trace); }));
  const bool spectrum = config.descent.record_kernel_every > 0;
  if (spectrum) art.write("spectrum.csv", render([&](std::ostream& o) { write_spectrum_csv(o, trace); }));
  if (!config.plots) return;
  Series loss{"loss", {}, {}};
  for (const auto& s : trace.steps) {
    loss.x.push_back(static_cast<double>(s.t));
    loss.y.push_back(s.loss);
  }
  art.write("loss.svg", render_svg({"Training loss", "step", "loss", false, true}, {loss}));
  if (!spectrum) return;
  std::vector<Series> eig;
  for (const auto& s : trace.steps)
    for (std::size_t k = 0; k < s.kernel_eigenvalues.size(); ++k) {
      if (eig.size() <= k) eig.push_back({"lambda_" + std::to_string(k + 1), {}, {}});
      eig[k].x.push_back(static_cast<double>(s.t));
      eig[k].y.push_back(s.kernel_eigenvalues[k]);
    }
  art.write("spectrum.svg", render_svg({"Dynamical kernel eigenvalues", "step", "eigenvalue", false, true}, eig));
}

json run_train(const ExperimentConfig& config, Artifacts& art) {
  const bool learn = config.command == "learn";
  const Problem base = learn ? learning_problem(config, build_dataset(config)) : optimization_problem(config);
  const MainRun run = main_run(config, base);
  write_trace_artifacts(config, run.trace, art);
  json s = trace_summary(run);
  s["n_params"] = base.n_params();
  s["n_indices"] = base.n_indices();
  return s;
}

json run_kernel(const ExperimentConfig& config, Artifacts& art) {
  const Problem base = learning_problem(config, build_dataset(config));
  const Reference ref = resolve_reference(config, base);
  const Problem p = base.with_reference(ref.theta_star, config.reference.delta);
  const KernelMatrix k = p.kernel(p.coords_for(ref.theta0));
  const Eigen::VectorXd ev = k.eigenvalues();
  art.write("kernel.csv", render([&](std::ostream& o) { write_kernel_csv(o, k); }));
  art.write("spectrum.csv", render([&](std::ostream& o) { write_spectrum_csv(o, ev); }));
  if (config.plots) {
    Series s{"eigenvalue", {}, {}};
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(ev(i));
    }
    art.write("spectrum.svg", render_svg({"Kernel spectrum", "index", "eigenvalue", false, true}, {s}));
  }
  return {{"n_params", base.n_params()},
          {"n_indices", base.n_indices()},
          {"lambda_max", ev(0)},
          {"rank_threshold", kRankCutoff},
          {"rank", k.rank()},
          {"max_asymmetry", k.max_asymmetry()},
          {"psd", k.is_psd()}};
}

json run_predict(const ExperimentConfig& config, Artifacts& art) {
  const bool learn = config.mode == "learn";
  if (!learn && config.mode != "optimize") throw ValidationError("unknown --mode '" + config.mode + "'");
  if (config.asymptotic && !learn) throw ValidationError("--asymptotic needs --mode learn");
  std::optional<Dataset> data;
  if (learn) data = build_dataset(config);
  const Problem base = learn ? learning_problem(config, *data) : optimization_problem(config);
  const MainRun run = main_run(config, base);
  const auto& trace = run.trace;
  const std::size_t steps = trace.steps.size() - 1;
  const double eta = config.descent.eta;

  ParameterVector at_star;
  at_star.values.assign(base.n_params(), 0.0);
  at_star.reference = run.reference.theta_star;
  at_star.scale = config.reference.delta;
  const DerivativeTensors d = derivative_tensors(base.ansatz(), at_star, base.inputs(), base.observables());
  const Eigen::MatrixXd k = frozen_qntk_learning(base.ansatz(), at_star, base.inputs(), base.observables()).entries;
  const Eigen::MatrixXd k_delta = k_delta_learning(d, run.coords0).entries;
  const Eigen::VectorXd eps0 = trace.steps.front().eps;
  const LearningPrediction frozen = predict_frozen_learning(k, eps0, eta, steps);
  const DqntkLearningPrediction dqntk = predict_dqntk_learning(k, k_delta, eps0, eta, steps);

  const Eigen::MatrixXd meas = measured_eps(trace);
  const std::size_t n = static_cast<std::size_t>(eps0.size());
  std::vector<std::string> names = column_names("eps_", n);
  for (const auto& s : column_names("pred_frozen_eps_", n)) names.push_back(s);
  for (const auto& s : column_names("pred_dqntk_eps_", n)) names.push_back(s);
  const std::vector<Eigen::MatrixXd> blocks{meas, frozen.eps, dqntk.total};
  art.write("prediction.csv", render([&](std::ostream& o) { write_series_csv(o, names, blocks); }));

  const double scale = eps0.cwiseAbs().maxCoeff();
  json s = trace_summary(run);
  s["frozen_max_abs_error"] = (meas - frozen.eps).cwiseAbs().maxCoeff();
  s["dqntk_max_abs_error"] = (meas - dqntk.total).cwiseAbs().maxCoeff();
  s["frozen_max_rel_error"] = (meas - frozen.eps).cwiseAbs().maxCoeff() / scale;
  s["dqntk_max_rel_error"] = (meas - dqntk.total).cwiseAbs().maxCoeff() / scale;
  s["eta_lambda_max_frozen"] = frozen.validity.eta_lambda_max;
  s["spectral_radius"] = frozen.validity.spectral_radius;
  s["norm_bound_holds"] = dqntk.norm_bound_holds;

  if (config.plots) {
    const auto t = step_axis(meas.rows());
    std::vector<Series> ser{{"measured", t, {}}, {"frozen", t, {}, true}, {"dqntk", t, {}, true}};
    for (Eigen::Index r = 0; r < meas.rows(); ++r) {
      ser[0].y.push_back(loss_of(meas.row(r).transpose()));
      ser[1].y.push_back(loss_of(frozen.eps.row(r).transpose()));
      ser[2].y.push_back(loss_of(dqntk.total.row(r).transpose()));
    }
    art.write("prediction.svg", render_svg({"Loss: measured vs predicted", "step", "loss", false, true}, ser));
  }

  if (config.asymptotic) {
    std::vector<LabeledSample> all(data->samples.begin(), data->samples.end());
    std::vector<StateVector> inputs = encode(config, all);
    std::vector<double> targets;
    for (const auto& smp : all) targets.insert(targets.end(), base.observables().size(), smp.y);
    const Problem full(base.ansatz(), inputs, base.observables(), targets, Mode::Learning);
    const Eigen::VectorXd z0 = full.outputs(run.reference.theta0);
    const Eigen::VectorXd z_end = full.outputs(trace.steps.back().theta);
    const DerivativeTensors dall = derivative_tensors(base.ansatz(), at_star, inputs, base.observables());
    const Eigen::MatrixXd k_full = frozen_qntk_learning(base.ansatz(), at_star, inputs, base.observables()).entries;
    const AsymptoticPrediction lin = asymptotic_output(k_full, eps0, z0);
    const AlgorithmProjectors proj = algorithm_projectors(k, eta);
    const Eigen::VectorXd quad = dqntk_asymptotic_output(k_full, meta_kernel_learning(dall), proj, eps0, z0);
    art.write("asymptotic.csv", render([&](std::ostream& o) {
                o << "index,train,z_trained,z_frozen,z_dqntk\n";
                for (Eigen::Index i = 0; i < z0.size(); ++i) {
                  const double row[] = {static_cast<double>(i), i < eps0.size() ? 1.0 : 0.0, z_end(i), lin.z(i),
                                        quad(i)};
                  write_row(o, row);
                }
              }));
    const Eigen::Index nt = z0.size() - eps0.size();
    if (nt > 0) {
      s["asymptotic_frozen_test_error"] = (lin.z.tail(nt) - z_end.tail(nt)).cwiseAbs().maxCoeff();
      s["asymptotic_dqntk_test_error"] = (quad.tail(nt) - z_end.tail(nt)).cwiseAbs().maxCoeff();
    }
  }
  return s;
}

json run_hybrid_scan(const ExperimentConfig& config, Artifacts& art) {
  const auto& h = config.hybrid;
  WidthScanConfig w;
  w.widths = h.widths;
  w.n_qubits = h.qubits;
  w.depth = h.depth;
  w.out_dim = h.out_dim;
  w.feature_reps = config.circuit.feature_reps;
  w.gaussian_control = h.control;
  EnsembleSpec spec;
  spec.n_samples = h.samples;
  spec.seed = config.seed;
  spec.c_w = h.c_w;
  spec.c_b = h.c_b;
  spec.ansatz_distribution = parse_distribution(h.distribution);
  const WidthScanResult r = width_scan(w, spec);
  art.write("scan.csv", render([&](std::ostream& o) { write_width_scan_csv(o, r); }));
  if (config.plots) {
    Series pts{"|E_conn| / E2", {}, {}};
    Series fit{"fit", {}, {}, true};
    for (const auto& p : r.points) {
      pts.x.push_back(static_cast<double>(p.width));
      pts.y.push_back(std::abs(p.normalized()));
      fit.x.push_back(static_cast<double>(p.width));
      fit.y.push_back(std::exp(r.fit.intercept) * std::pow(static_cast<double>(p.width), r.fit.slope));
    }
    art.write("scan.svg", render_svg({"Connected four-point function", "width", "normalized |E_conn|", true, true},
                                     {pts, fit}));
  }
  json points = json::array();
  for (const auto& p : r.points)
    points.push_back({{"width", p.width},
                      {"e_conn", p.connected_value},
                      {"se", p.standard_error},
                      {"normalized", p.normalized()},
                      {"normalized_se", p.normalized_error()}});
  return {{"slope", r.fit.slope},
          {"slope_error", r.fit.slope_error},
          {"ci_low", r.fit.ci_low},
          {"ci_high", r.fit.ci_high},
          {"reliable", r.fit.reliable},
          {"note", r.fit.note},
          {"points", points}};
}

json run_dataset_gen(const ExperimentConfig& config, Artifacts& art) {
  const auto& d = config.data;
  const Dataset data = adhoc_generate(config.circuit.qubits, d.n_train, d.n_test, d.gap, d.data_seed);
  art.write("dataset.csv", render([&](std::ostream& o) { save_dataset(o, data); }));
  std::size_t pos = 0;
  for (const auto& s : data.samples) pos += s.y > 0;
  return {{"samples", data.samples.size()},
          {"n_train", data.n_train},
          {"positive", pos},
          {"draws", data.draws},
          {"acceptance_rate", static_cast<double>(data.samples.size()) / static_cast<double>(data.draws)},
          {"v_seed", data.metadata.v_seed}};
}

}  // namespace

json run_experiment(const ExperimentConfig& config) {
  Artifacts art(config.out);
  json summary;
  const auto& c = config.command;
  if (c == "optimize" || c == "learn") summary = run_train(config, art);
  else if (c == "kernel") summary = run_kernel(config, art);
  else if (c == "predict") summary = run_predict(config, art);
  else if (c == "hybrid-scan") summary = run_hybrid_scan(config, art);
  else if (c == "dataset-gen") summary = run_dataset_gen(config, art);
  else throw ValidationError("unknown command '" + c + "'");
  json manifest{{"tool", "qntk-lab"}, {"config", to_json(config)}, {"outputs", art.names()}, {"summary", summary}};
  manifest["outputs"].push_back("manifest.json");
  art.write("manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace qntk::lab

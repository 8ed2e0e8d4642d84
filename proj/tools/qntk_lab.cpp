#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "qntk/csv.hpp"
#include "qntk/error.hpp"

using namespace qntk;
using namespace qntk::lab;
using nlohmann::json;

namespace {

// Sections of the config file only group keys: every key is routed to the
// running subcommand, or to the top level for global flags.
class SectionedConfig : public CLI::ConfigTOML {
 public:
  explicit SectionedConfig(CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> out;
    const auto subs = app_->get_subcommands();
    CLI::App* active = subs.empty() ? nullptr : subs.front();
    for (auto item : CLI::ConfigTOML::from_config(input)) {
      if (item.name == "++" || item.name == "--") continue;
      const std::string flag = "--" + item.name;
      const std::string where = item.fullname();
      item.parents.clear();
      if (active && active->get_option_no_throw(flag)) {
        item.parents.push_back(active->get_name());
      } else if (!app_->get_option_no_throw(flag)) {
        bool known = false;
        for (const CLI::App* s : app_->get_subcommands({})) known |= s->get_option_no_throw(flag) != nullptr;
        if (!known) throw CLI::ConfigError("unknown config key '" + where + "'");
        continue;
      }
      out.push_back(std::move(item));
    }
    return out;
  }

 private:
  CLI::App* app_;
};

void add_circuit(CLI::App* s, CircuitOptions& c, bool with_ansatz) {
  s->add_option("--qubits", c.qubits, "Qubit count (also the feature count)")->capture_default_str();
  s->add_option("--feature-reps", c.feature_reps, "ZZ feature map repetitions")->capture_default_str();
  if (!with_ansatz) return;
  s->add_option("--ansatz", c.ansatz, "Ansatz kind")
      ->check(CLI::IsMember({"real-amplitudes", "ry", "file"}))
      ->capture_default_str();
  s->add_option("--reps", c.reps, "Ansatz repetitions")->capture_default_str();
  s->add_option("--ansatz-file", c.ansatz_file, "Ansatz in the text grammar (with --ansatz file)");
  s->add_option("--obs", c.observables, "Observables, e.g. Z or '0.5*XZ + ZX' (default: all-Z parity)")
      ->delimiter(',');
}

void add_data(CLI::App* s, DataOptions& d) {
  s->add_option("--dataset", d.dataset, "Load the dataset from this CSV instead of generating one");
  s->add_option("--n-train", d.n_train, "Generated training samples")->capture_default_str();
  s->add_option("--n-test", d.n_test, "Generated test samples")->capture_default_str();
  s->add_option("--gap", d.gap, "Generator label gap")->capture_default_str();
  s->add_option("--data-seed", d.data_seed, "Generator seed")->capture_default_str();
}

void add_descent(CLI::App* s, DescentOptions& d) {
  s->add_option("--eta", d.eta, "Learning rate")->capture_default_str();
  s->add_option("--steps", d.steps, "Step budget")->capture_default_str();
  s->add_flag("--early-stop", d.early_stop, "Stop once the gradient norm falls below --grad-tol");
  s->add_option("--grad-tol", d.grad_tol, "Gradient-norm threshold for --early-stop")->capture_default_str();
  s->add_option("--record-kernel-every", d.record_kernel_every, "Kernel spectrum period in steps (0: off)")
      ->capture_default_str();
  s->add_option("--divergence-factor", d.divergence_factor, "Abort when ||eps|| exceeds this multiple of ||eps(0)||")
      ->capture_default_str();
}

void add_reference(CLI::App* s, ReferenceOptions& r) {
  s->add_option("--init", r.init, "Initial angles")->check(CLI::IsMember({"zeros", "random"}))->capture_default_str();
  s->add_option("--theta-star", r.policy, "Expansion point policy")
      ->check(CLI::IsMember({"zeros", "pretrain", "explicit"}))
      ->capture_default_str();
  s->add_option("--pretrain-steps", r.pretrain_steps, "Steps before theta* under pretrain")->capture_default_str();
  s->add_option("--pretrain-eta", r.pretrain_eta, "Learning rate of the pretrain phase")->capture_default_str();
  s->add_option("--theta-star-values", r.values, "theta* under explicit")->delimiter(',');
  s->add_option("--delta", r.delta, "Scale of theta = theta* + delta * phi")->capture_default_str();
}

void write_error(const std::string& dir, const json& record) {
  try {
    std::filesystem::create_directories(dir);
    write_file((std::filesystem::path(dir) / "error.json").string(), record.dump(2) + "\n");
  } catch (const std::exception&) {
  }
}

int fail(const std::string& dir, const std::string& kind, const std::string& message, int code,
         json extra = json::object()) {
  json record{{"error", kind}, {"message", message}, {"exit_code", code}};
  record.update(extra);
  std::cerr << "qntk-lab: " << kind << ": " << message << "\n";
  write_error(dir, record);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  CLI::App app{"qntk-lab: quantum neural tangent kernel experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config; command-line flags take precedence");
  app.config_formatter(std::make_shared<SectionedConfig>(&app));
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_flag("--plots", cfg.plots, "Also write SVG plots");

  auto* optimize = app.add_subcommand("optimize", "Gradient descent on observable targets from |0...0>");
  add_circuit(optimize, cfg.circuit, true);
  optimize->add_option("--target", cfg.targets, "One target per observable (default -1)")->delimiter(',');
  add_descent(optimize, cfg.descent);
  add_reference(optimize, cfg.reference);

  auto* learn = app.add_subcommand("learn", "Square-loss training on the ad-hoc dataset");
  add_circuit(learn, cfg.circuit, true);
  add_data(learn, cfg.data);
  add_descent(learn, cfg.descent);
  add_reference(learn, cfg.reference);

  auto* kernel = app.add_subcommand("kernel", "Kernel matrix and spectrum on the training set");
  add_circuit(kernel, cfg.circuit, true);
  add_data(kernel, cfg.data);
  add_reference(kernel, cfg.reference);

  auto* predict = app.add_subcommand("predict", "Training run compared with frozen and dQNTK predictions");
  add_circuit(predict, cfg.circuit, true);
  predict->add_option("--mode", cfg.mode, "Problem kind")->check(CLI::IsMember({"optimize", "learn"}))->capture_default_str();
  predict->add_option("--target", cfg.targets, "Optimize mode: one target per observable")->delimiter(',');
  predict->add_flag("--asymptotic", cfg.asymptotic, "Learn mode: also compare asymptotic outputs");
  add_data(predict, cfg.data);
  add_descent(predict, cfg.descent);
  add_reference(predict, cfg.reference);

  auto* scan = app.add_subcommand("hybrid-scan", "Connected four-point function across hybrid widths");
  auto& h = cfg.hybrid;
  scan->add_option("--widths", h.widths, "Widths")->delimiter(',')->capture_default_str();
  scan->add_option("--samples", h.samples, "Ensemble members per width")->capture_default_str();
  scan->add_option("--qubits", h.qubits, "Register size")->capture_default_str();
  scan->add_option("--depth", h.depth, "Random ansatz depth")->capture_default_str();
  scan->add_option("--out-dim", h.out_dim, "Preactivation neurons per member")->capture_default_str();
  scan->add_option("--cw", h.c_w, "Weight variance C_W")->capture_default_str();
  scan->add_option("--cb", h.c_b, "Bias variance C_b")->capture_default_str();
  scan->add_option("--distribution", h.distribution, "Ansatz ensemble")
      ->check(CLI::IsMember({"random-pauli-layers", "random-angles"}))
      ->capture_default_str();
  scan->add_option("--feature-reps", cfg.circuit.feature_reps, "ZZ feature map repetitions")->capture_default_str();
  scan->add_flag("--control", h.control, "Gaussian control with matched covariance");

  auto* gen = app.add_subcommand("dataset-gen", "Generate an ad-hoc dataset CSV");
  gen->add_option("--qubits", cfg.circuit.qubits, "Feature count")->capture_default_str();
  add_data(gen, cfg.data);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    const auto& given = app.get_option("--out")->results();
    return fail(given.empty() ? cfg.out : given.back(), "usage", e.what(), kExitUsage);
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const json manifest = run_experiment(cfg);
    std::cout << manifest["summary"].dump() << "\n";
    return kExitOk;
  } catch (const DivergenceError& e) {
    return fail(cfg.out, "divergence", e.what(), kExitNumerical, {{"step", e.step()}, {"ratio", e.ratio()}});
  } catch (const NumericalError& e) {
    return fail(cfg.out, "numerical", e.what(), kExitNumerical);
  } catch (const ParseError& e) {
    return fail(cfg.out, "parse", e.what(), kExitUsage, {{"line", e.line()}});
  } catch (const std::invalid_argument& e) {
    return fail(cfg.out, "invalid-config", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return fail(cfg.out, "runtime", e.what(), kExitFailure);
  }
}

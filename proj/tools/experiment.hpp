#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qntk/ansatz.hpp"
#include "qntk/dataset.hpp"
#include "qntk/dynamics.hpp"
#include "qntk/feature_map.hpp"
#include "qntk/hybrid.hpp"

namespace qntk::lab {

struct CircuitOptions {
  std::size_t qubits = 3;
  std::string ansatz = "real-amplitudes";  ///< real-amplitudes | ry | file
  std::size_t reps = 3;
  std::string ansatz_file;                 ///< text grammar, used when ansatz == "file"
  std::size_t feature_reps = 2;
  std::vector<std::string> observables;    ///< empty means the all-Z parity
};

struct DataOptions {
  std::string dataset;  ///< load from this CSV when set
  std::size_t n_train = 20;
  std::size_t n_test = 10;
  double gap = 0.3;
  std::uint64_t data_seed = 1;
};

struct DescentOptions {
  double eta = 0.05;
  std::size_t steps = 200;
  bool early_stop = false;
  double grad_tol = 1e-8;
  std::size_t record_kernel_every = 0;
  double divergence_factor = 10.0;
};

struct ReferenceOptions {
  std::string init = "random";      ///< initial angles: zeros | random
  std::string policy = "zeros";     ///< theta*: zeros | pretrain | explicit
  std::size_t pretrain_steps = 500;
  double pretrain_eta = 0.05;
  std::vector<double> values;       ///< explicit theta*
  double delta = 1.0;
};

struct HybridOptions {
  std::vector<std::size_t> widths{4, 16, 64, 256};
  std::size_t samples = 20000;
  std::size_t qubits = 5;
  std::size_t depth = 8;
  std::size_t out_dim = 128;
  double c_w = 1.0;
  double c_b = 0.0;
  std::string distribution = "random-pauli-layers";
  bool control = false;
};

struct ExperimentConfig {
  std::string command;  ///< optimize | learn | kernel | predict | hybrid-scan | dataset-gen
  std::string out = "qntk-out";
  std::uint64_t seed = 0;
  bool plots = false;
  std::string mode = "learn";          ///< predict only: optimize | learn
  bool asymptotic = false;             ///< predict only: also write asymptotic.csv
  CircuitOptions circuit;
  std::vector<double> targets;         ///< optimize: one per observable, default -1
  DataOptions data;
  DescentOptions descent;
  ReferenceOptions reference;
  HybridOptions hybrid;
};

/// Every field, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);

LayeredAnsatz build_ansatz(const CircuitOptions& c);
std::vector<PauliObservable> build_observables(const CircuitOptions& c);

/// Dataset from file or generator, features matched to the qubit count.
Dataset build_dataset(const ExperimentConfig& config);

/// Optimization: |0...0> input and one target per observable.
Problem optimization_problem(const ExperimentConfig& config);
/// Learning: training rows through the ZZ feature map, target y per observable.
Problem learning_problem(const ExperimentConfig& config, const Dataset& data);
std::vector<StateVector> encode(const ExperimentConfig& config, std::span<const LabeledSample> samples);

std::vector<double> initial_angles(const ExperimentConfig& config, std::size_t n_params);

struct Reference {
  std::vector<double> theta_star;
  std::vector<double> theta0;  ///< angles at which the main run starts
  std::size_t pretrain_steps_run = 0;
};

/// zeros: theta* = 0. pretrain: theta* = angles after pretrain_steps plain
/// steps from the initial angles, and the main run starts there. explicit:
/// user values, length checked.
Reference resolve_reference(const ExperimentConfig& config, const Problem& problem);

DescentConfig descent_config(const DescentOptions& d);

/// Runs one subcommand, writes its artifacts under config.out and returns the
/// manifest that was written.
nlohmann::json run_experiment(const ExperimentConfig& config);

/// Exit codes of qntk-lab.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace qntk::lab

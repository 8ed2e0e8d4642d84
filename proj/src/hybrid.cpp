#include "qntk/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qntk/error.hpp"
#include "qntk/parallel.hpp"

namespace qntk {

namespace {

DenseGate haar_two_qubit(std::size_t q0, std::size_t q1, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < 4; ++c) {
    const Complex d = r(c, c);
    if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
  }
  std::vector<Complex> v(16);
  for (int r2 = 0; r2 < 4; ++r2)
    for (int c = 0; c < 4; ++c) v[static_cast<std::size_t>(r2 * 4 + c)] = q(r2, c);
  return DenseGate({q0, q1}, v, "haar");
}

std::array<double, 4> tuple_from(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

}  // namespace

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity:
      return x;
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
  }
  return x;
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Identity:
      return "identity";
    case Activation::Tanh:
      return "tanh";
    case Activation::Relu:
      return "relu";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

double observable_trace_inner(const PauliObservable& a, const PauliObservable& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("observables differ in qubit count");
  double s = 0.0;
  for (const auto& p : a.terms())
    for (const auto& q : b.terms()) s += normalized_trace_inner(p, q);
  return s;
}

void HybridLayer::validate() const {
  const std::size_t n = ansatz.n_qubits();
  if (feature_map.n_qubits() != n) throw DimensionError("feature map and ansatz differ in qubit count");
  if (angles.size() != ansatz.size()) throw DimensionError("angle count must equal the ansatz parameter count");
  if (observables.empty()) throw ValidationError("hybrid layer needs at least one observable");
  if (2 * n < 64 && width() > (std::size_t{1} << (2 * n)))
    throw ValidationError("width " + std::to_string(width()) + " exceeds (2^n)^2 = " +
                          std::to_string(std::size_t{1} << (2 * n)));
  for (const auto& o : observables)
    if (o.n_qubits() != n) throw DimensionError("observable qubit count does not match the ansatz");
  if (static_cast<std::size_t>(weights.cols()) != width()) throw DimensionError("weights must have one column per observable");
  if (biases.size() != weights.rows()) throw DimensionError("bias length must equal the weight row count");
  if (orthogonal)
    for (std::size_t i = 0; i < width(); ++i)
      for (std::size_t j = i + 1; j < width(); ++j)
        if (std::abs(observable_trace_inner(observables[i], observables[j])) > kDefaultTolerance)
          throw ValidationError("observables " + std::to_string(i) + " and " + std::to_string(j) +
                                " are not trace-orthogonal");
}

HybridPass hybrid_trace(std::span<const HybridLayer> layers, std::span<const double> x) {
  if (layers.empty()) throw ValidationError("network needs at least one hybrid layer");
  HybridPass pass;
  std::vector<double> input(x.begin(), x.end());
  for (std::size_t w = 0; w < layers.size(); ++w) {
    const HybridLayer& layer = layers[w];
    layer.validate();
    if (layer.feature_map.input_dim() != input.size())
      throw DimensionError("layer " + std::to_string(w) + " expects input dimension " +
                           std::to_string(layer.feature_map.input_dim()) + ", got " + std::to_string(input.size()));
    const StateVector psi = prepare(layer.ansatz, layer.angles, layer.feature_map.encode(input));
    Eigen::VectorXd zq(static_cast<Eigen::Index>(layer.width()));
    for (std::size_t j = 0; j < layer.width(); ++j) zq(static_cast<Eigen::Index>(j)) = expectation(psi, layer.observables[j]);
    const Eigen::VectorXd zc = layer.weights * zq + layer.biases;
    Eigen::VectorXd act = zc.unaryExpr([&](double v) { return activate(layer.activation, v); });
    input.assign(act.data(), act.data() + act.size());
    pass.quantum.push_back(std::move(zq));
    pass.preactivation.push_back(zc);
    pass.activation.push_back(std::move(act));
  }
  return pass;
}

Eigen::VectorXd hybrid_forward(std::span<const HybridLayer> layers, std::span<const double> x) {
  return hybrid_trace(layers, x).preactivation.back();
}

std::string_view distribution_name(AnsatzDistribution d) {
  return d == AnsatzDistribution::RandomAngles ? "random-angles" : "random-pauli-layers";
}

AnsatzDistribution parse_distribution(std::string_view name) {
  if (name == "random-angles") return AnsatzDistribution::RandomAngles;
  if (name == "random-pauli-layers") return AnsatzDistribution::RandomPauliLayers;
  throw ValidationError("unknown ansatz distribution '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ClassicalInit sample_classical_init(double c_w, double c_b, std::size_t out_dim, std::size_t width,
                                    std::mt19937_64& rng) {
  if (width == 0) throw ValidationError("width must be positive");
  if (c_w < 0.0 || c_b < 0.0) throw ValidationError("variances must be nonnegative");
  ClassicalInit init;
  init.weights.resize(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(width));
  init.biases.resize(static_cast<Eigen::Index>(out_dim));
  std::normal_distribution<double> g;
  const double sw = std::sqrt(c_w / static_cast<double>(width));
  const double sb = std::sqrt(c_b);
  for (Eigen::Index r = 0; r < init.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < init.weights.cols(); ++c) init.weights(r, c) = sw * g(rng);
  for (Eigen::Index r = 0; r < init.biases.size(); ++r) init.biases(r) = sb * g(rng);
  return init;
}

ClassicalInit sample_classical_init(const EnsembleSpec& spec, std::size_t out_dim, std::size_t width,
                                    std::uint64_t stream) {
  std::mt19937_64 rng(derive_seed(spec.seed, stream));
  return sample_classical_init(spec.c_w, spec.c_b, out_dim, width, rng);
}

SampledAnsatz sample_random_ansatz(const EnsembleSpec& spec, std::size_t n_qubits, std::size_t depth,
                                   std::uint64_t stream) {
  if (depth == 0) throw ValidationError("depth must be at least 1");
  if (n_qubits == 0 || n_qubits > kMaxQubits) throw ValidationError("unsupported qubit count");
  const bool fixed_structure = spec.ansatz_distribution == AnsatzDistribution::RandomAngles;
  std::mt19937_64 member(derive_seed(spec.seed, stream));
  std::mt19937_64 shared(derive_seed(spec.seed, ~std::uint64_t{0}));
  std::mt19937_64& structure = fixed_structure ? shared : member;
  std::uniform_int_distribution<int> axis(1, 3);
  std::vector<Layer> layers;
  for (std::size_t b = 0; b < depth; ++b) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
      Layer l;
      l.generator = PauliString::single(n_qubits, q, static_cast<Pauli>(axis(structure)));
      l.angle_index = b * n_qubits + q;
      layers.push_back(std::move(l));
    }
    for (std::size_t q = b % 2; q + 1 < n_qubits; q += 2) layers.back().fixed.emplace_back(haar_two_qubit(q, q + 1, structure));
  }
  SampledAnsatz s{LayeredAnsatz(n_qubits, std::move(layers)), {}};
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  s.angles.resize(s.ansatz.size());
  for (auto& a : s.angles) a = u(member);
  return s;
}

std::vector<PauliObservable> distinct_paulis(std::size_t n_qubits, std::size_t count, std::uint64_t seed) {
  if (n_qubits == 0 || 2 * n_qubits >= 63) throw ValidationError("unsupported qubit count");
  const std::uint64_t total = (std::uint64_t{1} << (2 * n_qubits)) - 1;
  if (count > total)
    throw ValidationError(std::to_string(count) + " distinct non-identity Pauli strings requested, only " +
                          std::to_string(total) + " exist");
  std::vector<std::uint64_t> codes(total);
  for (std::uint64_t c = 0; c < total; ++c) codes[c] = c + 1;
  std::mt19937_64 rng(derive_seed(seed, 0x7061756c69ULL));
  // Fisher-Yates with explicit draws keeps the order independent of the standard library.
  for (std::uint64_t i = total - 1; i > 0; --i) {
    const std::uint64_t j = rng() % (i + 1);
    std::swap(codes[i], codes[j]);
  }
  std::vector<PauliObservable> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<Pauli> letters(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) letters[q] = static_cast<Pauli>((codes[k] >> (2 * q)) & 3);
    out.emplace_back(PauliString(std::move(letters)));
  }
  return out;
}

FourPointEstimate connected_four_point(std::span<const std::array<double, 4>> samples, std::size_t blocks) {
  if (samples.size() < 1000) throw ValidationError("connected four-point estimate needs at least 1000 samples");
  if (blocks < 2 || blocks > samples.size()) throw ValidationError("block count out of range");
  constexpr int kPairs[6][2] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {0, 3}, {1, 2}};
  // Per block: sum z1z2z3z4 and the six pair products.
  std::vector<std::array<double, 7>> sums(blocks);
  const std::size_t n = samples.size();
  for (std::size_t b = 0; b < blocks; ++b) {
    std::array<double, 7> s{};
    for (std::size_t i = b * n / blocks; i < (b + 1) * n / blocks; ++i) {
      const auto& z = samples[i];
      s[0] += z[0] * z[1] * z[2] * z[3];
      for (int p = 0; p < 6; ++p) s[static_cast<std::size_t>(p) + 1] += z[kPairs[p][0]] * z[kPairs[p][1]];
    }
    sums[b] = s;
  }
  std::array<double, 7> total{};
  for (const auto& s : sums)
    for (std::size_t k = 0; k < 7; ++k) total[k] += s[k];

  auto estimate = [](const std::array<double, 7>& s, double count, double* wick) {
    std::array<double, 7> m;
    for (std::size_t k = 0; k < 7; ++k) m[k] = s[k] / count;
    const double w = m[1] * m[2] + m[3] * m[4] + m[5] * m[6];
    if (wick) *wick = w;
    return m[0] - w;
  };

  FourPointEstimate e;
  e.n_samples = n;
  e.connected_value = estimate(total, static_cast<double>(n), &e.two_point_scale);
  std::vector<double> loo(blocks);
  double mean = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::array<double, 7> s;
    for (std::size_t k = 0; k < 7; ++k) s[k] = total[k] - sums[b][k];
    const double count = static_cast<double>(n - ((b + 1) * n / blocks - b * n / blocks));
    loo[b] = estimate(s, count, nullptr);
    mean += loo[b];
  }
  mean /= static_cast<double>(blocks);
  double var = 0.0;
  for (double v : loo) var += (v - mean) * (v - mean);
  e.standard_error = std::sqrt(var * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
  return e;
}

ScalingFit fit_scaling(std::span<const FourPointEstimate> points) {
  ScalingFit fit;
  if (points.size() < 2) {
    fit.slope = fit.intercept = std::nan("");
    fit.note = "fewer than two widths";
    return fit;
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t min_w = points[0].width, max_w = points[0].width;
  std::string note;
  for (const auto& p : points) {
    min_w = std::min(min_w, p.width);
    max_w = std::max(max_w, p.width);
    const double v = std::abs(p.normalized());
    const double se = p.normalized_error();
    if (!(std::abs(p.connected_value) > 3.0 * p.standard_error) && note.empty())
      note = "width " + std::to_string(p.width) + " estimate is within 3 standard errors of zero";
    if (!(p.standard_error < 0.3 * std::abs(p.connected_value)) && note.empty())
      note = "width " + std::to_string(p.width) + " standard error exceeds 30% of the estimate";
    if (!(v > 0.0) || !std::isfinite(v)) {
      fit.slope = fit.intercept = std::nan("");
      fit.note = "width " + std::to_string(p.width) + " estimate is zero";
      return fit;
    }
    const double x = std::log(static_cast<double>(p.width));
    const double y = std::log(v);
    const double sigma = se > 0.0 ? se / v : 1.0;
    const double w = 1.0 / (sigma * sigma);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) {
    fit.slope = fit.intercept = std::nan("");
    fit.note = "widths do not vary";
    return fit;
  }
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  fit.slope_error = std::sqrt(sw / det);
  fit.ci_low = fit.slope - 1.96 * fit.slope_error;
  fit.ci_high = fit.slope + 1.96 * fit.slope_error;
  if (note.empty() && std::log10(static_cast<double>(max_w) / static_cast<double>(min_w)) < 1.5)
    note = "widths span less than 1.5 decades";
  fit.reliable = note.empty();
  fit.note = note;
  return fit;
}

WidthScanResult width_scan(const WidthScanConfig& config, const EnsembleSpec& spec) {
  if (config.widths.empty()) throw ValidationError("width scan needs at least one width");
  if (config.out_dim == 0) throw ValidationError("out_dim must be positive");
  const std::size_t n = config.n_qubits;
  const std::size_t max_width = *std::max_element(config.widths.begin(), config.widths.end());
  const auto paulis = distinct_paulis(n, max_width, spec.seed);

  std::vector<std::vector<double>> points = config.data_points;
  if (points.empty()) {
    std::mt19937_64 rng(derive_seed(spec.seed, 0x64617461ULL));
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    points.assign(4, x);
  }
  if (points.size() != 4) throw ValidationError("width scan needs exactly four data points");
  const FeatureMap fmap = zz_feature_map(n, config.feature_reps);
  std::vector<StateVector> encoded;
  for (const auto& x : points) {
    if (x.size() != n) throw DimensionError("data point dimension must equal the qubit count");
    encoded.push_back(fmap.encode(x));
  }

  WidthScanResult result;
  for (std::size_t width : config.widths) {
    if (width == 0) throw ValidationError("width must be positive");
    EnsembleSpec ws = spec;
    ws.seed = derive_seed(spec.seed, width);
    const std::uint64_t weight_seed = derive_seed(ws.seed, 0x77656967ULL);
    const std::size_t m = config.out_dim;
    std::vector<std::array<double, 4>> tuples(spec.n_samples * m);
    parallel_for(spec.n_samples, [&](std::size_t i) {
      const SampledAnsatz s = sample_random_ansatz(ws, n, config.depth, i);
      Eigen::MatrixXd zq(static_cast<Eigen::Index>(width), 4);
      for (int a = 0; a < 4; ++a) {
        const StateVector psi = prepare(s.ansatz, s.angles, encoded[static_cast<std::size_t>(a)]);
        for (std::size_t k = 0; k < width; ++k) zq(static_cast<Eigen::Index>(k), a) = expectation(psi, paulis[k]);
      }
      std::mt19937_64 rng(derive_seed(weight_seed, i));
      const ClassicalInit init = sample_classical_init(spec.c_w, spec.c_b, m, width, rng);
      const Eigen::MatrixXd zc = (init.weights * zq).colwise() + init.biases;
      for (std::size_t j = 0; j < m; ++j) tuples[i * m + j] = tuple_from(zc.row(static_cast<Eigen::Index>(j)).transpose());
    });

    if (config.gaussian_control) {
      Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
      for (const auto& t : tuples) {
        const Eigen::Vector4d v(t[0], t[1], t[2], t[3]);
        cov += v * v.transpose();
      }
      cov /= static_cast<double>(tuples.size());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
      const Eigen::Matrix4d root =
          es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
      const std::uint64_t control_seed = derive_seed(ws.seed, 0x676175ULL);
      parallel_for(spec.n_samples, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(control_seed, i));
        std::normal_distribution<double> g;
        for (std::size_t j = 0; j < m; ++j) {
          const Eigen::Vector4d v(g(rng), g(rng), g(rng), g(rng));
          tuples[i * m + j] = tuple_from(root * v);
        }
      });
    }

    FourPointEstimate e = connected_four_point(tuples);
    e.width = width;
    e.n_samples = spec.n_samples;
    result.points.push_back(e);
  }
  result.fit = fit_scaling(result.points);
  return result;
}

void write_width_scan_csv(std::ostream& out, const WidthScanResult& result) {
  out << "width,e_conn,se,e2_norm,n_samples\n";
  char buf[160];
  for (const auto& p : result.points) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu\n", p.width, p.connected_value, p.standard_error,
                  p.two_point_scale, p.n_samples);
    out << buf;
  }
}

}  // namespace qntk

#include "qntk/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "qntk/csv.hpp"
#include "qntk/error.hpp"
#include "qntk/hybrid.hpp"
#include "qntk/numeric.hpp"

namespace qntk {

namespace {

constexpr std::size_t kMaxDraws = 1000000;
constexpr std::size_t kLabelerDepth = 3;
constexpr std::size_t kLabelerReps = 2;

SampledAnsatz labeler_circuit(std::size_t d, std::uint64_t v_seed) {
  EnsembleSpec spec;
  spec.seed = v_seed;
  return sample_random_ansatz(spec, d, kLabelerDepth, 0);
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
  const std::string str(s);
  std::size_t pos = 0;
  try {
    const unsigned long long v = std::stoull(str, &pos);
    if (pos == str.size() && !str.empty() && str[0] != '-') return v;
  } catch (const std::exception&) {
  }
  throw ParseError("not an unsigned integer: '" + str + "'", line);
}

}  // namespace

void Dataset::validate() const {
  if (n_train == 0) throw ValidationError("dataset needs a nonempty training set");
  if (n_train > samples.size()) throw ValidationError("n_train exceeds the sample count");
  for (const auto& s : samples) {
    if (s.x.size() != metadata.d) throw DimensionError("sample feature count differs from d");
    if (s.y != 1.0 && s.y != -1.0) throw ValidationError("labels must be +1 or -1");
  }
}

AdhocLabeler::AdhocLabeler(std::size_t d, std::uint64_t v_seed)
    : map_(zz_feature_map(d, kLabelerReps)), parity_(PauliObservable::parse(std::string(d, 'Z'))) {
  auto v = labeler_circuit(d, v_seed);
  v_ = std::move(v.ansatz);
  angles_ = std::move(v.angles);
}

double AdhocLabeler::expectation(std::span<const double> x) const {
  return qntk::expectation(prepare(v_, angles_, map_.encode(x)), parity_);
}

std::uint64_t adhoc_unitary_seed(std::uint64_t seed) { return derive_seed(seed, 0x76u); }

Dataset adhoc_generate(std::size_t n_features, std::size_t n_train, std::size_t n_test, double gap,
                       std::uint64_t seed) {
  if (n_features == 0 || n_features > kMaxQubits) throw DimensionError("feature count out of range");
  if (n_train == 0) throw ValidationError("n_train must be positive");
  if (!(gap >= 0.0)) throw ValidationError("gap must be non-negative");
  Dataset data;
  data.n_train = n_train;
  data.metadata = {n_features, gap, seed, adhoc_unitary_seed(seed)};
  const AdhocLabeler labeler(n_features, data.metadata.v_seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (std::size_t n : {n_train, n_test}) {
    std::size_t want_pos = (n + 1) / 2, want_neg = n / 2;
    while (want_pos + want_neg > 0) {
      if (++data.draws > kMaxDraws)
        throw ValidationError("gap " + format_double(gap) + " too large: no dataset after 1e6 draws");
      std::vector<double> x(n_features);
      for (double& v : x) v = angle(rng);
      const double e = labeler.expectation(x);
      if (std::abs(e) <= gap) continue;
      std::size_t& want = e > 0 ? want_pos : want_neg;
      if (want == 0) continue;
      --want;
      data.samples.push_back({std::move(x), e > 0 ? 1.0 : -1.0});
    }
  }
  return data;
}

void save_dataset(std::ostream& out, const Dataset& data) {
  data.validate();
  const auto& m = data.metadata;
  out << "# adhoc d=" << m.d << " delta=" << format_double(m.delta) << " seed=" << m.seed << " v_seed=" << m.v_seed
      << " n_train=" << data.n_train << '\n';
  for (std::size_t k = 0; k < m.d; ++k) out << 'x' << k << ',';
  out << "y\n";
  std::vector<double> row;
  for (const auto& s : data.samples) {
    row = s.x;
    row.push_back(s.y);
    write_row(out, row);
  }
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ostringstream s;
  save_dataset(s, data);
  write_file(path, s.str());
}

Dataset load_dataset(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw ParseError("missing metadata header", 1);
  ++n;
  if (line.rfind("# adhoc", 0) != 0) throw ParseError("expected '# adhoc' metadata header", n);
  bool seen[5] = {};
  std::istringstream tokens(line.substr(7));
  std::string tok;
  while (tokens >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("malformed metadata token '" + tok + "'", n);
    const std::string key = tok.substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (key == "d") data.metadata.d = parse_u64(val, n), seen[0] = true;
    else if (key == "delta") data.metadata.delta = parse_double(val, n), seen[1] = true;
    else if (key == "seed") data.metadata.seed = parse_u64(val, n), seen[2] = true;
    else if (key == "v_seed") data.metadata.v_seed = parse_u64(val, n), seen[3] = true;
    else if (key == "n_train") data.n_train = parse_u64(val, n), seen[4] = true;
    else throw ParseError("unknown metadata key '" + key + "'", n);
  }
  for (bool s : seen)
    if (!s) throw ParseError("metadata header needs d, delta, seed, v_seed and n_train", n);
  const std::size_t d = data.metadata.d;

  if (!std::getline(in, line)) throw ParseError("missing column header", n + 1);
  ++n;
  const auto cols = split_fields(line);
  if (cols.size() != d + 1) throw ParseError("expected " + std::to_string(d + 1) + " columns", n);
  for (std::size_t k = 0; k < d; ++k)
    if (cols[k] != "x" + std::to_string(k)) throw ParseError("expected column x" + std::to_string(k), n);
  if (cols[d] != "y") throw ParseError("missing label column y", n);

  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != d + 1)
      throw ParseError("expected " + std::to_string(d + 1) + " fields, got " + std::to_string(f.size()), n);
    LabeledSample s;
    s.x.resize(d);
    for (std::size_t k = 0; k < d; ++k) s.x[k] = parse_double(f[k], n);
    s.y = parse_double(f[d], n);
    if (s.y != 1.0 && s.y != -1.0) throw ParseError("label must be +1 or -1", n);
    data.samples.push_back(std::move(s));
  }
  if (data.n_train == 0 || data.n_train > data.samples.size())
    throw ParseError("n_train does not fit the " + std::to_string(data.samples.size()) + " rows", n);
  return data;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return load_dataset(f);
}

}  // namespace qntk

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qntk/ansatz.hpp"
#include "qntk/feature_map.hpp"
#include "qntk/pauli.hpp"

namespace qntk {

struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;  ///< +1 or -1
};

struct AdhocMetadata {
  std::size_t d = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t v_seed = 0;
};

/// Rows [0, n_train) form the training set, the rest the test set.
struct Dataset {
  std::vector<LabeledSample> samples;
  std::size_t n_train = 0;
  AdhocMetadata metadata;
  std::size_t draws = 0;  ///< candidate points drawn by the generator; not serialized

  std::span<const LabeledSample> train() const { return std::span(samples).first(n_train); }
  std::span<const LabeledSample> test() const { return std::span(samples).subspan(n_train); }
  std::size_t n_test() const noexcept { return samples.size() - n_train; }
  /// Throws ValidationError on an empty training set, ragged rows or labels outside {-1, +1}.
  void validate() const;
};

/// Labeling function <Phi(x)| V^dag Z...Z V |Phi(x)> with the ZZ feature map
/// (2 repetitions) and a depth-3 random circuit V rebuilt from v_seed.
class AdhocLabeler {
 public:
  AdhocLabeler(std::size_t d, std::uint64_t v_seed);
  double expectation(std::span<const double> x) const;
  const LayeredAnsatz& unitary() const noexcept { return v_; }
  std::span<const double> angles() const noexcept { return angles_; }
  const FeatureMap& feature_map() const noexcept { return map_; }

 private:
  FeatureMap map_;
  LayeredAnsatz v_;
  std::vector<double> angles_;
  PauliObservable parity_;
};

std::uint64_t adhoc_unitary_seed(std::uint64_t seed);

/// x uniform in [0, 2 pi)^d, y = sign of the labeler expectation, keeping
/// |expectation| > gap. Each split holds ceil(n/2) positive and floor(n/2)
/// negative samples. Throws ValidationError after 10^6 draws.
Dataset adhoc_generate(std::size_t n_features, std::size_t n_train, std::size_t n_test, double gap,
                       std::uint64_t seed);

/// `# adhoc d=<d> delta=<gap> seed=<s> v_seed=<s2> n_train=<n>`, then `x0,...,x{d-1},y`.
void save_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::string& path, const Dataset& data);
/// Throws ParseError carrying the 1-based line number.
Dataset load_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

}  // namespace qntk

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "oracles/dense_oracle.hpp"
#include "oracles/generators.hpp"
#include "qntk/csv.hpp"
#include "qntk/dataset.hpp"
#include "qntk/error.hpp"

using namespace qntk;

namespace {

std::string saved(const Dataset& d) {
  std::ostringstream s;
  save_dataset(s, d);
  return s.str();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    load_dataset(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Csv, DoubleRoundTripIsBitwise) {
  gen::Rng rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(u(rng), ex(rng));
    EXPECT_TRUE(same_bits(parse_double(format_double(v)), v)) << format_double(v);
  }
  for (double v : {0.0, -0.0, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::infinity()})
    EXPECT_TRUE(same_bits(parse_double(format_double(v)), v));
}

TEST(Csv, ParseDoubleRejectsGarbage) {
  for (const char* bad : {"", "1.0x", "abc", " 1", "1,2"}) EXPECT_THROW(parse_double(bad), ParseError) << bad;
  try {
    parse_double("nope", 17);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 17u);
  }
}

TEST(Csv, SplitFields) {
  const auto f = split_fields("a,,b,");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[2], "b");
  EXPECT_EQ(f[3], "");
}

TEST(Csv, TraceAndSpectrumLayout) {
  TrainingTrace tr;
  for (std::size_t t = 0; t < 3; ++t) {
    TraceStep s;
    s.t = t;
    s.loss = 0.5 / (t + 1);
    s.eps = Eigen::Vector2d(0.1 * t, -0.25);
    s.theta = {1.0, 2.0, 3.0};
    if (t != 1) s.kernel_eigenvalues = {2.0, 1.0 / 3.0};
    tr.steps.push_back(s);
  }
  std::ostringstream a;
  write_trace_csv(a, tr);
  EXPECT_EQ(a.str(),
            "t,loss,eps_0,eps_1,theta_0,theta_1,theta_2\n"
            "0,0.5,0,-0.25,1,2,3\n"
            "1,0.25,0.10000000000000001,-0.25,1,2,3\n"
            "2,0.16666666666666666,0.20000000000000001,-0.25,1,2,3\n");
  std::ostringstream b;
  write_spectrum_csv(b, tr);
  EXPECT_EQ(b.str(), "t,lambda_1,lambda_2\n0,2,0.33333333333333331\n2,2,0.33333333333333331\n");
  EXPECT_THROW(write_trace_csv(a, TrainingTrace{}), ValidationError);
}

TEST(Csv, SeriesLayout) {
  Eigen::MatrixXd m(2, 2), p(2, 1);
  m << 1, 2, 3, 4;
  p << 5, 6;
  const std::vector<std::string> names{"eps_0", "eps_1", "pred_eps_0"};
  const std::vector<Eigen::MatrixXd> blocks{m, p};
  std::ostringstream s;
  write_series_csv(s, names, blocks);
  EXPECT_EQ(s.str(), "t,eps_0,eps_1,pred_eps_0\n0,1,2,5\n1,3,4,6\n");
  const std::vector<std::string> short_names{"a"};
  EXPECT_THROW(write_series_csv(s, short_names, blocks), DimensionError);
}

TEST(Adhoc, DeterministicBytes) {
  const auto a = adhoc_generate(3, 20, 10, 0.3, 42);
  const auto b = adhoc_generate(3, 20, 10, 0.3, 42);
  EXPECT_EQ(saved(a), saved(b));
  EXPECT_NE(saved(a), saved(adhoc_generate(3, 20, 10, 0.3, 43)));
  EXPECT_EQ(saved(a).substr(0, saved(a).find('\n')),
            "# adhoc d=3 delta=0.29999999999999999 seed=42 v_seed=" + std::to_string(adhoc_unitary_seed(42)) +
                " n_train=20");
}

TEST(Adhoc, BalancedSplitsAndRange) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = adhoc_generate(3, 41, 20, 0.2, seed);
    ASSERT_EQ(d.samples.size(), 61u);
    ASSERT_EQ(d.n_train, 41u);
    int pos_train = 0, pos_test = 0;
    for (const auto& s : d.train()) pos_train += s.y > 0;
    for (const auto& s : d.test()) pos_test += s.y > 0;
    EXPECT_EQ(pos_train, 21);
    EXPECT_EQ(pos_test, 10);
    for (const auto& s : d.samples)
      for (double x : s.x) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 2 * kPi);
      }
  }
}

TEST(Adhoc, GapPropertyHoldsUnderDenseOracle) {
  const auto d = adhoc_generate(3, 30, 10, 0.3, 7);
  const AdhocLabeler lab(3, d.metadata.v_seed);
  const oracle::CMat u = oracle::circuit_matrix(lab.unitary(), std::vector<double>(lab.angles().begin(), lab.angles().end()));
  const oracle::CMat zzz = oracle::observable_matrix(PauliObservable::parse("ZZZ"));
  for (const auto& s : d.samples) {
    oracle::CVec psi = oracle::CVec::Zero(8);
    psi(0) = 1.0;
    for (const auto& op : lab.feature_map().circuit(s.x)) psi = oracle::fixed_matrix(op, 3) * psi;
    psi = u * psi;
    const double e = oracle::quadratic_form(psi, zzz).real();
    EXPECT_GT(std::abs(e), 0.3);
    EXPECT_EQ(e > 0 ? 1.0 : -1.0, s.y);
    EXPECT_NEAR(e, lab.expectation(s.x), 1e-12);
  }
}

TEST(Adhoc, ZeroGapAcceptsAlmostEverything) {
  const auto d = adhoc_generate(3, 200, 0, 0.0, 5);
  EXPECT_GT(static_cast<double>(d.samples.size()) / static_cast<double>(d.draws), 0.8);
}

TEST(Adhoc, Errors) {
  EXPECT_THROW(adhoc_generate(1, 4, 0, 1.0, 1), ValidationError);
  EXPECT_THROW(adhoc_generate(3, 0, 4, 0.1, 1), ValidationError);
  EXPECT_THROW(adhoc_generate(3, 4, 4, -0.1, 1), ValidationError);
  EXPECT_THROW(adhoc_generate(0, 4, 4, 0.1, 1), DimensionError);
}

TEST(DatasetIo, RoundTripIsBitwise) {
  const auto d = adhoc_generate(3, 25, 15, 0.1, 9);
  std::istringstream in(saved(d));
  const auto back = load_dataset(in);
  ASSERT_EQ(back.samples.size(), d.samples.size());
  EXPECT_EQ(back.n_train, d.n_train);
  EXPECT_EQ(back.metadata.v_seed, d.metadata.v_seed);
  EXPECT_TRUE(same_bits(back.metadata.delta, d.metadata.delta));
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_TRUE(same_bits(back.samples[i].x[k], d.samples[i].x[k]));
    EXPECT_EQ(back.samples[i].y, d.samples[i].y);
  }
  EXPECT_EQ(saved(back), saved(d));
}

TEST(DatasetIo, MalformedFilesReportLines) {
  const std::string head = "# adhoc d=2 delta=0.1 seed=1 v_seed=2 n_train=1\n";
  EXPECT_EQ(parse_error_line("x0,x1,y\n"), 1u);
  EXPECT_EQ(parse_error_line("# adhoc d=2 delta=0.1 seed=1 n_train=1\nx0,x1,y\n"), 1u);
  EXPECT_EQ(parse_error_line(head + "x0,x1\n0.1,0.2\n"), 2u);
  EXPECT_EQ(parse_error_line(head + "x0,x1,y\n0.1,0.2,1\n0.3,0.4\n"), 4u);
  EXPECT_EQ(parse_error_line(head + "x0,x1,y\n0.1,0.2,1\n0.3,zz,1\n"), 4u);
  EXPECT_EQ(parse_error_line(head + "x0,x1,y\n0.1,0.2,0.5\n"), 3u);
  EXPECT_EQ(parse_error_line("# adhoc d=2 delta=0.1 seed=1 v_seed=2 n_train=3\nx0,x1,y\n0.1,0.2,1\n"), 3u);
  EXPECT_EQ(parse_error_line(head + "x0,x1,y\n0.1,0.2,-1\n"), 0u);
}

TEST(DatasetIo, ThousandSamplesLoadQuickly) {
  Dataset d;
  d.metadata = {3, 0.1, 1, 2};
  d.n_train = 800;
  gen::Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 1000; ++i) d.samples.push_back({{u(rng), u(rng), u(rng)}, i % 2 ? 1.0 : -1.0});
  const std::string text = saved(d);
  const auto start = std::chrono::steady_clock::now();
  std::istringstream in(text);
  const auto back = load_dataset(in);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(back.samples.size(), 1000u);
  EXPECT_LT(ms, 100.0);
}

TEST(DatasetIo, FileRoundTrip) {
  const auto d = adhoc_generate(2, 6, 2, 0.2, 4);
  const std::string path = ::testing::TempDir() + "qntk_dataset_test/data.csv";
  save_dataset(path, d);
  EXPECT_EQ(saved(load_dataset(path)), saved(d));
  EXPECT_THROW(load_dataset(path + ".missing"), std::runtime_error);
}

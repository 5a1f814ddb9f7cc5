#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace dlmcol;
using namespace testing_support;

namespace {

Coloring permute_colors(const Coloring& s, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(s.k()));
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> a(static_cast<std::size_t>(s.size()));
  for (int v = 0; v < s.size(); ++v) a[static_cast<std::size_t>(v)] = perm[static_cast<std::size_t>(s[v])];
  return Coloring(a, s.k());
}

std::vector<Coloring> random_batch(int count, int n, int k, Rng& rng) {
  std::vector<Coloring> out;
  for (int i = 0; i < count; ++i) out.push_back(random_coloring(n, k, rng));
  return out;
}

// Warm the running statistics so eval mode is not the identity normalization.
void warm_up(SurrogateNet<double>& net, const std::vector<Coloring>& batch) {
  std::vector<double> t(batch.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::sin(static_cast<double>(i));
  for (int r = 0; r < 5; ++r) net.train_step(batch, t);
}

double train_loss(SurrogateNet<double>& net, const std::vector<Coloring>& batch, const std::vector<double>& targets) {
  std::vector<double> d;
  return SurrogateNet<double>::mse(net.forward(batch, NetMode::train), targets, d);
}

}  // namespace

TEST(Widths, Schedules) {
  EXPECT_EQ(hidden_widths(NetSchedule::small, 10), (std::vector<int>{20, 10, 5}));
  EXPECT_EQ(hidden_widths(NetSchedule::paper_wvcp, 10), (std::vector<int>{50, 20, 10, 5}));
  EXPECT_EQ(hidden_widths(NetSchedule::paper_col, 10).size(), 9u);
  EXPECT_EQ(hidden_widths(NetSchedule::small, 1), (std::vector<int>{2, 1, 1}));
}

TEST(Surrogate, PermutationInvariance) {
  Rng rng = test_rng(1);
  const int n = 20, k = 6;
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), {}, 7);
  warm_up(net, random_batch(32, n, k, rng));
  const auto batch = random_batch(100, n, k, rng);
  std::vector<Coloring> permuted;
  for (const auto& s : batch) permuted.push_back(permute_colors(s, rng));
  for (auto mode : {NetMode::eval, NetMode::train}) {
    const auto a = net.forward(batch, mode), b = net.forward(permuted, mode);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-6);
  }
}

TEST(Surrogate, ZeroParametersGiveZero) {
  Rng rng = test_rng(2);
  SurrogateNet<double> net(8, 3, std::vector<int>{6, 4}, {}, 1);
  for (auto& l : net.layers()) {
    l.lambda.value.setZero();
    l.gamma.value.setZero();
    l.beta.value.setZero();
  }
  for (double y : net.forward(random_batch(10, 8, 3, rng), NetMode::eval)) EXPECT_EQ(y, 0.0);
}

TEST(Surrogate, SingleLinearLayerAveragesRows) {
  const int n = 6, k = 3;
  SurrogateNet<double> net(n, k, std::vector<LayerSpec>{{n, 1, false, false}}, {}, 1);
  auto& l = net.layers()[0];
  l.lambda.value.setConstant(1.0 / n);
  l.gamma.value.setZero();
  l.beta.value.setZero();
  // each group row is a 0/1 indicator; its mean is |group| / n
  const Coloring s({0, 0, 0, 0, 1, 2}, 3);
  const double expected = ((4.0 / n) + (1.0 / n) + (1.0 / n)) / k;
  EXPECT_NEAR(net.forward(std::vector<Coloring>{s}, NetMode::eval)[0], expected, 1e-12);
}

class GradientCheck : public ::testing::TestWithParam<bool> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const int n = 6, k = 3;
  Rng rng = test_rng(3);
  SurrogateHyper hyper;
  hyper.scalar_bn_affine = GetParam();
  SurrogateNet<double> net(n, k, std::vector<int>{5, 4}, hyper, 11);
  // move BN affine parameters off their defaults so every path is exercised
  for (auto& l : net.layers()) {
    for (Eigen::Index j = 0; j < l.bn_scale.value.cols(); ++j) {
      l.bn_scale.value(0, j) = 0.5 + rng.uniform01();
      l.bn_shift.value(0, j) = rng.uniform01() - 0.5;
    }
  }
  const auto batch = random_batch(4, n, k, rng);
  std::vector<double> targets;
  for (int i = 0; i < 4; ++i) targets.push_back(rng.uniform01() * 2 - 1);

  SurrogateNet<double>::Cache cache;
  const auto out = net.forward(batch, NetMode::train, &cache);
  std::vector<double> d_out;
  SurrogateNet<double>::mse(out, targets, d_out);
  net.backward(cache, d_out);

  const double h = 1e-6;
  double worst = 0;
  int checked = 0;
  net.for_each_param([&](SurrogateNet<double>::Param& p) {
    for (Eigen::Index i = 0; i < p.value.rows(); ++i)
      for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
        const double keep = p.value(i, j);
        p.value(i, j) = keep + h;
        const double up = train_loss(net, batch, targets);
        p.value(i, j) = keep - h;
        const double down = train_loss(net, batch, targets);
        p.value(i, j) = keep;
        const double numeric = (up - down) / (2 * h);
        const double analytic = p.grad(i, j);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-4});
        worst = std::max(worst, std::abs(numeric - analytic) / scale);
        ++checked;
      }
  });
  EXPECT_GT(checked, 50);
  EXPECT_LE(worst, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AffineModes, GradientCheck, ::testing::Values(false, true));

TEST(Surrogate, RunningStatisticsFollowMomentum) {
  const int n = 7, k = 3;
  Rng rng = test_rng(4);
  SurrogateNet<double> net(n, k, std::vector<int>{5}, {}, 2);
  const auto batch = random_batch(6, n, k, rng);
  SurrogateNet<double>::Cache cache;
  net.forward(batch, NetMode::train, &cache);
  const auto before_mean = net.layers()[0].running_mean;
  const auto before_var = net.layers()[0].running_var;
  net.forward(batch, NetMode::eval);
  EXPECT_EQ(net.layers()[0].running_mean, before_mean);  // forward alone never updates
  net.train_step(batch, std::vector<double>(6, 0.5));
  const double rows = 6.0 * k;
  for (Eigen::Index j = 0; j < 5; ++j) {
    EXPECT_NEAR(net.layers()[0].running_mean(j), 0.9 * before_mean(j) + 0.1 * cache.mean[0](j), 1e-12);
    EXPECT_NEAR(net.layers()[0].running_var(j), 0.9 * before_var(j) + 0.1 * cache.var[0](j) * rows / (rows - 1), 1e-12);
  }
}

TEST(Surrogate, BatchStatisticsPoolGroups) {
  const int n = 5, k = 4;
  Rng rng = test_rng(5);
  SurrogateNet<double> net(n, k, std::vector<int>{3}, {}, 2);
  const auto batch = random_batch(3, n, k, rng);
  SurrogateNet<double>::Cache cache;
  net.forward(batch, NetMode::train, &cache);
  // z rows recomputed by hand: sum of Lambda rows of the group + avg * Gamma + beta
  const auto& l = net.layers()[0];
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
  for (const auto& s : batch) {
    Eigen::RowVectorXd avg = Eigen::RowVectorXd::Constant(n, 1.0 / k);
    for (int c = 0; c < k; ++c) {
      Eigen::RowVectorXd z = avg * l.gamma.value + l.beta.value.row(0);
      for (int v = 0; v < n; ++v)
        if (s[v] == c) z += l.lambda.value.row(v);
      mean += z;
    }
  }
  mean /= 3.0 * k;
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(cache.mean[0](j), mean(j), 1e-12);
}

TEST(Training, SelfDistillationHalvesLoss) {
  const int n = 12, k = 4;
  Rng rng = test_rng(6);
  SurrogateNet<double> teacher(n, k, hidden_widths(NetSchedule::small, n), {}, 100);
  TrainingSet data;
  data.inputs = random_batch(200, n, k, rng);
  const auto t = teacher.forward(data.inputs, NetMode::eval);
  data.targets.assign(t.begin(), t.end());
  SurrogateHyper hyper;
  hyper.epochs = 20;
  hyper.batch_size = 20;
  SurrogateNet<double> student(n, k, hidden_widths(NetSchedule::small, n), hyper, 200);
  Rng train_rng = test_rng(7);
  const auto report = student.train_generation(data, train_rng);
  ASSERT_EQ(report.epoch_loss.size(), 20u);
  EXPECT_FALSE(report.aborted);
  EXPECT_LE(report.epoch_loss.back(), 0.5 * report.epoch_loss.front());
}

TEST(Training, ConstantTargets) {
  const int n = 10, k = 3;
  Rng rng = test_rng(8);
  TrainingSet data;
  data.inputs = random_batch(100, n, k, rng);
  data.targets.assign(100, 42.0);
  SurrogateHyper hyper;
  hyper.epochs = 300;
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), hyper, 3);
  Rng train_rng = test_rng(9);
  const auto report = net.train_generation(data, train_rng);
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
  EXPECT_LT(report.epoch_loss.back(), 1e-2);
  // eval mode runs on running statistics, so allow a little slack
  for (double y : net.predict_batch(random_batch(20, n, k, rng))) EXPECT_NEAR(y, 42.0, 1.0);
}

TEST(Training, NonFiniteLossRestoresParameters) {
  const int n = 6, k = 2;
  Rng rng = test_rng(10);
  TrainingSet data;
  data.inputs = random_batch(10, n, k, rng);
  data.targets.assign(10, 1.0);
  data.targets[3] = std::numeric_limits<double>::quiet_NaN();
  SurrogateNet<double> net(n, k, std::vector<int>{4}, {}, 3);
  std::ostringstream before, after;
  net.save(before);
  Rng train_rng = test_rng(11);
  const auto report = net.train_generation(data, train_rng);
  EXPECT_TRUE(report.aborted);
  net.save(after);
  EXPECT_EQ(before.str(), after.str());
}

TEST(Prediction, IdenticalAndPermutedCandidates) {
  const int n = 15, k = 5;
  Rng rng = test_rng(12);
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), {}, 4);
  warm_up(net, random_batch(20, n, k, rng));
  const auto s = random_coloring(n, k, rng);
  const auto twin = permute_colors(s, rng);
  const auto y = net.predict_batch(std::vector<Coloring>{s, s, twin});
  // batch position can change vectorized summation order by an ulp
  EXPECT_NEAR(y[0], y[1], 1e-12);
  EXPECT_NEAR(y[0], y[2], 1e-6);
  EXPECT_EQ(net.predict_batch(std::vector<Coloring>{s})[0], net.predict_batch(std::vector<Coloring>{s})[0]);
}

TEST(Prediction, UntrainedOutputsAreFinite) {
  const int n = 30, k = 8;
  Rng rng = test_rng(13);
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), {}, 5);
  for (double y : net.predict_batch(random_batch(1000, n, k, rng))) ASSERT_TRUE(std::isfinite(y));
}

TEST(Prediction, ThreadCountDoesNotMatter) {
  const int n = 10, k = 4;
  Rng rng = test_rng(14);
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), {}, 5);
  warm_up(net, random_batch(16, n, k, rng));
  const auto batch = random_batch(300, n, k, rng);
  EXPECT_EQ(net.predict_batch(batch, 1), net.predict_batch(batch, 4));
}

TEST(Prediction, RejectsWrongShape) {
  SurrogateNet<double> net(5, 3, std::vector<int>{4}, {}, 5);
  EXPECT_THROW(net.forward(std::vector<Coloring>{Coloring({0, 1, 0, 1}, 3)}, NetMode::eval), std::invalid_argument);
  EXPECT_THROW(net.forward(std::vector<Coloring>{Coloring({0, 1, 0, 1, 0}, 2)}, NetMode::eval), std::invalid_argument);
}

TEST(Checkpoint, RoundTripContinuesIdentically) {
  const int n = 9, k = 3;
  Rng rng = test_rng(15);
  TrainingSet data;
  data.inputs = random_batch(50, n, k, rng);
  for (int i = 0; i < 50; ++i) data.targets.push_back(rng.uniform01() * 10);
  SurrogateHyper hyper;
  hyper.epochs = 3;
  hyper.batch_size = 16;
  SurrogateNet<double> net(n, k, hidden_widths(NetSchedule::small, n), hyper, 6);
  Rng r1 = test_rng(16);
  net.train_generation(data, r1);

  std::stringstream buf;
  net.save(buf);
  auto copy = SurrogateNet<double>::load(buf);
  const auto probe = random_batch(10, n, k, rng);
  EXPECT_EQ(net.predict_batch(probe), copy.predict_batch(probe));
  EXPECT_EQ(copy.adam_steps(), net.adam_steps());

  Rng r2 = test_rng(17), r3 = test_rng(17);
  net.train_generation(data, r2);
  copy.train_generation(data, r3);
  EXPECT_EQ(net.predict_batch(probe), copy.predict_batch(probe));
}

TEST(Checkpoint, RejectsGarbage) {
  std::istringstream bad("something else");
  EXPECT_THROW(SurrogateNet<double>::load(bad), std::runtime_error);
}

TEST(Surrogate, SinglePrecisionRuns) {
  Rng rng = test_rng(18);
  SurrogateNet<float> net(8, 3, std::vector<int>{6}, {}, 1);
  const auto batch = random_batch(5, 8, 3, rng);
  for (double y : net.predict_batch(batch)) EXPECT_TRUE(std::isfinite(y));
  EXPECT_TRUE(std::isfinite(net.train_step(batch, std::vector<float>(5, 1.0f))));
}

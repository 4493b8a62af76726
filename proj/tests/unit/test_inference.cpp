#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/inference.hpp"
#include "ccmfbm/operators.hpp"
#include "ccmfbm/simulation.hpp"
#include "ccmfbm/verify/oracles.hpp"

using namespace ccmfbm;

namespace {

const SeriesSpec kSeries{1e-10, 400};

std::vector<SamplePath> mg_paths(const ModelParams& p, double horizon, int n, int count,
                                 std::uint64_t seed, double theta = 0.0) {
  SimConfig cfg{.params = p, .grid = TimeGrid(horizon, n), .n_paths = count, .seed = seed,
                .scheme = Scheme::mg_approx};
  if (theta != 0.0) {
    cfg.drift_model = DriftModel::driving_noise;
    cfg.theta = theta;
  }
  return simulate(cfg);
}

struct Stats {
  double mean;
  double var;
  double se;
};

Stats stats(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = ss / (n - 1);
  return {mean, var, std::sqrt(var / n)};
}

SamplePath zero_path(const TimeGrid& g) {
  return SamplePath{g, std::vector<double>(g.steps() + 1, 0.0), {}, {}, {}};
}

}  // namespace

TEST_CASE("drift log-likelihood is a quadratic in theta maximised at w_T / T") {
  const ModelParams p(1.0, 1.0, 0.75);
  const auto path = mg_paths(p, 2.0, 64, 1, 3)[0];
  const DriftEstimator est(p, path.grid, kSeries);
  const double w = est.terminal_bm(path);
  CHECK(est.log_likelihood(path, {0.0}) == 0.0);
  for (double theta : {-1.5, 0.3, 2.0})
    CHECK(est.log_likelihood(path, {theta}) == doctest::Approx(theta * w - theta * theta).epsilon(1e-13));
  const double mle = est.mle(path);
  CHECK(mle == doctest::Approx(w / 2.0).epsilon(1e-14));
  CHECK(est.log_likelihood(path, {mle}) >= est.log_likelihood(path, {mle + 1e-3}));
  CHECK(est.log_likelihood(path, {mle}) >= est.log_likelihood(path, {mle - 1e-3}));
  CHECK(drift_log_likelihood(path, {0.7}, p, kSeries) == doctest::Approx(est.log_likelihood(path, {0.7})).epsilon(1e-13));
  CHECK(drift_mle(path, p, kSeries) == doctest::Approx(mle).epsilon(1e-13));
}

TEST_CASE("drift MLE is linear in the observation and vanishes on the zero path") {
  const ModelParams p(1.0, 0.6, 0.8);
  const auto paths = mg_paths(p, 1.0, 48, 2, 9);
  const DriftEstimator est(p, paths[0].grid, kSeries);
  CHECK(est.mle(zero_path(paths[0].grid)) == 0.0);
  SamplePath sum = paths[0];
  for (std::size_t k = 0; k < sum.x.size(); ++k) sum.x[k] += 3.0 * paths[1].x[k];
  CHECK(est.mle(sum) == doctest::Approx(est.mle(paths[0]) + 3.0 * est.mle(paths[1])).epsilon(1e-12));
}

TEST_CASE("likelihood ratio of theta = 1 against theta = 0 under the driving-noise model") {
  // theta w_T - T/2 > 0 iff W_T + T > T/2, probability Phi(sqrt(T)/2).
  const ModelParams p(1.0, 1.0, 0.75);
  const auto paths = mg_paths(p, 5.0, 256, 500, 41, 1.0);
  const DriftEstimator est(p, paths[0].grid, kSeries);
  int wins = 0;
  for (const auto& path : paths) wins += est.log_likelihood(path, {1.0}) > est.log_likelihood(path, {0.0});
  const double expected = boost::math::cdf(boost::math::normal(), std::sqrt(5.0) / 2.0);
  const double se = std::sqrt(expected * (1 - expected) / 500);
  CHECK(std::abs(wins / 500.0 - expected) < 3 * se);
}

TEST_CASE("drift MLE on driftless paths") {
  const ModelParams p(1.0, 1.0, 0.75);
  const auto paths = mg_paths(p, 5.0, 256, 1000, 13);
  const DriftEstimator est(p, paths[0].grid, kSeries);
  std::vector<double> thetas;
  for (const auto& path : paths) thetas.push_back(est.mle(path));
  const Stats s = stats(thetas);
  CHECK(std::abs(s.mean) < 3 * s.se);
  CHECK(std::abs(s.var / 0.2 - 1.0) < 0.2);
}

TEST_CASE("Girsanov log-likelihood special cases") {
  const TimeGrid g(1.0, 32);
  const ModelParams bm = ModelParams::unchecked(1.0, 0.0, 0.5);
  const auto path = simulate_cholesky(
      SimConfig{.params = bm, .grid = g, .n_paths = 1, .seed = 4, .scheme = Scheme::cholesky})[0];
  const TriangularKernel zero(g);
  CHECK(girsanov_log_likelihood(path, {zero, SampledFunction(g, std::vector<double>(32, 0.0))}) == 0.0);
  const double wt = (*path.w).back();
  for (double theta : {-0.4, 1.2}) {
    const EquivalenceSpec spec{zero, SampledFunction(g, std::vector<double>(32, theta))};
    CHECK(girsanov_log_likelihood(path, spec) == doctest::Approx(theta * wt - theta * theta / 2).epsilon(1e-12));
  }
  const EquivalenceSpec other{TriangularKernel(TimeGrid(1.0, 16)),
                              SampledFunction(TimeGrid(1.0, 16), std::vector<double>(16, 0.0))};
  CHECK_THROWS_AS(girsanov_log_likelihood(path, other), DomainError);
  CHECK_THROWS_AS((EquivalenceSpec{zero, SampledFunction(TimeGrid(1.0, 16), std::vector<double>(16, 0.0))}.validate()),
                  DomainError);
}

TEST_CASE("Girsanov density has unit mean for a pure Volterra kernel and for a pure drift") {
  const TimeGrid g(1.0, 32);
  const ModelParams bm = ModelParams::unchecked(1.0, 0.0, 0.5);
  const auto paths = simulate_cholesky(
      SimConfig{.params = bm, .grid = g, .n_paths = 20000, .seed = 8, .scheme = Scheme::cholesky});
  const std::vector<EquivalenceSpec> specs{
      {sample_kernel(g, [](double t, double s) { return 0.5 * (t - s) - 0.3; }),
       SampledFunction(g, std::vector<double>(32, 0.0))},
      {TriangularKernel(g), SampledFunction::from_function(g, [](double t) { return std::sin(2 * t); })},
  };
  for (const auto& spec : specs) {
    std::vector<double> ratio;
    for (const auto& path : paths) ratio.push_back(std::exp(girsanov_log_likelihood(path, spec)));
    const Stats s = stats(ratio);
    CHECK(std::abs(s.mean - 1.0) < 3 * s.se);
  }
}

TEST_CASE("prediction at the observation horizon is degenerate") {
  const ModelParams p(1.0, 1.0, 0.75);
  const auto path = mg_paths(p, 1.0, 64, 1, 2)[0];
  const auto r = predict(path, p, 0.5, {0.5, 0.75}, kSeries);
  CHECK(r.mean[0] == doctest::Approx(path.x[32]).epsilon(1e-12));
  CHECK(std::abs(r.cov(0, 0)) < 1e-12);
  CHECK(std::abs(r.cov(0, 1)) < 1e-12);
  CHECK(r.cov(1, 1) > 0.0);
}

TEST_CASE("prediction of a Brownian motion is a martingale") {
  const ModelParams bm = ModelParams::unchecked(1.5, 0.0, 0.75);
  const TimeGrid g(1.0, 40);
  const auto path = simulate_cholesky(
      SimConfig{.params = bm, .grid = g, .n_paths = 1, .seed = 6, .scheme = Scheme::cholesky})[0];
  const std::vector<double> targets{0.5, 0.7, 1.0};
  const auto r = predict(path, bm, 0.25, targets, kSeries);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.mean[i] == doctest::Approx(path.x[10]).epsilon(1e-12));
    for (int j = 0; j < 3; ++j)
      CHECK(r.cov(i, j) == doctest::Approx(2.25 * (std::min(targets[i], targets[j]) - 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("prediction matches Gaussian conditioning on the grid") {
  const ModelParams p(1.0, 1.0, 0.75);
  const std::vector<double> targets{0.6, 0.8, 1.0};
  const TimeGrid g(1.0, 128);
  const Predictor pred(p, g, 0.5, targets, kSeries);
  const auto oracle = verify::schur_conditioning(p, g, pred.observed_steps(), targets);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(pred.cov()(i, j) / oracle.cov(i, j) - 1.0) < 0.02);
  // Mean error measured in the norm the observed covariance induces on weight vectors.
  const Eigen::MatrixXd dw = pred.sample_weights() - oracle.weights;
  for (int i = 0; i < 3; ++i) {
    const double err = std::sqrt(dw.row(i) * oracle.observed_cov * dw.row(i).transpose());
    const double scale = std::sqrt(oracle.weights.row(i) * oracle.observed_cov * oracle.weights.row(i).transpose());
    CHECK(err / scale < 0.02);
  }
}

TEST_CASE("prediction covariance is path independent and bounded by the prior") {
  const ModelParams p(0.7, 0.6, 0.65);
  const TimeGrid g(1.0, 64);
  const std::vector<double> targets{0.5, 0.75, 1.0};
  const Predictor pred(p, g, 0.25, targets, kSeries);
  const auto paths = mg_paths(p, 1.0, 64, 2, 31);
  const auto r0 = pred.predict(paths[0]);
  const auto r1 = pred.predict(paths[1]);
  CHECK(r0.cov == r1.cov);
  CHECK(r0.mean != r1.mean);
  CHECK((r0.cov - r0.cov.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r0.cov);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  for (int i = 0; i < 3; ++i) CHECK(r0.cov(i, i) <= ccmfbm_cov(p, targets[i], targets[i]) + 1e-9);
}

TEST_CASE("predicted means average to zero and residuals carry the predicted variance") {
  const ModelParams p(1.0, 1.0, 0.75);
  const TimeGrid g(1.0, 64);
  const Predictor pred(p, g, 0.5, {0.75, 1.0}, kSeries);
  const auto paths = simulate_cholesky(
      SimConfig{.params = p, .grid = g, .n_paths = 4000, .seed = 19, .scheme = Scheme::cholesky});
  std::vector<double> means;
  std::vector<double> residuals;
  for (const auto& path : paths) {
    const auto r = pred.predict(path);
    means.push_back(r.mean[1]);
    residuals.push_back(path.x[64] - r.mean[1]);
  }
  const Stats m = stats(means);
  CHECK(std::abs(m.mean) < 3 * m.se);
  const Stats res = stats(residuals);
  CHECK(std::abs(res.mean) < 3 * res.se);
  const double var_se = pred.cov()(1, 1) * std::sqrt(2.0 / residuals.size());
  CHECK(std::abs(res.var - pred.cov()(1, 1)) < 4 * var_se);
}

TEST_CASE("prediction input validation") {
  const ModelParams p(1.0, 1.0, 0.75);
  const TimeGrid g(1.0, 16);
  CHECK_THROWS_AS(Predictor(p, g, 0.3, {0.5}), DomainError);
  CHECK_THROWS_AS(Predictor(p, g, 0.5, {0.25}), DomainError);
  CHECK_THROWS_AS(Predictor(p, g, 0.5, {1.5}), DomainError);
  CHECK_THROWS_AS(Predictor(p, g, 0.5, {}), DomainError);
  const Predictor pred(p, g, 0.5, {1.0});
  CHECK_THROWS_AS(pred.predict(zero_path(TimeGrid(1.0, 8))), DomainError);
}

TEST_CASE("inverse kernel mass") {
  CHECK(inverse_kernel_mass(ModelParams::unchecked(2.0, 0.0, 0.75), 1.5) == doctest::Approx(0.75).epsilon(1e-12));
  const double m = inverse_kernel_mass(ModelParams(1.0, 1.0, 0.75), 1.0, kSeries);
  CHECK(std::isfinite(m));
  CHECK(m > 0.0);
  CHECK(m < 1.0);
}

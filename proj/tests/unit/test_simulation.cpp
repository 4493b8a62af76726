#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/operators.hpp"
#include "ccmfbm/simulation.hpp"
#include "ccmfbm/verify/oracles.hpp"

using namespace ccmfbm;

namespace {

const SeriesSpec kSeries{1e-10, 400};

SimConfig config(const ModelParams& p, int n, int paths, std::uint64_t seed, Scheme scheme) {
  return SimConfig{.params = p, .grid = TimeGrid(1.0, n), .n_paths = paths, .seed = seed, .scheme = scheme};
}

std::vector<double> terminal_values(const std::vector<SamplePath>& paths) {
  std::vector<double> out;
  out.reserve(paths.size());
  for (const auto& path : paths) out.push_back(path.x.back());
  return out;
}

struct Moments {
  double mean;
  double var;
  double se_var;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return {mean, m2, std::sqrt((m4 - m2 * m2) / n)};
}

}  // namespace

TEST_CASE("every scheme is deterministic across runs and worker counts") {
  const ModelParams p(1.0, 2.0, 0.7);
  for (Scheme s : {Scheme::cholesky, Scheme::mg_approx, Scheme::series}) {
    SimConfig cfg = config(p, 64, 9, 42, s);
    cfg.series_terms = 16;
    setenv("CCMFBM_THREADS", "1", 1);
    const auto one = simulate(cfg);
    setenv("CCMFBM_THREADS", "3", 1);
    const auto three = simulate(cfg);
    unsetenv("CCMFBM_THREADS");
    const auto again = simulate(cfg);
    REQUIRE(one.size() == 9);
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].x == three[i].x);
      CHECK(one[i].x == again[i].x);
      CHECK(one[i].x.front() == 0.0);
    }
    cfg.seed = 43;
    CHECK(simulate(cfg)[0].x != one[0].x);
  }
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::cholesky, Scheme::mg_approx, Scheme::series})
    CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK_THROWS_AS(parse_scheme("fft"), DomainError);
}

TEST_CASE("Cholesky paths are a w + b bh") {
  const ModelParams p(0.4, 1.4, 0.6);
  const auto paths = simulate_cholesky(config(p, 100, 5, 1, Scheme::cholesky));
  for (const auto& path : paths) {
    REQUIRE(path.w);
    REQUIRE(path.bh);
    REQUIRE(path.xi);
    CHECK(path.xi->size() == 100);
    for (std::size_t k = 0; k < path.x.size(); ++k)
      CHECK(path.x[k] == doctest::Approx(0.4 * (*path.w)[k] + 1.4 * (*path.bh)[k]).epsilon(1e-15));
  }
}

TEST_CASE("without the fractional part both schemes give the same random walk") {
  const ModelParams bm = ModelParams::unchecked(1.3, 0.0, 0.75);
  const auto chol = simulate_cholesky(config(bm, 50, 3, 8, Scheme::cholesky));
  const auto mg = simulate_mg_approx(config(bm, 50, 3, 8, Scheme::mg_approx));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k <= 50; ++k) CHECK(mg[i].x[k] == doctest::Approx(1.3 * (*chol[i].w)[k]).epsilon(1e-13));

  // variance a^2 t_k at node k
  const auto many = simulate_cholesky(config(bm, 20, 20000, 2, Scheme::cholesky));
  for (int k : {5, 20}) {
    std::vector<double> v;
    for (const auto& path : many) v.push_back(path.x[k]);
    const Moments m = moments(v);
    CHECK(std::abs(m.var - 1.69 * k / 20.0) < 4 * m.se_var);
  }
}

TEST_CASE("mg_approx marginal variance at t = 1") {
  const ModelParams p(1.0, 1.0, 0.75);
  const double target = ccmfbm_cov(p, 1.0, 1.0);
  const TimeGrid g(1.0, 256);
  const auto m = build_forward_operator(p, g);
  CHECK(std::abs(m.matrix().row(255).squaredNorm() / 256.0 / target - 1.0) < 0.02);
  const Moments mc = moments(terminal_values(simulate_mg_approx(config(p, 256, 20000, 3, Scheme::mg_approx))));
  CHECK(std::abs(mc.var - target) < 4 * mc.se_var);
}

TEST_CASE("mg_approx and Cholesky terminal values pass a two-sample KS test") {
  const ModelParams p(1.0, 1.0, 0.75);
  const auto chol = terminal_values(simulate_cholesky(config(p, 256, 5000, 11, Scheme::cholesky)));
  const auto mg = terminal_values(simulate_mg_approx(config(p, 256, 5000, 12, Scheme::mg_approx)));
  CHECK(verify::ks_two_sample(chol, mg).p_value > 0.01);
}

TEST_CASE("one series term gives a rank-one process") {
  const ModelParams p(1.0, 1.0, 0.75);
  SimConfig cfg = config(p, 32, 4, 5, Scheme::series);
  cfg.series_terms = 1;
  const auto paths = simulate_series(cfg);
  const Eigen::MatrixXd e = series_functions(p, cfg.grid, 1);
  for (const auto& path : paths) {
    const double scale = path.x[32] / e(31, 0);
    for (int k = 1; k <= 32; ++k) CHECK(path.x[k] == doctest::Approx(scale * e(k - 1, 0)).epsilon(1e-12));
  }
}

TEST_CASE("series variance increases toward the covariance") {
  const ModelParams p(1.0, 1.0, 0.75);
  const TimeGrid g(1.0, 128);
  const Eigen::MatrixXd e = series_functions(p, g, 128);
  double prev = 0.0;
  bool monotone = true;
  for (int k = 0; k < 128; ++k) {
    const double partial = e.row(63).head(k + 1).squaredNorm();
    monotone = monotone && partial >= prev;
    prev = partial;
  }
  CHECK(monotone);
  const double target = ccmfbm_cov(p, 0.5, 0.5);
  CHECK(prev <= target * (1 + 1e-6));
  CHECK(std::abs(prev / target - 1.0) < 0.05);
}

TEST_CASE("recover_bm without the fractional part divides by a") {
  const ModelParams bm = ModelParams::unchecked(2.0, 0.0, 0.75);
  const auto path = simulate_cholesky(config(bm, 40, 1, 3, Scheme::cholesky))[0];
  const auto rec = recover_bm(path, bm);
  REQUIRE(rec.w);
  for (int k = 0; k <= 40; ++k) CHECK((*rec.w)[k] == doctest::Approx(path.x[k] / 2.0).epsilon(1e-13));
}

TEST_CASE("recovered increments track the driving noise") {
  const ModelParams p(1.0, 1.0, 0.75);
  const auto paths = simulate_mg_approx(config(p, 128, 3, 21, Scheme::mg_approx));
  const auto minv = build_inverse_operator(p, TimeGrid(1.0, 128), kSeries);
  for (const auto& path : paths) {
    const auto rec = recover_bm(path, minv);
    for (int k = 1; k <= 128; ++k) {
      const double dw = (*rec.w)[k] - (*rec.w)[k - 1];
      CHECK(std::abs(dw - (*path.xi)[k - 1] / std::sqrt(128.0)) < 0.02);
    }
  }
}

TEST_CASE("recovered Brownian motion has quadratic variation T" * doctest::skip()) {
  // Builds both operators on 4096 cells: several minutes on one core.
  const ModelParams p(1.0, 1.0, 0.75);
  const int n = 4096;
  const auto minv = build_inverse_operator(p, TimeGrid(1.0, n), kSeries);
  auto mean_qv = [&](Scheme scheme) {
    const auto paths = simulate(config(p, n, 4, 77, scheme));
    double sum = 0.0;
    for (const auto& path : paths) {
      const SamplePath w{path.grid, *recover_bm(path, minv).w, {}, {}, {}};
      sum += quadratic_variation(w).back();
    }
    return sum / 4.0;
  };
  for (Scheme scheme : {Scheme::cholesky, Scheme::mg_approx}) {
    const double qv = mean_qv(scheme);
    MESSAGE(scheme_name(scheme) << ": mean recovered QV " << qv);
    CHECK(std::abs(qv - 1.0) < 0.05);
  }
}

TEST_CASE("quadratic variation of smooth and Brownian paths") {
  for (int n : {16, 256}) {
    const TimeGrid g(1.0, n);
    SamplePath line{g, g.nodes(), {}, {}, {}};
    const auto qv = quadratic_variation(line);
    CHECK(qv.size() == static_cast<std::size_t>(n + 1));
    CHECK(qv.front() == 0.0);
    CHECK(qv.back() == doctest::Approx(1.0 / n).epsilon(1e-12));
  }
  const ModelParams bm = ModelParams::unchecked(1.5, 0.0, 0.75);
  const auto path = simulate_cholesky(config(bm, 20000, 1, 4, Scheme::cholesky))[0];
  CHECK(quadratic_variation(path).back() == doctest::Approx(2.25).epsilon(0.05));
}

TEST_CASE("Holder diagnostic") {
  for (const auto& row : holder_diagnostic(ModelParams::unchecked(2.0, 0.0, 0.75), {0.1, 0.01, 0.001}))
    CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
  const auto rows = holder_diagnostic(ModelParams(1.0, 1.0, 0.75), {0.1, 0.01, 0.001});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].delta == 0.1);
  CHECK_THROWS_AS(holder_diagnostic(ModelParams(1.0, 1.0, 0.75), {0.01, 0.1}), DomainError);
  CHECK_THROWS_AS(holder_diagnostic(ModelParams(1.0, 1.0, 0.75), {0.1, -0.01}), DomainError);
}

TEST_CASE("configuration validation") {
  const ModelParams p(1.0, 1.0, 0.75);
  SimConfig cfg = config(p, 16, 0, 1, Scheme::cholesky);
  CHECK_THROWS_AS(simulate(cfg), DomainError);
  cfg = config(p, 16, 1, 1, Scheme::cholesky);
  cfg.drift_model = DriftModel::driving_noise;
  cfg.theta = 1.0;
  CHECK_THROWS_AS(simulate(cfg), DomainError);
}

TEST_CASE("drift models shift the path") {
  const ModelParams p(1.0, 1.0, 0.75);
  SimConfig cfg = config(p, 32, 2, 6, Scheme::mg_approx);
  const auto base = simulate(cfg);
  cfg.drift_model = DriftModel::observation;
  cfg.theta = 0.5;
  const auto shifted = simulate(cfg);
  for (int k = 0; k <= 32; ++k) CHECK(shifted[1].x[k] == doctest::Approx(base[1].x[k] + 0.5 * k / 32.0).epsilon(1e-13));
  cfg.drift_model = DriftModel::driving_noise;
  const auto driven = simulate(cfg);
  REQUIRE(driven[0].w);
  for (int k = 0; k <= 32; ++k) CHECK((*driven[0].w)[k] == doctest::Approx((*base[0].w)[k] + 0.5 * k / 32.0).epsilon(1e-13));
}

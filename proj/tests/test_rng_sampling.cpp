#include <doctest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "sampling.hpp"

using namespace driftwatch;

TEST_CASE("rng streams are deterministic and substream-distinct") {
  RngStream a(99, 5), b(99, 5), c(99, 6);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next_u64();
    const std::uint64_t y = b.next_u64();
    const std::uint64_t z = c.next_u64();
    all_equal = all_equal && (x == y);
    any_equal_c = any_equal_c || (x == z);
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);

  RngStream d(99, 5), e(99, 5);
  for (int i = 0; i < 200; ++i) CHECK(d.normal() == e.normal());
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
  RngStream rng(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300946).epsilon(1e-12));
  CHECK(normal_cdf(-1.5) == doctest::Approx(0.0668072012688581).epsilon(1e-12));
}

TEST_CASE("gamma and chi-square moments") {
  RngStream rng(4, 0);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma(2.5);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.5).epsilon(0.01));
  CHECK(var == doctest::Approx(2.5).epsilon(0.03));

  double csum = 0.0;
  for (int i = 0; i < n; ++i) csum += rng.chi_square(5.0);
  CHECK(csum / n == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("structured covariance matches hand arithmetic at p=3") {
  const CovarianceMatrix c = covariance_structured(3, 0.5);
  // sigma = (0.5, 1.0, 1.5)
  CHECK(c.entries(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.entries(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.entries(0, 2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.entries(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.entries(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.entries(2, 2) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK_THROWS_AS(covariance_structured(1, 0.5), Error);
}

TEST_CASE("structured covariance diagonal and factorization across p") {
  for (int p = 2; p <= 100; p += 7) {
    const CovarianceMatrix c = covariance_structured(p, 0.5);
    for (int i = 0; i < p; ++i) {
      const double sigma = 0.5 + static_cast<double>(i) / (p - 1);
      CHECK(c.entries(i, i) == doctest::Approx(sigma * sigma).epsilon(1e-12));
    }
    const Matrix lower = cholesky_lower(c.entries);
    // reconstruction oracle
    double max_err = 0.0;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (int k = 0; k <= j; ++k) s += lower(i, k) * lower(j, k);
        max_err = std::max(max_err, std::fabs(s - c.entries(i, j)));
      }
    }
    CHECK(max_err <= 1e-9);
  }
}

TEST_CASE("correlation standardization") {
  Matrix diag(3);
  diag(0, 0) = 4.0;
  diag(1, 1) = 9.0;
  diag(2, 2) = 16.0;
  const CorrelationMatrix ident = correlation_from_covariance({diag});
  CHECK(ident.entries == Matrix::identity(3));

  const CovarianceMatrix c = covariance_structured(6, 0.5);
  const CorrelationMatrix r = correlation_from_covariance(c);
  for (int i = 0; i < 6; ++i) {
    CHECK(r.entries(i, i) == 1.0);
    for (int j = 0; j < 6; ++j) {
      const double expected = static_cast<double>(std::min(i, j) + 1) /
                              static_cast<double>(std::max(i, j) + 1);
      CHECK(r.entries(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  Matrix bad(2);
  bad(0, 0) = 1.0;
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(correlation_from_covariance({bad}), Error);
}

TEST_CASE("cholesky identity, reconstruction, and failure") {
  const Matrix eye = Matrix::identity(4);
  CHECK(cholesky_lower(eye) == eye);

  const CovarianceMatrix c = covariance_structured(3, 0.5);
  const Matrix lower = cholesky_lower(c.entries);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += lower(i, k) * lower(j, k);
      CHECK(std::fabs(s - c.entries(i, j)) < 1e-12);
    }

  Matrix indefinite(2);
  indefinite(0, 0) = 1.0;
  indefinite(0, 1) = 2.0;
  indefinite(1, 0) = 2.0;
  indefinite(1, 1) = 1.0;
  bool not_pd = false;
  try {
    cholesky_lower(indefinite);
  } catch (const Error& e) {
    not_pd = e.code() == ErrorCode::NotPositiveDefinite;
  }
  CHECK(not_pd);
}

TEST_CASE("random correlation matrices are valid and concentrate at high alpha_d") {
  RngStream rng(21, 0);
  for (int draw = 0; draw < 1000; ++draw) {
    const CorrelationMatrix r = random_correlation(5, 1.5, rng);
    for (int i = 0; i < 5; ++i) {
      CHECK(r.entries(i, i) == 1.0);
      for (int j = 0; j < i; ++j) CHECK(r.entries(i, j) == r.entries(j, i));
    }
    CHECK_NOTHROW(cholesky_lower(r.entries));
  }

  RngStream rng2(22, 0);
  double mean_abs = 0.0;
  int count = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const CorrelationMatrix r = random_correlation(5, 1e6, rng2);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < i; ++j) {
        mean_abs += std::fabs(r.entries(i, j));
        ++count;
      }
  }
  CHECK(mean_abs / count < 0.01);

  RngStream rng3(23, 0), rng4(23, 0);
  CHECK(random_correlation(8, 1.5, rng3).entries ==
        random_correlation(8, 1.5, rng4).entries);
}

TEST_CASE("random pd covariance keeps variances in range") {
  RngStream rng(24, 0);
  const RandomCovarianceSpec case1{8, 0.1, 0.5, 1.5};
  const RandomCovarianceSpec case2{8, 1.5, 2.5, 1.5};
  for (int draw = 0; draw < 1000; ++draw) {
    const CovarianceMatrix c = random_pd_covariance(case1, rng);
    for (int i = 0; i < 8; ++i) {
      CHECK(c.entries(i, i) >= 0.1);
      CHECK(c.entries(i, i) <= 0.5);
      for (int j = 0; j < i; ++j) CHECK(c.entries(i, j) == c.entries(j, i));
    }
    CHECK_NOTHROW(cholesky_lower(c.entries));
  }
  const CovarianceMatrix c2 = random_pd_covariance(case2, rng);
  for (int i = 0; i < 8; ++i) {
    CHECK(c2.entries(i, i) >= 1.5);
    CHECK(c2.entries(i, i) <= 2.5);
  }
}

TEST_CASE("degenerate normal sampler returns the mean exactly") {
  NormalSpec spec;
  spec.mean = {2.0, -3.0, 7.0};
  spec.cov = CovarianceMatrix{Matrix(3)};
  Sampler sampler{DistributionSpec{spec}};
  RngStream rng(25, 0);
  const Observation y = sampler.sample(rng);
  CHECK(y == spec.mean);
}

TEST_CASE("normal sampler dimension mismatch is rejected") {
  NormalSpec spec;
  spec.mean = {0.0, 0.0};
  spec.cov = covariance_structured(3, 0.5);
  CHECK_THROWS_AS(Sampler{DistributionSpec{spec}}, Error);
}

TEST_CASE("clayton copula reproduces the closed-form kendall tau") {
  // xi = 1 gives tau = 1/3; estimated from disjoint pairs of bivariate draws
  ExponentialCopulaSpec spec{ClaytonCopula{1.0}, {1.0, 1.0}};
  Sampler sampler{DistributionSpec{spec}};
  RngStream rng(26, 0);
  const int pairs = 100000;
  std::vector<double> x(2 * pairs), y(2 * pairs);
  for (int i = 0; i < 2 * pairs; ++i) {
    const Observation obs = sampler.sample(rng);
    x[i] = obs[0];
    y[i] = obs[1];
  }
  const double tau = oracles::kendall_tau_disjoint_pairs(x, y);
  CHECK(std::fabs(tau - 1.0 / 3.0) <= 0.01);
}

TEST_CASE("gaussian copula with identity correlation gives independent exponentials") {
  ExponentialCopulaSpec spec{GaussianCopula{CorrelationMatrix{Matrix::identity(2)}},
                             {1.0, 1.0}};
  Sampler sampler{DistributionSpec{spec}};
  RngStream rng(27, 0);
  const int n = 100000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const Observation obs = sampler.sample(rng);
    a[i] = obs[0];
    b[i] = obs[1];
  }
  CHECK(oracles::mean(a) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(oracles::mean(b) == doctest::Approx(1.0).epsilon(0.01));
  const double ma = oracles::mean(a), mb = oracles::mean(b);
  double cov = 0.0;
  for (int i = 0; i < n; ++i) cov += (a[i] - ma) * (b[i] - mb);
  cov /= n;
  const double corr = cov / (oracles::sample_sd(a) * oracles::sample_sd(b));
  CHECK(std::fabs(corr) <= 0.02);
}

TEST_CASE("copula marginals pass a KS test against the exponential law") {
  const std::vector<double> rates{1.0, 2.0, 0.5};
  const int n = 100000;
  const double crit = oracles::ks_critical_value(n, 0.01);

  auto check_marginals = [&](DistributionSpec spec, std::uint64_t seed) {
    Sampler sampler{std::move(spec)};
    RngStream rng(seed, 0);
    std::vector<std::vector<double>> coords(3);
    for (auto& c : coords) c.reserve(n);
    for (int i = 0; i < n; ++i) {
      const Observation obs = sampler.sample(rng);
      for (int j = 0; j < 3; ++j) coords[j].push_back(obs[j]);
    }
    for (int j = 0; j < 3; ++j) {
      const double rate = rates[j];
      const double d = oracles::ks_statistic_one_sample(
          coords[j], [rate](double x) { return 1.0 - std::exp(-rate * x); });
      CHECK(d < crit);
    }
  };

  check_marginals(
      ExponentialCopulaSpec{
          GaussianCopula{correlation_from_covariance(covariance_structured(3, 0.5))},
          rates},
      28);
  check_marginals(ExponentialCopulaSpec{ClaytonCopula{1.0}, rates}, 29);
}

TEST_CASE("norm_stream length contract and uniform range") {
  RngStream rng(30, 0);
  CHECK_THROWS_AS(norm_stream(UniformNormsSpec{}, 0, rng), Error);
  const auto norms = norm_stream(UniformNormsSpec{}, 5, rng);
  REQUIRE(norms.size() == 5);
  for (double d : norms) {
    CHECK(d > 0.0);
    CHECK(d < 1.0);
  }
}

TEST_CASE("window statistics are distribution-free across sources") {
  // T_1 populations from uniform norms and from p=25 normal vectors must be
  // indistinguishable (two-sample KS).
  const WindowConfig cfg{15, 3};
  const int reps = 5000;
  std::vector<double> t_uniform, t_normal;
  t_uniform.reserve(reps);
  t_normal.reserve(reps);
  const Sampler uniform{DistributionSpec{UniformNormsSpec{}}};
  NormalSpec nspec{std::vector<double>(25, 0.0), covariance_structured(25, 0.5)};
  const Sampler normal{DistributionSpec{nspec}};
  std::vector<double> window(15);
  for (int r = 0; r < reps; ++r) {
    RngStream rng(31, r);
    for (auto& d : window) d = uniform.sample_norm(rng);
    t_uniform.push_back(window_statistic(partition_statistics(window, cfg)));
    RngStream rng2(32, r);
    for (auto& d : window) d = normal.sample_norm(rng2);
    t_normal.push_back(window_statistic(partition_statistics(window, cfg)));
  }
  const double d = oracles::ks_statistic_two_sample(t_uniform, t_normal);
  const double p = oracles::ks_pvalue_two_sample(d, reps, reps);
  CHECK(p > 0.01);
}

TEST_CASE("student t sampling is deterministic per stream") {
  StudentTSpec cauchy{1.0, covariance_structured(4, 0.5)};
  Sampler sampler{DistributionSpec{cauchy}};
  RngStream r1(33, 7), r2(33, 7);
  for (int i = 0; i < 50; ++i) {
    const Observation a = sampler.sample(r1);
    const Observation b = sampler.sample(r2);
    CHECK(a == b);
  }
}

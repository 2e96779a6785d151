#include "sampling.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace driftwatch {

namespace {

bool all_zero(const Matrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

void require_rates(const std::vector<double>& rates) {
  if (rates.empty()) fail_invalid("exponential copula: empty rate vector");
  for (double r : rates)
    if (!(r > 0.0) || !std::isfinite(r))
      fail_invalid("exponential copula: rates must be positive and finite");
}

}  // namespace

CovarianceMatrix covariance_structured(int p, double c0) {
  if (p < 2) fail_invalid("covariance_structured: p must be >= 2");
  if (!(c0 > 0.0)) fail_invalid("covariance_structured: c0 must be > 0");
  Matrix c(static_cast<std::size_t>(p));
  std::vector<double> sigma(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    sigma[i] = c0 + static_cast<double>(i) / static_cast<double>(p - 1);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double ratio = static_cast<double>(i + 1) / static_cast<double>(j + 1);
      const double value = ratio * sigma[i] * sigma[j];
      c(i, j) = value;
      c(j, i) = value;
    }
  }
  return CovarianceMatrix{std::move(c)};
}

CorrelationMatrix correlation_from_covariance(const CovarianceMatrix& cov) {
  const Matrix& c = cov.entries;
  const std::size_t p = c.size();
  if (p == 0) fail_invalid("correlation_from_covariance: empty matrix");
  std::vector<double> inv_sd(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!(c(i, i) > 0.0))
      fail_invalid("correlation_from_covariance: nonpositive diagonal entry");
    inv_sd[i] = 1.0 / std::sqrt(c(i, i));
  }
  Matrix r(p);
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      const double v = c(i, j) * inv_sd[i] * inv_sd[j];
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return CorrelationMatrix{std::move(r)};
}

CorrelationMatrix random_correlation(int p, double alpha_d, RngStream& rng) {
  if (p < 2) fail_invalid("random_correlation: p must be >= 2");
  if (!(alpha_d > 0.0)) fail_invalid("random_correlation: alpha_d must be > 0");
  const std::size_t n = static_cast<std::size_t>(p);
  // Partial correlations on the C-vine, flattened to raw correlations.
  Matrix partial(n);
  Matrix r = Matrix::identity(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t i = k + 1; i < n; ++i) {
      double rho = 2.0 * rng.beta(alpha_d, alpha_d) - 1.0;
      partial(k, i) = rho;
      for (std::size_t m = k; m-- > 0;) {
        rho = rho * std::sqrt((1.0 - partial(m, i) * partial(m, i)) *
                              (1.0 - partial(m, k) * partial(m, k))) +
              partial(m, i) * partial(m, k);
      }
      r(k, i) = rho;
      r(i, k) = rho;
    }
  }
  return CorrelationMatrix{std::move(r)};
}

CovarianceMatrix random_pd_covariance(const RandomCovarianceSpec& spec,
                                      RngStream& rng) {
  if (spec.p < 2) fail_invalid("random_pd_covariance: p must be >= 2");
  if (!(spec.var_lo > 0.0) || !(spec.var_lo < spec.var_hi))
    fail_invalid("random_pd_covariance: need 0 < var_lo < var_hi");
  CorrelationMatrix r = random_correlation(spec.p, spec.alpha_d, rng);
  const std::size_t n = static_cast<std::size_t>(spec.p);
  std::vector<double> sd(n);
  for (std::size_t i = 0; i < n; ++i)
    sd[i] = std::sqrt(rng.uniform(spec.var_lo, spec.var_hi));
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double value = sd[i] * r.entries(i, j) * sd[j];
      c(i, j) = value;
      c(j, i) = value;
    }
  }
  return CovarianceMatrix{std::move(c)};
}

Sampler::Sampler(DistributionSpec spec) : spec_(std::move(spec)) {
  if (const auto* normal = std::get_if<NormalSpec>(&spec_)) {
    const std::size_t p = normal->cov.entries.size();
    if (p == 0) fail_invalid("normal spec: empty covariance");
    if (normal->mean.size() != p)
      fail_invalid("normal spec: mean dimension " +
                   std::to_string(normal->mean.size()) +
                   " does not match covariance dimension " + std::to_string(p));
    dimension_ = static_cast<int>(p);
    // An all-zero covariance degenerates to the mean point; factor is zero.
    factor_ = all_zero(normal->cov.entries) ? Matrix(p)
                                            : cholesky_lower(normal->cov.entries);
  } else if (const auto* t = std::get_if<StudentTSpec>(&spec_)) {
    if (!(t->df > 0.0)) fail_invalid("student t spec: df must be > 0");
    const std::size_t p = t->scale.entries.size();
    if (p == 0) fail_invalid("student t spec: empty scale matrix");
    dimension_ = static_cast<int>(p);
    factor_ = cholesky_lower(t->scale.entries);
  } else if (const auto* ec = std::get_if<ExponentialCopulaSpec>(&spec_)) {
    require_rates(ec->rates);
    dimension_ = static_cast<int>(ec->rates.size());
    if (const auto* gc = std::get_if<GaussianCopula>(&ec->copula)) {
      if (gc->corr.entries.size() != ec->rates.size())
        fail_invalid("exponential copula: correlation dimension does not match rates");
      factor_ = cholesky_lower(gc->corr.entries);
    } else {
      const auto& clayton = std::get<ClaytonCopula>(ec->copula);
      if (!(clayton.xi > 0.0)) fail_invalid("clayton copula: xi must be > 0");
    }
  } else {
    dimension_ = 1;
  }
}

bool Sampler::emits_norms() const {
  return std::holds_alternative<UniformNormsSpec>(spec_);
}

Observation Sampler::sample(RngStream& rng) const {
  const std::size_t p = static_cast<std::size_t>(dimension_);
  Observation y(p);
  if (const auto* normal = std::get_if<NormalSpec>(&spec_)) {
    std::vector<double> z(p);
    for (auto& v : z) v = rng.normal();
    lower_tri_multiply(factor_, z, y);
    for (std::size_t i = 0; i < p; ++i) y[i] += normal->mean[i];
  } else if (const auto* t = std::get_if<StudentTSpec>(&spec_)) {
    std::vector<double> z(p);
    for (auto& v : z) v = rng.normal();
    lower_tri_multiply(factor_, z, y);
    const double g = rng.chi_square(t->df);
    const double scale = 1.0 / std::sqrt(g / t->df);
    for (auto& v : y) v *= scale;
  } else if (const auto* ec = std::get_if<ExponentialCopulaSpec>(&spec_)) {
    if (std::holds_alternative<GaussianCopula>(ec->copula)) {
      std::vector<double> z(p);
      for (auto& v : z) v = rng.normal();
      std::vector<double> corr(p);
      lower_tri_multiply(factor_, z, corr);
      for (std::size_t j = 0; j < p; ++j) {
        // 1 - Phi(z) = Phi(-z), so the exponential quantile keeps tail accuracy.
        const double survival = normal_cdf(-corr[j]);
        y[j] = -std::log(survival) / ec->rates[j];
      }
    } else {
      const auto& clayton = std::get<ClaytonCopula>(ec->copula);
      const double frailty = rng.gamma(1.0 / clayton.xi);
      for (std::size_t j = 0; j < p; ++j) {
        const double e = rng.exponential(1.0);
        const double u = std::pow(1.0 + e / frailty, -1.0 / clayton.xi);
        y[j] = -std::log1p(-u) / ec->rates[j];
      }
    }
  } else {
    y[0] = rng.uniform01();
  }
  return y;
}

double Sampler::sample_norm(RngStream& rng) const {
  if (emits_norms()) return rng.uniform01();
  const Observation y = sample(rng);
  return l2_norm(y);
}

std::vector<double> norm_stream(const DistributionSpec& spec, int n,
                                RngStream& rng) {
  if (n < 1) fail_invalid("norm_stream: n must be >= 1");
  Sampler sampler(spec);
  std::vector<double> norms(static_cast<std::size_t>(n));
  for (auto& d : norms) d = sampler.sample_norm(rng);
  return norms;
}

}  // namespace driftwatch

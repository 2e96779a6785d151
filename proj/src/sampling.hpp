#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"
#include "stat.hpp"

namespace driftwatch {

/// Symmetric positive-definite matrix (checked where it is consumed).
struct CovarianceMatrix {
  Matrix entries;
};

/// Covariance with unit diagonal.
struct CorrelationMatrix {
  Matrix entries;
};

struct NormalSpec {
  std::vector<double> mean;
  CovarianceMatrix cov;
};

/// Zero-location elliptical t with the given scale matrix; df = 1 is Cauchy.
struct StudentTSpec {
  double df = 5.0;
  CovarianceMatrix scale;
};

struct GaussianCopula {
  CorrelationMatrix corr;
};

struct ClaytonCopula {
  double xi = 1.0;
};

/// Exponential marginals (rate lambda_j per coordinate) coupled by a copula.
struct ExponentialCopulaSpec {
  std::variant<GaussianCopula, ClaytonCopula> copula;
  std::vector<double> rates;
};

/// Emits i.i.d. Uniform(0,1) scalars used directly as norm values.
struct UniformNormsSpec {};

using DistributionSpec =
    std::variant<NormalSpec, StudentTSpec, ExponentialCopulaSpec, UniformNormsSpec>;

/// Parameters for a random positive-definite covariance draw.
struct RandomCovarianceSpec {
  int p = 2;
  double var_lo = 0.1;
  double var_hi = 0.5;
  double alpha_d = 1.5;
};

/// Structured covariance C_ij = (min(i,j)/max(i,j)) * sigma_i * sigma_j with
/// sigma_i = c0 + (i-1)/(p-1). Needs p >= 2.
CovarianceMatrix covariance_structured(int p, double c0 = 0.5);

/// R_ij = C_ij / sqrt(C_ii * C_jj). Diagonal forced to exactly 1.
CorrelationMatrix correlation_from_covariance(const CovarianceMatrix& cov);

/// Random correlation matrix by the C-vine method: partial correlations drawn
/// as 2*Beta(alpha_d, alpha_d) - 1 and composed level by level. Positive
/// definite by construction.
CorrelationMatrix random_correlation(int p, double alpha_d, RngStream& rng);

/// D * R * D with R ~ random_correlation and diagonal variances drawn
/// uniformly from (var_lo, var_hi).
CovarianceMatrix random_pd_covariance(const RandomCovarianceSpec& spec,
                                      RngStream& rng);

/// Compiled sampler: factors the distribution's matrix once, then draws
/// observations.
class Sampler {
 public:
  explicit Sampler(DistributionSpec spec);

  int dimension() const { return dimension_; }
  bool emits_norms() const;
  const DistributionSpec& spec() const { return spec_; }

  Observation sample(RngStream& rng) const;

  /// Norm of one sampled observation (the scalar itself for uniform norms).
  double sample_norm(RngStream& rng) const;

 private:
  DistributionSpec spec_;
  Matrix factor_;  // cholesky of cov/scale/correlation; empty for uniform norms
  int dimension_ = 1;
};

/// n norm values drawn from the given distribution (n >= 1).
std::vector<double> norm_stream(const DistributionSpec& spec, int n,
                                RngStream& rng);

}  // namespace driftwatch

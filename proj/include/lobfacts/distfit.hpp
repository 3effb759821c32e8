#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace lobfacts {

/// Gamma with density proportional to exp(-x/scale) (x/scale)^(shape-1).
struct GammaFit {
  double shape = 0.0;
  double scale = 0.0;
  double loglik = 0.0;
  std::size_t n = 0;
};

/// Weibull f(x) = (k/lambda) (x/lambda)^(k-1) exp(-(x/lambda)^k).
struct WeibullFit {
  double shape = 0.0;  // k
  double scale = 0.0;  // lambda
  double loglik = 0.0;
  std::size_t n = 0;
};

struct LogNormalFit {
  double mu = 0.0;
  double sigma = 0.0;
  double loglik = 0.0;
  std::size_t n = 0;
};

struct ExponentialFit {
  double rate = 0.0;
  double loglik = 0.0;
  std::size_t n = 0;
};

/// y ~ c * x^(-alpha) fitted by least squares in log-log space.
struct PowerLawFit {
  double alpha = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
  double x_min = 0.0;
  double x_max = 0.0;
};

struct RootSolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

GammaFit fit_gamma_mle(std::span<const double> samples, const RootSolverOptions& opts = {});
WeibullFit fit_weibull_mle(std::span<const double> samples, const RootSolverOptions& opts = {});
LogNormalFit fit_lognormal(std::span<const double> samples);
ExponentialFit fit_exponential(std::span<const double> samples);
PowerLawFit fit_powerlaw_loglog(std::span<const double> x, std::span<const double> y);

double gamma_loglik(std::span<const double> samples, double shape, double scale);
double weibull_loglik(std::span<const double> samples, double shape, double scale);
double lognormal_loglik(std::span<const double> samples, double mu, double sigma);
double exponential_loglik(std::span<const double> samples, double rate);

enum class Family { Gamma, LogNormal, Weibull, Exponential };
const char* family_name(Family f);
int parameter_count(Family f);

struct Candidate {
  Family family = Family::Gamma;
  int parameters = 0;
  double loglik = 0.0;
  double aic = 0.0;
  /// Fitted parameters in family order (shape/scale, mu/sigma, rate).
  std::vector<double> params;
};

struct ModelSelection {
  std::vector<Candidate> candidates;
  std::map<Family, std::string> failures;
  Family winner = Family::Gamma;
  /// AIC of the runner-up minus AIC of the winner; 0 with a single candidate.
  double margin = 0.0;
};

/// Argmin AIC; equal AIC goes to the family with fewer parameters.
/// Throws DegenerateSample when `candidates` is empty.
std::size_t select_by_aic(std::span<const Candidate> candidates);

/// Fits every requested family, excludes the ones that fail, and picks the
/// AIC winner. Throws DegenerateSample if no family can be fitted.
ModelSelection select_model(std::span<const double> samples, const std::set<Family>& families);

}  // namespace lobfacts

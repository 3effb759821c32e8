#include "lobfacts/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "lobfacts/errors.hpp"

namespace lobfacts {

namespace {

void require_positive(std::span<const double> samples, std::size_t min_n, const char* who) {
  if (samples.size() < min_n)
    throw DegenerateSample(std::string(who) + ": need at least " + std::to_string(min_n) + " samples");
  for (double x : samples)
    if (!(x > 0.0) || !std::isfinite(x))
      throw DegenerateSample(std::string(who) + ": samples must be positive and finite");
}

double mean_log(std::span<const double> samples) {
  double s = 0.0;
  for (double x : samples) s += std::log(x);
  return s / static_cast<double>(samples.size());
}

bool all_equal(std::span<const double> samples) {
  return std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); });
}

}  // namespace

double gamma_loglik(std::span<const double> samples, double shape, double scale) {
  double sum_log = 0.0, sum = 0.0;
  for (double x : samples) {
    sum_log += std::log(x);
    sum += x;
  }
  const double n = static_cast<double>(samples.size());
  return (shape - 1.0) * sum_log - sum / scale - n * (std::lgamma(shape) + shape * std::log(scale));
}

GammaFit fit_gamma_mle(std::span<const double> samples, const RootSolverOptions& opts) {
  require_positive(samples, 2, "fit_gamma_mle");
  if (all_equal(samples)) throw DegenerateSample("fit_gamma_mle: all samples equal");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  const double s = std::log(mean) - mean_log(samples);
  if (!(s > 0.0)) throw DegenerateSample("fit_gamma_mle: no spread in log-samples");

  // Solve ln k - digamma(k) = s; the left side decreases monotonically in k.
  auto f = [s](double k) { return std::log(k) - boost::math::digamma(k) - s; };
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double fk = f(k);
    if (fk > 0.0) lo = k; else hi = k;
    const double dfk = 1.0 / k - boost::math::trigamma(k);
    double next = k - fk / dfk;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * k;
    const double step = std::abs(next - k);
    k = next;
    if (step <= opts.tolerance * std::max(1.0, k) || fk == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergence("fit_gamma_mle: shape did not converge");
  GammaFit fit;
  fit.shape = k;
  fit.scale = mean / k;
  fit.n = samples.size();
  fit.loglik = gamma_loglik(samples, fit.shape, fit.scale);
  return fit;
}

double weibull_loglik(std::span<const double> samples, double shape, double scale) {
  double ll = 0.0;
  const double log_scale = std::log(scale);
  for (double x : samples) {
    const double z = std::log(x) - log_scale;
    ll += std::log(shape) - log_scale + (shape - 1.0) * z - std::exp(shape * z);
  }
  return ll;
}

WeibullFit fit_weibull_mle(std::span<const double> samples, const RootSolverOptions& opts) {
  require_positive(samples, 2, "fit_weibull_mle");
  if (all_equal(samples)) throw DegenerateSample("fit_weibull_mle: all samples equal");
  const std::size_t n = samples.size();
  // Work with centered logs so that the fit is exactly scale equivariant.
  const double center = mean_log(samples);
  std::vector<double> z(n);
  double var = 0.0, zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = std::log(samples[i]) - center;
    var += z[i] * z[i];
    zmax = std::max(zmax, z[i]);
  }
  var /= static_cast<double>(n);

  // Profile score h(k) = sum w z / sum w - 1/k - mean(z), w = exp(k z);
  // mean(z) is zero by construction. h is increasing in k.
  struct Moments {
    double h, dh, log_mean_w;
  };
  auto moments = [&](double k) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    const double m = k * zmax;
    for (double zi : z) {
      const double w = std::exp(k * zi - m);
      s0 += w;
      s1 += w * zi;
      s2 += w * zi * zi;
    }
    const double e1 = s1 / s0;
    const double e2 = s2 / s0;
    return Moments{e1 - 1.0 / k, (e2 - e1 * e1) + 1.0 / (k * k),
                   m + std::log(s0 / static_cast<double>(n))};
  };

  double k = std::numbers::pi / std::sqrt(6.0 * var);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Moments mo = moments(k);
    if (mo.h < 0.0) lo = k; else hi = k;
    double next = k - mo.h / mo.dh;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * k;
    const double step = std::abs(next - k);
    k = next;
    if (step <= opts.tolerance * std::max(1.0, k) || mo.h == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergence("fit_weibull_mle: shape did not converge");
  WeibullFit fit;
  fit.shape = k;
  // lambda^k = mean(x^k)
  fit.scale = std::exp(center + moments(k).log_mean_w / k);
  fit.n = n;
  fit.loglik = weibull_loglik(samples, fit.shape, fit.scale);
  return fit;
}

double lognormal_loglik(std::span<const double> samples, double mu, double sigma) {
  double ll = 0.0;
  const double c = std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi);
  for (double x : samples) {
    const double lx = std::log(x);
    const double z = (lx - mu) / sigma;
    ll += -lx - c - 0.5 * z * z;
  }
  return ll;
}

LogNormalFit fit_lognormal(std::span<const double> samples) {
  require_positive(samples, 2, "fit_lognormal");
  LogNormalFit fit;
  fit.mu = mean_log(samples);
  double ss = 0.0;
  for (double x : samples) {
    const double d = std::log(x) - fit.mu;
    ss += d * d;
  }
  fit.sigma = std::sqrt(ss / static_cast<double>(samples.size()));
  if (!(fit.sigma > 0.0)) throw DegenerateSample("fit_lognormal: zero spread in log-samples");
  fit.n = samples.size();
  fit.loglik = lognormal_loglik(samples, fit.mu, fit.sigma);
  return fit;
}

double exponential_loglik(std::span<const double> samples, double rate) {
  double sum = 0.0;
  for (double x : samples) sum += x;
  return static_cast<double>(samples.size()) * std::log(rate) - rate * sum;
}

ExponentialFit fit_exponential(std::span<const double> samples) {
  require_positive(samples, 1, "fit_exponential");
  double sum = 0.0;
  for (double x : samples) sum += x;
  ExponentialFit fit;
  fit.rate = static_cast<double>(samples.size()) / sum;
  fit.n = samples.size();
  fit.loglik = exponential_loglik(samples, fit.rate);
  return fit;
}

PowerLawFit fit_powerlaw_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateSample("fit_powerlaw_loglog: x and y differ in length");
  if (x.size() < 3) throw DegenerateSample("fit_powerlaw_loglog: need at least 3 points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DegenerateSample("fit_powerlaw_loglog: non-positive value");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateSample("fit_powerlaw_loglog: zero variance in ln x");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.alpha = -slope;
  fit.c = std::exp(intercept);
  fit.r2 = syy > 0.0 ? std::min(1.0, 1.0 - ss_res / syy) : 1.0;
  fit.n_points = n;
  fit.x_min = *std::min_element(x.begin(), x.end());
  fit.x_max = *std::max_element(x.begin(), x.end());
  return fit;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::Gamma: return "gamma";
    case Family::LogNormal: return "lognormal";
    case Family::Weibull: return "weibull";
    case Family::Exponential: return "exponential";
  }
  return "?";
}

int parameter_count(Family f) { return f == Family::Exponential ? 1 : 2; }

std::size_t select_by_aic(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw DegenerateSample("select_model: no family could be fitted");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    const double tol = 1e-12 * std::max(1.0, std::abs(b.aic));
    if (c.aic < b.aic - tol || (std::abs(c.aic - b.aic) <= tol && c.parameters < b.parameters)) best = i;
  }
  return best;
}

ModelSelection select_model(std::span<const double> samples, const std::set<Family>& families) {
  ModelSelection sel;
  for (Family f : families) {
    Candidate c;
    c.family = f;
    c.parameters = parameter_count(f);
    try {
      switch (f) {
        case Family::Gamma: {
          const auto g = fit_gamma_mle(samples);
          c.loglik = g.loglik;
          c.params = {g.shape, g.scale};
          break;
        }
        case Family::LogNormal: {
          const auto g = fit_lognormal(samples);
          c.loglik = g.loglik;
          c.params = {g.mu, g.sigma};
          break;
        }
        case Family::Weibull: {
          const auto g = fit_weibull_mle(samples);
          c.loglik = g.loglik;
          c.params = {g.shape, g.scale};
          break;
        }
        case Family::Exponential: {
          const auto g = fit_exponential(samples);
          c.loglik = g.loglik;
          c.params = {g.rate};
          break;
        }
      }
    } catch (const Error& e) {
      sel.failures[f] = e.what();
      continue;
    }
    c.aic = 2.0 * c.parameters - 2.0 * c.loglik;
    sel.candidates.push_back(std::move(c));
  }
  const std::size_t w = select_by_aic(sel.candidates);
  sel.winner = sel.candidates[w].family;
  double runner_up = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sel.candidates.size(); ++i)
    if (i != w) runner_up = std::min(runner_up, sel.candidates[i].aic);
  sel.margin = std::isfinite(runner_up) ? runner_up - sel.candidates[w].aic : 0.0;
  return sel;
}

}  // namespace lobfacts

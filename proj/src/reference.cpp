#include "renyi/reference.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "renyi/errors.hpp"

namespace renyi {
namespace {

constexpr double kNormalizationTol = 1e-8;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

void require_count(std::span<const double> params, std::size_t n, const char* family) {
  if (params.size() != n)
    throw InvalidParameter("params", std::string(family) + " expects " + std::to_string(n) + " parameters, got " +
                                         std::to_string(params.size()));
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidParameter(name, "must be finite");
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::uniform: return "uniform";
    case Family::exponential: return "exponential";
    case Family::gaussian: return "gaussian";
    case Family::gamma: return "gamma";
    case Family::tabulated: return "tabulated";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "uniform") return Family::uniform;
  if (name == "exponential") return Family::exponential;
  if (name == "gaussian") return Family::gaussian;
  if (name == "gamma") return Family::gamma;
  throw InvalidParameter("family", "unknown reference family '" + name + "'");
}

double ReferenceDistribution::stddev() const { return std::sqrt(variance_); }

ReferenceDistribution::ReferenceDistribution(Density density, Family family, std::vector<double> params,
                                             std::string label, double truncation_mass, double scale_factor)
    : density_(std::move(density)),
      family_(family),
      params_(std::move(params)),
      label_(std::move(label)),
      truncation_mass_(truncation_mass),
      scale_factor_(scale_factor) {
  const auto& sup = density_.support();
  auto moment = [&](int k) {
    return integrate_over(
               [&](double x) { return std::pow(x, k) * density_(x); }, sup, density_.breakpoints(),
               density_.singular_points())
        .value;
  };
  const double mass = moment(0);
  if (std::abs(mass - 1.0) > kNormalizationTol)
    throw Error("reference '" + label_ + "' integrates to " + fmt("%.17g", mass) + ", not 1");
  mean_ = moment(1);
  variance_ = integrate_over(
                  [&](double x) { return (x - mean_) * (x - mean_) * density_(x); }, sup,
                  density_.breakpoints(), density_.singular_points())
                  .value;
}

ReferenceDistribution make_builtin(Family family, std::span<const double> params) {
  std::vector<double> p(params.begin(), params.end());
  for (double v : p) require_finite(v, "params");
  switch (family) {
    case Family::uniform: {
      require_count(params, 2, "uniform");
      const double lo = p[0], hi = p[1];
      if (!(lo < hi)) throw InvalidParameter("hi", "uniform requires lo < hi");
      const double h = 1.0 / (hi - lo);
      return ReferenceDistribution(Density([h](double) { return h; }, IntervalSet::single(lo, hi)), family, p,
                                   fmt("uniform(%.12g,%.12g)", lo, hi), 0.0, 1.0);
    }
    case Family::exponential: {
      require_count(params, 1, "exponential");
      const double rate = p[0];
      if (!(rate > 0.0)) throw InvalidParameter("rate", "exponential rate must be > 0");
      // e^{-70} < 1e-30
      const double upper = 70.0 / rate;
      const double tail = std::exp(-70.0);
      const double norm = rate / (1.0 - tail);
      return ReferenceDistribution(
          Density([rate, norm](double x) { return norm * std::exp(-rate * x); }, IntervalSet::single(0.0, upper)),
          family, p, fmt("exponential(rate=%.12g) truncated to [0,%.12g], tail mass %.3g", rate, upper, tail), tail,
          1.0);
    }
    case Family::gaussian: {
      require_count(params, 2, "gaussian");
      const double mu = p[0], sigma = p[1];
      if (!(sigma > 0.0)) throw InvalidParameter("sigma", "gaussian sigma must be > 0");
      const double tail = std::erfc(12.0 / std::numbers::sqrt2);
      const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) * (1.0 - tail));
      return ReferenceDistribution(
          Density(
              [mu, sigma, norm](double x) {
                const double z = (x - mu) / sigma;
                return norm * std::exp(-0.5 * z * z);
              },
              IntervalSet::single(mu - 12.0 * sigma, mu + 12.0 * sigma), {mu}),
          family, p,
          fmt("gaussian(mu=%.12g,sigma=%.12g) truncated to +-12 sigma, tail mass %.3g", mu, sigma, tail), tail, 1.0);
    }
    case Family::gamma: {
      require_count(params, 2, "gamma");
      const double shape = p[0], rate = p[1];
      if (!(shape > 0.0)) throw InvalidParameter("shape", "gamma shape must be > 0");
      if (!(rate > 0.0)) throw InvalidParameter("rate", "gamma rate must be > 0");
      const double tail = 1e-31;
      const double upper = boost::math::gamma_q_inv(shape, tail) / rate;
      const double log_norm = shape * std::log(rate) - std::lgamma(shape) - std::log1p(-tail);
      auto f = [shape, rate, log_norm](double x) {
        if (x <= 0.0) {
          if (shape < 1.0) return std::numeric_limits<double>::infinity();
          return shape == 1.0 ? std::exp(log_norm) : 0.0;
        }
        return std::exp(log_norm + (shape - 1.0) * std::log(x) - rate * x);
      };
      std::vector<double> singular;
      if (shape != std::floor(shape)) singular.push_back(0.0);
      const double mode = shape > 1.0 ? (shape - 1.0) / rate : 0.0;
      std::vector<double> hints;
      if (mode > 0.0) hints.push_back(mode);
      return ReferenceDistribution(Density(f, IntervalSet::single(0.0, upper), hints, singular), family, p,
                                   fmt("gamma(shape=%.12g,rate=%.12g) truncated to [0,%.12g], tail mass %.3g", shape,
                                       rate, upper, tail),
                                   tail, 1.0);
    }
    case Family::tabulated:
      throw InvalidParameter("family", "tabulated references are built with load_tabulated");
  }
  throw InvalidParameter("family", "unknown family");
}

ReferenceDistribution load_tabulated(std::span<const TabulatedRow> rows) {
  if (rows.size() < 4) throw InvalidParameter("rows", "at least 4 rows are required");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_finite(rows[i].x, "x");
    require_finite(rows[i].q, "q");
    if (rows[i].q < 0.0) throw InvalidParameter("q", fmt("negative value at x=%.12g", rows[i].x));
    if (i > 0 && !(rows[i].x > rows[i - 1].x))
      throw InvalidParameter("x", fmt("abscissae must be strictly increasing (x=%.12g after %.12g)", rows[i].x,
                                      rows[i - 1].x));
  }
  double area = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    area += 0.5 * (rows[i].q + rows[i - 1].q) * (rows[i].x - rows[i - 1].x);
  if (!(area > 0.0)) throw InvalidParameter("q", "all tabulated values are zero");

  const double scale = 1.0 / area;
  std::vector<double> xs, qs;
  xs.reserve(rows.size());
  qs.reserve(rows.size());
  for (const auto& r : rows) {
    xs.push_back(r.x);
    qs.push_back(r.q * scale);
  }
  auto f = [xs, qs](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return qs.front();
    if (it == xs.end()) return qs.back();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return qs[j - 1] + t * (qs[j] - qs[j - 1]);
  };
  std::vector<double> params;
  return ReferenceDistribution(Density(f, IntervalSet::single(xs.front(), xs.back()), xs), Family::tabulated, params,
                               fmt("tabulated(%.0f rows on [%.12g,%.12g], scale %.12g)", double(rows.size()),
                                   xs.front(), xs.back(), scale),
                               0.0, scale);
}

}  // namespace renyi

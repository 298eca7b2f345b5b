#include "dynbit/block_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace dynbit::parity {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

BlockScheme BlockScheme::mq(double q) {
  if (!(q > 0.0)) throw std::domain_error("block scheme: q must be positive");
  BlockScheme s;
  s.kind_ = Kind::Mq;
  s.q_ = q;
  return s;
}

BlockScheme BlockScheme::table(std::vector<double> values) {
  if (values.size() < 3)
    throw std::domain_error("block scheme table: need at least m(0..2)");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 1.0))
      throw std::domain_error("block scheme table: entries must be >= 1");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw std::domain_error("block scheme table: must be strictly increasing");
  }
  BlockScheme s;
  s.kind_ = Kind::Table;
  s.values_ = std::move(values);
  return s;
}

double BlockScheme::m(double x) const {
  if (kind_ == Kind::Mq) return std::exp2(x / q_);
  if (x < 0.0 || x > x_hi())
    throw std::domain_error("block scheme table: x out of tabulated range");
  const auto j = static_cast<std::size_t>(std::min(
      static_cast<double>(values_.size() - 2), std::floor(x)));
  const double frac = x - static_cast<double>(j);
  return values_[j] + frac * (values_[j + 1] - values_[j]);
}

double BlockScheme::m_inverse(double t) const {
  if (!(t > 0.0)) throw std::domain_error("m_inverse: t must be positive");
  if (kind_ == Kind::Mq) return q_ * std::log2(t);
  if (t < values_.front() || t > values_.back())
    throw std::domain_error("m_inverse: t outside tabulated range");
  const auto it = std::lower_bound(values_.begin(), values_.end(), t);
  auto j = static_cast<std::size_t>(it - values_.begin());
  if (j > 0) --j;
  j = std::min(j, values_.size() - 2);
  const double seg = values_[j + 1] - values_[j];
  return static_cast<double>(j) + (t - values_[j]) / seg;
}

double BlockScheme::g(double t) const { return std::exp2(m_inverse(t)); }

double BlockScheme::x_hi() const {
  if (kind_ == Kind::Mq) return 1e300;
  return static_cast<double>(values_.size() - 1);
}

bool BlockScheme::monotone_flag() const {
  const double hi = kind_ == Kind::Mq ? 64.0 : x_hi();
  const int steps = 1024;
  double prev = m(0.0);  // v(0) with 2^0 = 1
  for (int i = 1; i <= steps; ++i) {
    const double x = hi * static_cast<double>(i) / steps;
    const double v = m(x) * std::exp2(-x);
    if (!(v > prev)) return false;
    prev = v;
  }
  return true;
}

bool BlockScheme::gap_ok() const {
  const int kmax = kind_ == Kind::Mq
                       ? 64
                       : static_cast<int>(values_.size()) - 2;
  for (int k = 0; k <= kmax; ++k) {
    if (m(static_cast<double>(k + 1)) <
        2.0 * m(static_cast<double>(k)) * (1.0 - 1e-12))
      return false;
  }
  return true;
}

nlohmann::json BlockScheme::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::Mq) {
    j["type"] = "mq";
    j["q"] = q_;
  } else {
    j["type"] = "table";
    j["values"] = values_;
  }
  return j;
}

BlockScheme BlockScheme::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "mq") return mq(j.at("q").get<double>());
  if (type == "table")
    return table(j.at("values").get<std::vector<double>>());
  throw std::domain_error("unknown block scheme type: " + type);
}

namespace {

// Adaptive Simpson with an absolute error budget per call.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("laplace_g: quadrature depth limit");
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

// Composite Simpson without adaptivity; used to size the error budget.
double coarse_simpson(const std::function<double(double)>& f, double a,
                      double b, int panels) {
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = lo + h;
    total += (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  }
  return total;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  const int panels = 64;
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = lo + h;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo);
    const double fmid = f(mid);
    const double fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole,
                              abs_tol / panels, 48);
  }
  return total;
}

}  // namespace

double laplace_g(const BlockScheme& scheme, double lambda, double rel_tol,
                 double x_start) {
  if (!(lambda > 0.0)) throw std::domain_error("laplace_g: lambda must be > 0");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::domain_error("laplace_g: bad tolerance");

  const auto integrand = [&](double x) {
    const double e = -lambda * scheme.m(x);
    return e < -745.0 ? 0.0 : kLn2 * std::exp2(x) * std::exp(e);
  };

  double lo, hi;
  if (scheme.unbounded()) {
    const double q = scheme.q();
    // Peak of 2^x exp(-lambda 2^(x/q)) sits where lambda m(x) = q.
    const double x_peak = q * std::log2(q / lambda);
    // Left tail below x0 is bounded by 2^x0 (the exp factor is <= 1).
    const double peak_height = integrand(x_peak);
    double x0 = x_peak - 80.0;
    if (peak_height > 0.0)
      x0 = std::min(x0, std::log2(peak_height * std::max(q, 1e-3)) - 50.0);
    const double x1 = q * std::log2(90.0 / lambda);
    lo = std::max(x0, x_start);
    hi = std::max(x1, lo + 1.0);
  } else {
    lo = std::max(0.0, x_start);
    hi = scheme.x_hi();
    if (lo >= hi) throw std::domain_error("laplace_g: x_start beyond table");
    if (lambda * scheme.m(hi) < 30.0)
      throw std::runtime_error(
          "laplace_g: tabulated range cuts off a non-negligible tail at "
          "lambda=" +
          std::to_string(lambda));
  }

  // Coarse pass fixes the absolute budget; refinement passes verify it.
  double estimate = coarse_simpson(integrand, lo, hi, 256);
  for (int pass = 0; pass < 3; ++pass) {
    const double budget =
        std::max(std::abs(estimate) * rel_tol * 0.25, 1e-300);
    const double refined = integrate(integrand, lo, hi, budget);
    if (std::abs(refined - estimate) <=
        rel_tol * std::max(std::abs(refined), 1e-300)) {
      return refined;
    }
    estimate = refined;
  }
  throw std::runtime_error("laplace_g: quadrature failed to stabilize at rel_tol");
}

}  // namespace dynbit::parity

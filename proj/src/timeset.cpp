#include "dynbit/timeset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynbit/numeric.hpp"

namespace dynbit::timeset {

namespace {

void validate_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(what) + " must be finite");
}

std::vector<Interval> normalize(std::vector<Interval> parts) {
  for (const auto& iv : parts) {
    validate_finite(iv.lo, "interval endpoint");
    validate_finite(iv.hi, "interval endpoint");
    if (iv.lo > iv.hi) throw std::domain_error("interval with lo > hi");
    if (iv.lo < 0.0) throw std::domain_error("time sets live in [0, T]");
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : parts) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

}  // namespace

TimeSet TimeSet::intervals(std::vector<Interval> parts) {
  TimeSet f;
  f.kind_ = Kind::Intervals;
  f.comps_ = normalize(std::move(parts));
  return f;
}

TimeSet TimeSet::cantor(double left, double length, double ratio, int depth) {
  validate_finite(left, "left");
  validate_finite(length, "length");
  if (length <= 0.0) throw std::domain_error("cantor: length must be positive");
  if (left < 0.0) throw std::domain_error("cantor: left must be >= 0");
  if (!(ratio > 0.0 && ratio < 0.5))
    throw std::domain_error("cantor: ratio must lie in (0, 1/2)");
  if (depth < 0 || depth > 20)
    throw std::domain_error("cantor: depth must lie in [0, 20]");

  TimeSet f;
  f.kind_ = Kind::Cantor;
  f.cantor_ = CantorParams{left, length, ratio, depth};
  f.comps_ = {{left, left + length}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Interval> next;
    next.reserve(f.comps_.size() * 2);
    for (const auto& iv : f.comps_) {
      const double len = iv.hi - iv.lo;
      next.push_back({iv.lo, iv.lo + ratio * len});
      next.push_back({iv.hi - ratio * len, iv.hi});
    }
    f.comps_ = std::move(next);
  }
  return f;
}

TimeSet TimeSet::points(std::vector<double> pts) {
  std::vector<Interval> parts;
  parts.reserve(pts.size());
  for (double p : pts) parts.push_back({p, p});
  TimeSet f;
  f.kind_ = Kind::Points;
  f.comps_ = normalize(std::move(parts));
  return f;
}

double TimeSet::inf() const {
  if (empty()) throw std::domain_error("inf of empty time set");
  return comps_.front().lo;
}

double TimeSet::sup() const {
  if (empty()) throw std::domain_error("sup of empty time set");
  return comps_.back().hi;
}

double TimeSet::diameter() const { return empty() ? 0.0 : sup() - inf(); }

bool TimeSet::contains(double t) const { return intersects(t, t); }

bool TimeSet::intersects(double a, double b) const {
  if (a > b) throw std::domain_error("intersects: a must be <= b");
  // First component whose right endpoint reaches a.
  auto it = std::lower_bound(
      comps_.begin(), comps_.end(), a,
      [](const Interval& iv, double value) { return iv.hi < value; });
  return it != comps_.end() && it->lo <= b;
}

bool TimeSet::intersects_half_open(double a, double b) const {
  if (a >= b) return false;
  auto it = std::lower_bound(
      comps_.begin(), comps_.end(), a,
      [](const Interval& iv, double value) { return iv.hi < value; });
  return it != comps_.end() && it->lo < b;
}

std::optional<double> TimeSet::first_point_at_or_after(double x) const {
  auto it = std::lower_bound(
      comps_.begin(), comps_.end(), x,
      [](const Interval& iv, double value) { return iv.hi < value; });
  if (it == comps_.end()) return std::nullopt;
  return std::max(x, it->lo);
}

nlohmann::json TimeSet::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::Cantor:
      j["type"] = "cantor";
      j["left"] = cantor_->left;
      j["length"] = cantor_->length;
      j["ratio"] = cantor_->ratio;
      j["depth"] = cantor_->depth;
      break;
    case Kind::Points: {
      j["type"] = "points";
      auto pts = nlohmann::json::array();
      for (const auto& iv : comps_) pts.push_back(iv.lo);
      j["points"] = pts;
      break;
    }
    case Kind::Intervals: {
      j["type"] = "intervals";
      auto arr = nlohmann::json::array();
      for (const auto& iv : comps_) arr.push_back({iv.lo, iv.hi});
      j["intervals"] = arr;
      break;
    }
  }
  return j;
}

TimeSet TimeSet::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "cantor") {
    return cantor(j.at("left").get<double>(), j.at("length").get<double>(),
                  j.at("ratio").get<double>(), j.at("depth").get<int>());
  }
  if (type == "points") {
    return points(j.at("points").get<std::vector<double>>());
  }
  if (type == "intervals") {
    std::vector<Interval> parts;
    for (const auto& pair : j.at("intervals")) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::domain_error("intervals entries must be [lo, hi] pairs");
      parts.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return intervals(std::move(parts));
  }
  throw std::domain_error("unknown time set type: " + type);
}

std::int64_t kolmogorov_capacity(const TimeSet& F, double eps) {
  if (F.empty()) throw std::domain_error("capacity of empty time set");
  if (!(eps > 0.0)) throw std::domain_error("capacity: eps must be positive");

  std::int64_t count = 0;
  bool have_last = false;
  double last = 0.0;
  for (const auto& iv : F.components()) {
    double x = have_last ? std::max(iv.lo, last + eps) : iv.lo;
    if (x > iv.hi) continue;
    // Picks at x, x+eps, ..., while they stay inside the component.
    auto n = static_cast<std::int64_t>(std::floor((iv.hi - x) / eps)) + 1;
    while (x + static_cast<double>(n) * eps <= iv.hi) ++n;
    while (n > 1 && x + static_cast<double>(n - 1) * eps > iv.hi) --n;
    count += n;
    last = x + static_cast<double>(n - 1) * eps;
    have_last = true;
  }
  return count;
}

std::int64_t covering_count(const TimeSet& F, std::int64_t k) {
  if (k < 1) throw std::domain_error("covering_count: k must be >= 1");
  if (F.empty()) return 0;
  const double horizon = std::max(1.0, F.sup());
  const auto i_end =
      static_cast<std::int64_t>(std::ceil(static_cast<double>(k) * horizon)) - 1;

  std::int64_t count = 0;
  std::int64_t last_counted = -1;
  for (const auto& iv : F.components()) {
    auto i_lo = static_cast<std::int64_t>(
                    std::ceil(iv.lo * static_cast<double>(k))) - 1;
    auto i_hi = static_cast<std::int64_t>(
        std::floor(iv.hi * static_cast<double>(k)));
    i_lo = std::max<std::int64_t>(i_lo - 1, 0);
    i_hi = std::min<std::int64_t>(i_hi + 1, i_end);
    for (std::int64_t i = std::max(i_lo, last_counted + 1); i <= i_hi; ++i) {
      const double a = static_cast<double>(i) / static_cast<double>(k);
      const double b = static_cast<double>(i + 1) / static_cast<double>(k);
      if (a <= iv.hi && b >= iv.lo) {
        ++count;
        last_counted = i;
      }
    }
  }
  return count;
}

CapacityProfile capacity_profile(const TimeSet& F,
                                 const std::vector<double>& eps_grid) {
  if (eps_grid.size() < 3)
    throw std::domain_error("capacity_profile: need at least 3 scales");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]))
      throw std::domain_error("capacity_profile: eps grid must decrease");

  CapacityProfile prof;
  prof.epsilons = eps_grid;
  prof.capacities.reserve(eps_grid.size());
  for (double eps : eps_grid)
    prof.capacities.push_back(kolmogorov_capacity(F, eps));

  prof.doubling_max_ratio = 0.0;
  for (double eps : eps_grid) {
    const double ratio =
        static_cast<double>(kolmogorov_capacity(F, eps)) /
        static_cast<double>(kolmogorov_capacity(F, 2.0 * eps));
    prof.doubling_max_ratio = std::max(prof.doubling_max_ratio, ratio);
  }

  std::vector<double> lx, ly;
  lx.reserve(eps_grid.size());
  ly.reserve(eps_grid.size());
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    lx.push_back(std::log(1.0 / eps_grid[i]));
    ly.push_back(std::log(static_cast<double>(prof.capacities[i])));
  }
  if (lx.back() - lx.front() < 3.0 * std::log(10.0) - 1e-9)
    throw std::domain_error("capacity_profile: grid must span >= 3 decades");
  const auto win = window_slopes(lx, ly, std::log(10.0));
  prof.alpha = win.min_slope;
  prof.beta = win.max_slope;
  prof.global_slope = least_squares_slope(lx, ly);
  return prof;
}

std::pair<double, double> minkowski_dims(const TimeSet& F,
                                         const std::vector<double>& eps_grid) {
  const auto prof = capacity_profile(F, eps_grid);
  return {prof.alpha, prof.beta};
}

std::int64_t CapacityStepTable::lookup(double eps) const {
  if (edges.empty()) throw std::domain_error("empty capacity table");
  if (eps < edges.front() || eps > edges.back())
    throw std::domain_error("capacity table lookup out of range");
  // K is nonincreasing; the sample at the next edge >= eps matches K(eps)
  // once refinement converged (neighbours differ only across jumps localized
  // to relative width 1e-12).
  const auto it = std::lower_bound(edges.begin(), edges.end(), eps);
  return values[static_cast<std::size_t>(it - edges.begin())];
}

namespace {

void refine_samples(const TimeSet& F, double lo, std::int64_t klo, double hi,
                    std::int64_t khi,
                    std::vector<std::pair<double, std::int64_t>>& samples) {
  if (klo == khi) return;
  if (hi <= lo * (1.0 + 1e-12)) return;  // jump localized
  const double mid = std::sqrt(lo * hi);
  const std::int64_t kmid = kolmogorov_capacity(F, mid);
  refine_samples(F, lo, klo, mid, kmid, samples);
  samples.emplace_back(mid, kmid);
  refine_samples(F, mid, kmid, hi, khi, samples);
}

}  // namespace

CapacityStepTable capacity_step_table(const TimeSet& F, double eps_lo,
                                      double eps_hi) {
  if (!(eps_lo > 0.0 && eps_hi > eps_lo))
    throw std::domain_error("capacity_step_table: need 0 < eps_lo < eps_hi");
  const std::int64_t klo = kolmogorov_capacity(F, eps_lo);
  const std::int64_t khi = kolmogorov_capacity(F, eps_hi);
  std::vector<std::pair<double, std::int64_t>> samples;
  samples.emplace_back(eps_lo, klo);
  refine_samples(F, eps_lo, klo, eps_hi, khi, samples);
  samples.emplace_back(eps_hi, khi);

  CapacityStepTable table;
  table.edges.reserve(samples.size());
  table.values.reserve(samples.size());
  for (const auto& [eps, k] : samples) {
    if (!table.edges.empty() && eps <= table.edges.back()) continue;
    table.edges.push_back(eps);
    table.values.push_back(k);
  }
  return table;
}

}  // namespace dynbit::timeset

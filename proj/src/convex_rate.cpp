#include "sconv/convex_rate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sconv/errors.hpp"

namespace sconv {

ConvexRate ConvexRate::analytic(std::function<double(double)> f, double right_derivative_at_1,
                                std::optional<double> slope_at_infinity, std::string name, double t_hi) {
  if (!f) throw ValidationError("analytic rate needs a function");
  if (slope_at_infinity && *slope_at_infinity < right_derivative_at_1 - 1e-12) {
    throw DataError("slope at infinity below the right derivative at 1");
  }
  ConvexRate rate;
  rate.f_ = std::move(f);
  rate.a_min_ = right_derivative_at_1;
  rate.a_max_ = slope_at_infinity;
  rate.t_hi_ = t_hi;
  rate.name_ = std::move(name);
  return rate;
}

ConvexRate ConvexRate::from_samples(const std::vector<double>& alphas, const std::vector<double>& values,
                                    double projection_tol, std::string name) {
  if (alphas.empty() || alphas.size() != values.size()) {
    throw ValidationError("rate samples need matching nonempty alphas and values", "alphas");
  }
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(1.0, 0.0);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!std::isfinite(alphas[i]) || !std::isfinite(values[i])) {
      throw ValidationError("rate samples must be finite", "alphas");
    }
    if (alphas[i] == 1.0) {
      if (std::abs(values[i]) > 1e-10) throw DataError("rate sample at alpha = 1 must vanish");
      continue;
    }
    if (alphas[i] < 1.0) throw ValidationError("rate samples need alpha > 1", "alphas");
    pts.emplace_back(alphas[i], values[i]);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first == pts[i - 1].first) throw ValidationError("duplicate alpha in rate samples", "alphas");
  }
  if (pts.size() < 2) throw ValidationError("rate samples need a node beyond alpha = 1", "alphas");

  // Lower convex hull (monotone chain); (1, 0) is always a hull vertex.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (hull.size() >= 2) {
      const auto& p0 = pts[hull[hull.size() - 2]];
      const auto& p1 = pts[hull.back()];
      const auto& p2 = pts[i];
      const double cross = (p1.first - p0.first) * (p2.second - p0.second) -
                           (p1.second - p0.second) * (p2.first - p0.first);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  auto hull_value = [&](double t) {
    for (std::size_t k = 1; k < hull.size(); ++k) {
      const auto& lo = pts[hull[k - 1]];
      const auto& hi = pts[hull[k]];
      if (t <= hi.first) return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
    }
    return pts[hull.back()].second;
  };
  double shift = 0.0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double gap = pts[i].second - hull_value(pts[i].first);
    if (gap > shift) {
      shift = gap;
      worst = i;
    }
  }
  if (shift > projection_tol) {
    const std::size_t lo = worst == 0 ? 0 : worst - 1;
    const std::size_t hi = std::min(worst + 1, pts.size() - 1);
    std::ostringstream msg;
    msg << "rate samples are not convex: violation " << shift << " at alphas (" << pts[lo].first << ", "
        << pts[worst].first << ", " << pts[hi].first << ")";
    throw DataError(msg.str());
  }

  ConvexRate rate;
  rate.name_ = std::move(name);
  rate.projection_shift_ = shift;
  for (const auto& p : pts) {
    rate.node_t_.push_back(p.first);
    rate.node_f_.push_back(hull_value(p.first));
  }
  rate.node_f_[0] = 0.0;
  const std::size_t m = rate.node_t_.size();
  rate.a_min_ = (rate.node_f_[1] - rate.node_f_[0]) / (rate.node_t_[1] - rate.node_t_[0]);
  rate.a_max_ = (rate.node_f_[m - 1] - rate.node_f_[m - 2]) / (rate.node_t_[m - 1] - rate.node_t_[m - 2]);
  rate.t_hi_ = rate.node_t_.back();
  const auto ts = rate.node_t_;
  const auto fs = rate.node_f_;
  const double tail = *rate.a_max_;
  rate.f_ = [ts, fs, tail](double t) {
    if (t >= ts.back()) return fs.back() + tail * (t - ts.back());
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - ts.begin());
    if (k == 0) return fs.front();
    return fs[k - 1] + (fs[k] - fs[k - 1]) * (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
  };
  return rate;
}

double ConvexRate::operator()(double t) const {
  if (t < 1.0) throw DomainError("convex rate is defined on [1, inf)");
  return f_(t);
}

ConvexityReport ConvexRate::check(int levels, double tol) const {
  const int cells = 1 << levels;
  std::vector<double> t(static_cast<std::size_t>(cells + 1));
  std::vector<double> v(t.size());
  for (int k = 0; k <= cells; ++k) {
    t[static_cast<std::size_t>(k)] = 1.0 + (t_hi_ - 1.0) * k / cells;
    v[static_cast<std::size_t>(k)] = (*this)(t[static_cast<std::size_t>(k)]);
  }
  ConvexityReport rep;
  rep.f_at_1 = v[0];
  for (int i = 0; i <= cells; ++i)
    for (int j = i + 2; j <= cells; j += 2) {
      const auto mid = static_cast<std::size_t>((i + j) / 2);
      const double excess =
          v[mid] - 0.5 * (v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(j)]);
      rep.midpoint_violation = std::max(rep.midpoint_violation, excess);
    }
  double prev = -1e300;
  for (int k = 1; k <= cells; ++k) {
    const double chord = (v[static_cast<std::size_t>(k)] - v[0]) / (t[static_cast<std::size_t>(k)] - 1.0);
    rep.chord_violation = std::max(rep.chord_violation, prev - chord);
    prev = std::max(prev, chord);
  }
  rep.ok = std::abs(rep.f_at_1) <= 1e-10 && rep.midpoint_violation <= tol && rep.chord_violation <= tol;
  return rep;
}

}  // namespace sconv

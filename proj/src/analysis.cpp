#include "biphoton/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace biphoton::analysis {

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Parabolic refinement of an extremum at sample k.
double refine(const std::vector<double>& axis, const std::vector<double>& v, std::size_t k) {
  if (k == 0 || k + 1 >= v.size()) return axis[k];
  const double denom = v[k - 1] - 2.0 * v[k] + v[k + 1];
  if (denom == 0.0) return axis[k];
  const double shift = 0.5 * (v[k - 1] - v[k + 1]) / denom;
  return axis[k] + shift * (axis[1] - axis[0]);
}

} // namespace

double fwhm(const std::vector<double>& axis, const std::vector<double>& values) {
  if (axis.size() != values.size() || axis.size() < 3) throw Error("fwhm needs a sampled profile");
  const std::size_t k = argmax(values);
  const double half = 0.5 * values[k];
  if (!(half > 0.0)) throw Error("fwhm of an all-zero profile is undefined");

  double left = axis.front();
  for (std::size_t i = k; i-- > 0;) {
    if (values[i] <= half) {
      const double t = (half - values[i]) / (values[i + 1] - values[i]);
      left = axis[i] + t * (axis[i + 1] - axis[i]);
      break;
    }
  }
  double right = axis.back();
  for (std::size_t i = k + 1; i < values.size(); ++i) {
    if (values[i] <= half) {
      const double t = (values[i - 1] - half) / (values[i - 1] - values[i]);
      right = axis[i - 1] + t * (axis[i] - axis[i - 1]);
      break;
    }
  }
  return right - left;
}

double first_minimum_after(const std::vector<double>& axis, const std::vector<double>& values,
                           double from) {
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (axis[i] <= from) continue;
    if (values[i] <= values[i - 1] && values[i] < values[i + 1])
      return refine(axis, values, i);
  }
  throw Error("no local minimum found beyond the requested position");
}

double peak_position(const std::vector<double>& axis, const std::vector<double>& values) {
  return refine(axis, values, argmax(values));
}

double fringe_period(const std::vector<double>& axis, const std::vector<double>& values) {
  // First sidelobe of the autocorrelation.  Direct peak picking is fragile
  // against aperture ripple, and a spectral-line search loses sparse fringe
  // combs under the envelope hump; the autocorrelation handles both, since
  // full-contrast fringes always print their lag on it.
  const std::size_t n = values.size();
  if (n < 16 || axis.size() != n) throw Error("fringe period needs a sampled profile");
  const double h = (axis.back() - axis.front()) / static_cast<double>(n - 1);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = values[i] - mean;

  // overlap-normalized: the biased estimate tapers linearly in the lag and
  // drags the sidelobe inward by ~1%
  const std::size_t max_lag = n / 2;
  std::vector<double> ac(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
    ac[lag] = s / static_cast<double>(n - lag);
  }

  auto is_min = [&](std::size_t l) {
    return ac[l] <= ac[l - 1] && ac[l] <= ac[l + 1] && ac[l] <= ac[l - 2] && ac[l] <= ac[l + 2];
  };
  auto is_max = [&](std::size_t l) {
    return ac[l] >= ac[l - 1] && ac[l] >= ac[l + 1] && ac[l] >= ac[l - 2] && ac[l] >= ac[l + 2];
  };
  std::size_t valley1 = 0, peak = 0, valley2 = 0;
  for (std::size_t l = 2; l + 2 <= max_lag; ++l) {
    if (valley1 == 0 && is_min(l)) {
      valley1 = l;
    } else if (valley1 != 0 && peak == 0 && is_max(l)) {
      peak = l;
    } else if (peak != 0 && is_min(l)) {
      valley2 = l;
      break;
    }
  }
  if (peak == 0) throw Error("no fringe sidelobe found in the autocorrelation");
  if (valley2 == 0) valley2 = std::min(max_lag - 2, 2 * peak - valley1);

  // remove the envelope slope through the flanking valleys, then refine;
  // without this the declining envelope drags the lobe inward by ~1%
  const double slope = (ac[valley2] - ac[valley1]) / static_cast<double>(valley2 - valley1);
  auto flat = [&](std::size_t l) {
    return ac[l] - slope * static_cast<double>(l - valley1);
  };
  std::size_t best = peak;
  for (std::size_t l = valley1 + 1; l < valley2; ++l)
    if (flat(l) > flat(best)) best = l;
  const double fm = flat(best), fl = flat(best - 1), fr = flat(best + 1);
  const double denom = fl - 2.0 * fm + fr;
  const double shift = denom != 0.0 ? 0.5 * (fl - fr) / denom : 0.0;
  return (static_cast<double>(best) + shift) * h;
}

double centroid(const std::vector<double>& axis, const std::vector<double>& values) {
  double m = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    m += values[i];
    mx += values[i] * axis[i];
  }
  if (m == 0.0) throw Error("centroid of an all-zero profile is undefined");
  return mx / m;
}

Centroid2D centroid2d(const CorrelationMap& map) {
  const std::size_t na = map.axis_a.size();
  const std::size_t nb = std::max<std::size_t>(1, map.axis_b.size());
  double m = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t ib = 0; ib < nb; ++ib) {
    for (std::size_t ia = 0; ia < na; ++ia) {
      const double v = map.values[ib * na + ia];
      m += v;
      mx += v * map.axis_a[ia];
      if (!map.axis_b.empty()) my += v * map.axis_b[ib];
    }
  }
  if (m == 0.0) throw Error("centroid of an all-zero map is undefined");
  return {mx / m, map.axis_b.empty() ? 0.0 : my / m};
}

BBox half_max_bbox(const CorrelationMap& map) {
  const std::size_t na = map.axis_a.size();
  const std::size_t nb = std::max<std::size_t>(1, map.axis_b.size());
  const double half = 0.5 * *std::max_element(map.values.begin(), map.values.end());
  double alo = 0, ahi = 0, blo = 0, bhi = 0;
  bool any = false;
  for (std::size_t ib = 0; ib < nb; ++ib) {
    for (std::size_t ia = 0; ia < na; ++ia) {
      if (map.values[ib * na + ia] < half) continue;
      const double a = map.axis_a[ia];
      const double b = map.axis_b.empty() ? 0.0 : map.axis_b[ib];
      if (!any) {
        alo = ahi = a;
        blo = bhi = b;
        any = true;
      } else {
        alo = std::min(alo, a);
        ahi = std::max(ahi, a);
        blo = std::min(blo, b);
        bhi = std::max(bhi, b);
      }
    }
  }
  if (!any) throw Error("half-max bounding box of an all-zero map is undefined");
  return {ahi - alo, bhi - blo};
}

double gradient_energy(const CorrelationMap& map) {
  const std::size_t na = map.axis_a.size();
  const std::size_t nb = std::max<std::size_t>(1, map.axis_b.size());
  const double peak = *std::max_element(map.values.begin(), map.values.end());
  if (!(peak > 0.0)) return 0.0;
  double e = 0.0;
  for (std::size_t ib = 0; ib < nb; ++ib) {
    for (std::size_t ia = 0; ia < na; ++ia) {
      const double v = map.values[ib * na + ia] / peak;
      if (ia + 1 < na) {
        const double d = map.values[ib * na + ia + 1] / peak - v;
        e += d * d;
      }
      if (ib + 1 < nb) {
        const double d = map.values[(ib + 1) * na + ia] / peak - v;
        e += d * d;
      }
    }
  }
  return e;
}

double contrast(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double sum = *hi + *lo;
  return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

namespace {

double interp1(const std::vector<double>& axis, const std::vector<double>& vals, double x) {
  if (x <= axis.front() || x >= axis.back()) return 0.0;
  const double h = axis[1] - axis[0];
  const std::size_t i = static_cast<std::size_t>((x - axis.front()) / h);
  const double t = (x - axis[i]) / h;
  return vals[i] * (1.0 - t) + vals[i + 1] * t;
}

} // namespace

ScaleFit fit_magnification(const std::vector<double>& image_axis,
                           const std::vector<double>& image_values,
                           const std::vector<double>& object_axis,
                           const std::vector<double>& object_values, double m_lo, double m_hi) {
  if (image_axis.size() != image_values.size() || object_axis.size() != object_values.size())
    throw Error("fit_magnification needs matching axis/value arrays");
  auto ncc = [&](double m, int sign) {
    double dot = 0.0, ii = 0.0, mm = 0.0;
    for (std::size_t k = 0; k < image_axis.size(); ++k) {
      const double model = interp1(object_axis, object_values, sign * image_axis[k] / m);
      dot += image_values[k] * model;
      ii += image_values[k] * image_values[k];
      mm += model * model;
    }
    return (ii > 0.0 && mm > 0.0) ? dot / std::sqrt(ii * mm) : 0.0;
  };
  ScaleFit best;
  for (int sign : {-1, +1}) {
    double lo = m_lo, hi = m_hi;
    double bm = lo, bc = -1.0;
    for (int round = 0; round < 4; ++round) {
      const int steps = 48;
      for (int j = 0; j <= steps; ++j) {
        const double m = lo + (hi - lo) * j / steps;
        const double c = ncc(m, sign);
        if (c > bc) {
          bc = c;
          bm = m;
        }
      }
      const double w = (hi - lo) / steps;
      lo = std::max(m_lo, bm - 2.0 * w);
      hi = std::min(m_hi, bm + 2.0 * w);
    }
    if (bc > best.correlation) {
      best.correlation = bc;
      best.magnification = bm;
      best.inverted = sign < 0;
    }
  }
  return best;
}

double rank1_residual(const CorrelationMap& map) {
  const std::size_t na = map.axis_a.size();
  const std::size_t nb = map.axis_b.size();
  if (nb == 0) throw Error("rank-1 residual needs a two-axis map");

  std::vector<double> u(na, 1.0), v(nb, 0.0);
  for (int it = 0; it < 64; ++it) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      double s = 0.0;
      for (std::size_t ia = 0; ia < na; ++ia) s += map.values[ib * na + ia] * u[ia];
      v[ib] = s;
    }
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;
    for (std::size_t ia = 0; ia < na; ++ia) {
      double s = 0.0;
      for (std::size_t ib = 0; ib < nb; ++ib) s += map.values[ib * na + ia] * v[ib];
      u[ia] = s;
    }
    double nu = 0.0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;
    for (double& x : u) x /= nu;
  }
  // sigma_1 = u^T M^T v after normalization
  double sigma = 0.0;
  for (std::size_t ib = 0; ib < nb; ++ib)
    for (std::size_t ia = 0; ia < na; ++ia) sigma += v[ib] * map.values[ib * na + ia] * u[ia];
  double frob2 = 0.0;
  for (double x : map.values) frob2 += x * x;
  const double res2 = std::max(0.0, frob2 - sigma * sigma);
  return std::sqrt(res2 / frob2);
}

} // namespace biphoton::analysis

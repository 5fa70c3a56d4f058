#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracles {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename T>
T simpson_rec(const std::function<T(double)>& f, double a, double m, double b, T fa, T fm, T fb,
              T whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T fl = f(lm);
  const T fr = f(rm);
  const T left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
  const T sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) < 15.0 * tol) return sum + (sum - whole) / 15.0;
  return simpson_rec(f, a, lm, m, fa, fl, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, rm, b, fm, fr, fb, right, tol * 0.5, depth - 1);
}

template <typename T>
T simpson(const std::function<T(double)>& f, double a, double b, double tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const T fa = f(a), fm = f(m), fb = f(b);
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  return simpson<double>(f, a, b, tol, max_depth);
}

cplx adaptive_simpson_c(const std::function<cplx(double)>& f, double a, double b, double tol,
                        int max_depth) {
  return simpson<cplx>(f, a, b, tol, max_depth);
}

cplx fresnel_line_integral(double beta, double gamma) {
  // stationary point of phi = beta a^2/2 + gamma a
  const double astar = -gamma / beta;
  const double w = std::sqrt(400.0 / std::abs(beta)); // 200 rad of phase each side
  const double lo = astar - w;
  const double hi = astar + w;
  auto integrand = [beta, gamma](double a) {
    const double phi = 0.5 * beta * a * a + gamma * a;
    return cplx(std::cos(phi), std::sin(phi));
  };
  const cplx body = simpson<cplx>(integrand, lo, hi, 1e-9, 30);

  // two-term integration-by-parts tails at both truncation edges
  auto tail = [beta, gamma, &integrand](double edge) {
    const double p = std::abs(beta * edge + gamma);
    const cplx e = integrand(edge);
    return e * (cplx(0.0, 1.0) / p + beta / (p * p * p));
  };
  return body + tail(hi) + tail(lo);
}

double j1_reference(double x) { return std::cyl_bessel_j(1.0, x); }

double j1_first_root() {
  double lo = 3.0, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (j1_reference(lo) * j1_reference(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Bare free kernel with the 1-D cascade-consistent prefactor, written out
// against the raw formula.
cplx kernel(double from, double to, double z, double omega) {
  const double c = 299792458.0;
  const double mag = std::sqrt(omega / (2.0 * kPi * c * z));
  const double phase = omega * z / c + omega * (to - from) * (to - from) / (2.0 * c * z) -
                       kPi / 4.0;
  return mag * cplx(std::cos(phase), std::sin(phase));
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  // n odd: composite Simpson; weights h/3 * {1,4,2,...,4,1}
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double c = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * h / 3.0;
  }
  return w;
}

} // namespace

std::vector<double> popper_m2_profile(const std::vector<double>& scan_x, double slit_a,
                                      double pump_waist, double b1, double so, double f,
                                      double lens_radius, double d2, double lambda) {
  const double c = 299792458.0;
  const double omega = 2.0 * kPi * c / lambda;

  const std::size_t ns = 1537;
  const double s_half = 4.0e-3;
  const double hs = 2.0 * s_half / (ns - 1);
  const std::vector<double> ws = simpson_weights(ns, hs);

  const std::size_t nl = 4097;
  const double l_half = 6.5e-3;
  const double hl = 2.0 * l_half / (nl - 1);
  const std::vector<double> wl = simpson_weights(nl, hl);

  const std::size_t no = 33;
  const double ho = slit_a / (no - 1);
  const std::vector<double> wo = simpson_weights(no, ho);

  std::vector<double> profile(scan_x.size(), 0.0);
  std::vector<cplx> t_col(ns);
  for (std::size_t io = 0; io < no; ++io) {
    const double xo = -0.5 * slit_a + io * ho;
    // lens-plane factor for this object point
    std::vector<cplx> u(nl);
    for (std::size_t il = 0; il < nl; ++il) {
      const double xl = -l_half + il * hl;
      if (std::abs(xl) > lens_radius) {
        u[il] = 0.0;
        continue;
      }
      const double lens_phase = -omega * xl * xl / (2.0 * c * f);
      u[il] = wl[il] * kernel(xl, xo, so, omega) *
              cplx(std::cos(lens_phase), std::sin(lens_phase));
    }
    // T(s -> xo) through the lens
    for (std::size_t is = 0; is < ns; ++is) {
      const double xs = -s_half + is * hs;
      cplx acc(0.0, 0.0);
      for (std::size_t il = 0; il < nl; ++il) {
        if (u[il] == cplx(0.0, 0.0)) continue;
        const double xl = -l_half + il * hl;
        acc += kernel(xs, xl, b1, omega) * u[il];
      }
      const double apod = std::exp(-xs * xs / (pump_waist * pump_waist));
      t_col[is] = acc * apod * ws[is];
    }
    // bucket over the slit and scan over x2
    for (std::size_t ix = 0; ix < scan_x.size(); ++ix) {
      cplx psi(0.0, 0.0);
      for (std::size_t is = 0; is < ns; ++is) {
        const double xs = -s_half + is * hs;
        psi += t_col[is] * kernel(xs, scan_x[ix], d2, omega);
      }
      profile[ix] += wo[io] * std::norm(psi);
    }
  }
  double peak = 0.0;
  for (double v : profile) peak = std::max(peak, v);
  if (peak > 0.0)
    for (double& v : profile) v /= peak;
  return profile;
}

} // namespace oracles

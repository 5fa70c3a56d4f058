#pragma once

namespace biphoton {

/// First-order Bessel function of the first kind.  Power series for small
/// arguments, Hankel asymptotic expansion beyond; absolute error below 1e-10.
double bessel_j1(double x);

/// somb(x) = 2 J1(x) / x, the circular-pupil point-spread profile, with the
/// removable singularity at 0 filled by its limit 1.
double somb(double x);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

} // namespace biphoton

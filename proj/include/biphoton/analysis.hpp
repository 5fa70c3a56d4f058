#pragma once

#include <cstddef>
#include <vector>

#include "biphoton/correlator.hpp"

namespace biphoton::analysis {

/// Full width at half maximum of a sampled profile, by linear interpolation
/// of the half-max crossings around the global peak.
double fwhm(const std::vector<double>& axis, const std::vector<double>& values);

/// Position of the first local minimum at or beyond `from` (default: the
/// peak position), refined by parabolic interpolation.
double first_minimum_after(const std::vector<double>& axis, const std::vector<double>& values,
                           double from);

/// Abscissa of the global maximum, parabolic-refined.
double peak_position(const std::vector<double>& axis, const std::vector<double>& values);

/// Fringe period from the two first-order maxima flanking the central peak.
double fringe_period(const std::vector<double>& axis, const std::vector<double>& values);

/// Intensity-weighted centroid.
double centroid(const std::vector<double>& axis, const std::vector<double>& values);

struct Centroid2D {
  double x = 0.0;
  double y = 0.0;
};
Centroid2D centroid2d(const CorrelationMap& map);

/// Half-max bounding box widths of a two-axis map.
struct BBox {
  double width_a = 0.0;
  double width_b = 0.0;
};
BBox half_max_bbox(const CorrelationMap& map);

/// Sum of squared finite-difference gradients of the peak-normalized map;
/// an edge-sharpness figure that drops when the map blurs.
double gradient_energy(const CorrelationMap& map);

/// Michelson contrast (max - min) / (max + min).
double contrast(const std::vector<double>& values);

/// Fits image(y) ~ object(sign * y / m) by scanning magnitudes and both
/// signs for the best normalized cross-correlation.
struct ScaleFit {
  double magnification = 0.0; // |m|
  bool inverted = false;      // best sign was negative
  double correlation = 0.0;   // NCC at the optimum
};
ScaleFit fit_magnification(const std::vector<double>& image_axis,
                           const std::vector<double>& image_values,
                           const std::vector<double>& object_axis,
                           const std::vector<double>& object_values, double m_lo, double m_hi);

/// Relative Frobenius residual of the best rank-1 approximation of a
/// two-axis map, by power iteration.  Zero for factorizable maps.
double rank1_residual(const CorrelationMap& map);

} // namespace biphoton::analysis

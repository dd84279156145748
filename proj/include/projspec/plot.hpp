#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "projspec/detpoly.hpp"
#include "projspec/roots.hpp"

namespace projspec {

struct SlicePoint {
  int index = 0;  // sweep sample
  double w0 = 0.0;
  Cplx z;
};

/// Roots z of p(z, w0) for w0 sampled uniformly on [from, to]. Within one
/// sample the roots are sorted by (Re z, Im z).
inline std::vector<SlicePoint> plot_slice(const BivarPoly& p, double from, double to, int samples) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 samples required");
  std::vector<SlicePoint> out;
  for (int s = 0; s < samples; ++s) {
    const double w0 = from + (to - from) * s / (samples - 1);
    auto roots = poly_roots(univariate_slice(p, SliceMode::FixW, w0));
    std::sort(roots.begin(), roots.end(), [](Cplx x, Cplx y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    for (const auto& z : roots) out.push_back({s, w0, z});
  }
  return out;
}

inline std::string emit_slice_csv(const std::vector<SlicePoint>& pts) {
  std::string out = "w0,re_z,im_z\n";
  for (const auto& pt : pts)
    out += format_real(pt.w0) + "," + format_real(pt.z.real()) + "," + format_real(pt.z.imag()) + "\n";
  return out;
}

/// Static scatter of the slice roots in the z-plane, hue running with the
/// sweep index.
inline std::string emit_slice_svg(const std::vector<SlicePoint>& pts, int samples) {
  constexpr double size = 480.0, pad = 24.0;
  double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
  if (!pts.empty()) {
    lo_x = hi_x = pts.front().z.real();
    lo_y = hi_y = pts.front().z.imag();
    for (const auto& pt : pts) {
      lo_x = std::min(lo_x, pt.z.real());
      hi_x = std::max(hi_x, pt.z.real());
      lo_y = std::min(lo_y, pt.z.imag());
      hi_y = std::max(hi_y, pt.z.imag());
    }
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
  auto px = [&](double x) { return size / 2 + (x - cx) / span * (size - 2 * pad); };
  auto py = [&](double y) { return size / 2 - (y - cy) / span * (size - 2 * pad); };

  char buf[160];
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  out += "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"0\" y1=\"%.3f\" x2=\"480\" y2=\"%.3f\" stroke=\"#ccc\"/>\n", py(0.0), py(0.0));
  out += buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"0\" x2=\"%.3f\" y2=\"480\" stroke=\"#ccc\"/>\n", px(0.0), px(0.0));
  out += buf;
  for (const auto& pt : pts) {
    const int hue = samples > 1 ? 240 * pt.index / (samples - 1) : 0;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2\" fill=\"hsl(%d,80%%,45%%)\"/>\n",
                  px(pt.z.real()), py(pt.z.imag()), hue);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace projspec

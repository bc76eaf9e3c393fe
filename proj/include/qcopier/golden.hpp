#pragma once

#include <cmath>
#include <stdexcept>

namespace qcopier {

struct LineMinimum {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Golden-section search for the minimum of a unimodal f on [a, b]; stops
/// once the bracket is shorter than tol.
template <class F>
LineMinimum golden_section_minimize(F&& f, double a, double b, double tol = 1e-9,
                                    int max_iter = 200) {
  if (!(b > a)) throw std::invalid_argument("golden_section_minimize: empty bracket");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  for (; it < max_iter && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  LineMinimum m;
  m.x = 0.5 * (a + b);
  m.fx = f(m.x);
  m.iterations = it;
  // the bracket ends themselves may be better at a boundary minimum
  if (const double fa = f(a); fa < m.fx) m = {a, fa, it};
  if (const double fb = f(b); fb < m.fx) m = {b, fb, it};
  return m;
}

}  // namespace qcopier

#include "oracles.hpp"

namespace oracle {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

double kernel_cell_average(double t, double a, double b, double alpha) {
  const long double om = 1.0L - alpha;
  const long double hi = std::pow(static_cast<long double>(t) - a, om);
  const long double lo = std::pow(static_cast<long double>(t) - b, om);
  return static_cast<double>((hi - lo) / (om * (static_cast<long double>(b) - a)));
}

double veraar_wt_reference(double horizon) {
  // s = T - v^2, ds = 2v dv: integrand 2v sqrt(1/v^2 - 1/T) = 2 sqrt(1 - v^2/T).
  const double top = std::sqrt(horizon);
  return integrate([horizon](double v) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - v * v / horizon)); }, 0.0,
                   top, 1e-13);
}

std::vector<double> graded_nodes(double horizon, int n, double q) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) {
    const long double x = 1.0L - static_cast<long double>(i) / n;
    t[i] = static_cast<double>(horizon * (1.0L - std::pow(x, static_cast<long double>(q))));
  }
  t[n] = horizon;
  return t;
}

double resolvent_term(double horizon, double t, double s, int i) {
  const double l = std::log((horizon - t) / (horizon - s));
  double fact = 1.0;
  for (int k = 2; k <= i; ++k) fact *= k;
  return std::pow(l, i) / fact / (horizon - t);
}

}  // namespace oracle

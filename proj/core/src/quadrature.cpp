#include "dbmc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "dbmc/errors.hpp"

namespace dbmc {
namespace {

// Kronrod abscissae (descending; the last one is the centre) and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5, 7).
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_centre = f(centre);

  double kronrod = kWgk[7] * f_centre;
  double gauss = kWg[3] * f_centre;
  std::array<double, 7> f_left{};
  std::array<double, 7> f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f_left[j] = f(centre - dx);
    f_right[j] = f(centre + dx);
    kronrod += kWgk[j] * (f_left[j] + f_right[j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f_left[j] + f_right[j]);
  }

  // QUADPACK-style error scaling.
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(f_centre - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
  }
  asc *= std::abs(half);

  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  return Panel{a, b, kronrod * half, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& options) {
  std::priority_queue<Panel> panels;
  panels.push(gauss_kronrod_15(f, a, b));
  double total = panels.top().value;
  double total_error = panels.top().error;

  auto satisfied = [&] {
    return total_error <= std::max(options.absolute_tolerance,
                                   options.relative_tolerance * std::abs(total));
  };

  while (!satisfied()) {
    if (static_cast<int>(panels.size()) >= options.max_intervals) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge on [" << a << ", " << b
          << "]: estimate " << total << ", error " << total_error << " after "
          << panels.size() << " intervals";
      throw ConvergenceError(msg.str());
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval can no longer be split in floating point; accept it.
      panels.push(Panel{worst.a, worst.b, worst.value, 0.0});
      total_error -= worst.error;
      continue;
    }
    const Panel left = gauss_kronrod_15(f, worst.a, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from the panels to shed the drift of the running updates.
  QuadratureResult result;
  result.intervals = static_cast<int>(panels.size());
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : all) {
    result.value += p.value;
    result.estimated_error += p.error;
  }
  return result;
}

}  // namespace dbmc

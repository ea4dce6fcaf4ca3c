#include "homog/quadrature.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>

namespace homog {

namespace {

// Newton iteration on the Legendre polynomial roots, half the interval by
// symmetry.
GaussRule compute_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return rule;
}

std::mutex g_rule_mutex;
std::map<int, GaussRule> g_rules;

} // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
  // lock-free fast path for the small orders hit inside parallel assembly
  static std::array<std::atomic<const GaussRule*>, 65> cache{};
  if (order <= 64) {
    const GaussRule* p = cache[order].load(std::memory_order_acquire);
    if (p) return *p;
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    p = cache[order].load(std::memory_order_relaxed);
    if (!p) {
      p = new GaussRule(compute_rule(order));
      cache[order].store(p, std::memory_order_release);
    }
    return *p;
  }
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = g_rules.find(order);
  if (it == g_rules.end()) it = g_rules.emplace(order, compute_rule(order)).first;
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order) {
  const GaussRule& rule = gauss_rule(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double gauss_composite(const std::function<double(double)>& f, double a,
                       double b, int order, int panels) {
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k)
    sum += gauss_panel(f, a + k * w, a + (k + 1) * w, order);
  return sum;
}

double integrate_refined(const std::function<double(double)>& f, double a,
                         double b, int order, double rel_tol,
                         int max_doublings) {
  double prev = gauss_composite(f, a, b, order, 1);
  int panels = 2;
  for (int k = 0; k < max_doublings; ++k, panels *= 2) {
    double cur = gauss_composite(f, a, b, order, panels);
    double scale = std::max(std::fabs(cur), std::fabs(prev));
    // absolute floor: integrands that are numerically zero should converge
    if (std::fabs(cur - prev) <= rel_tol * scale + 1e-14) return cur;
    prev = cur;
  }
  throw QuadratureError("integrate_refined: no convergence after doubling refinement");
}

double integrate_graded_left(const std::function<double(double)>& f, double a,
                             double b, int order, int levels) {
  const double len = b - a;
  double sum = 0.0;
  double hi = b;
  for (int k = 1; k <= levels; ++k) {
    double lo = a + len * std::ldexp(1.0, -k);
    sum += gauss_panel(f, lo, hi, order);
    hi = lo;
  }
  sum += gauss_panel(f, a, hi, order);
  return sum;
}

double integrate_graded_right(const std::function<double(double)>& f, double a,
                              double b, int order, int levels) {
  const double len = b - a;
  double sum = 0.0;
  double lo = a;
  for (int k = 1; k <= levels; ++k) {
    double hi = b - len * std::ldexp(1.0, -k);
    sum += gauss_panel(f, lo, hi, order);
    lo = hi;
  }
  sum += gauss_panel(f, lo, b, order);
  return sum;
}

double integrate_unit_square(const std::function<double(double, double)>& f,
                             int order, double rel_tol) {
  auto estimate = [&](int panels) {
    const GaussRule& rule = gauss_rule(order);
    const double w = 1.0 / panels;
    double total = 0.0;
    for (int px = 0; px < panels; ++px)
      for (int py = 0; py < panels; ++py) {
        const double cx = (px + 0.5) * w, cy = (py + 0.5) * w;
        double sum = 0.0;
        for (int i = 0; i < order; ++i)
          for (int j = 0; j < order; ++j)
            sum += rule.weights[i] * rule.weights[j] *
                   f(cx + 0.5 * w * rule.nodes[i], cy + 0.5 * w * rule.nodes[j]);
        total += 0.25 * w * w * sum;
      }
    return total;
  };
  double prev = estimate(1);
  for (int panels = 2; panels <= 64; panels *= 2) {
    double cur = estimate(panels);
    double scale = std::max({std::fabs(cur), std::fabs(prev), 1e-300});
    if (std::fabs(cur - prev) <= rel_tol * scale + 1e-300) return cur;
    prev = cur;
  }
  throw QuadratureError("integrate_unit_square: tensor refinement did not converge");
}

} // namespace homog

#include "qzeno/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "qzeno/errors.hpp"
#include "qzeno/parallel.hpp"

namespace qzeno {

using Complex = std::complex<double>;

Complex HermitianKernel::operator()(double tau1, double tau2) const {
  Complex out;
  evaluate_block(std::span(&tau1, 1), std::span(&tau2, 1), std::span(&out, 1));
  return out;
}

void FunctionKernel::evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                                    std::span<Complex> out) const {
  for (std::size_t i = 0; i < tau1.size(); ++i)
    for (std::size_t j = 0; j < tau2.size(); ++j) out[i * tau2.size() + j] = f_(tau1[i], tau2[j]);
}

namespace {

GaussLegendreRule compute_gauss_legendre(int order) {
  GaussLegendreRule rule;
  const int n = order;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct Panel {
  double a;
  double b;
  std::size_t interval;
};

// 1-D nodes and weights of one panel at coarse and diagonal resolution.
struct PanelRule {
  std::vector<double> coarse_x;
  std::vector<double> coarse_w;
  std::vector<double> fine_x;
  std::vector<double> fine_w;
};

void append_rule(const GaussLegendreRule& rule, double a, double b, std::vector<double>& x,
                 std::vector<double>& w) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    x.push_back(mid + half * rule.nodes[k]);
    w.push_back(half * rule.weights[k]);
  }
}

std::size_t pieces(double width, double max_width) {
  if (!(max_width > 0.0)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width / max_width - 1e-9)));
}

struct CellResult {
  Complex value;
  std::uint64_t evals;
};

std::string format(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  if (order < 1) throw ValidationError("Gauss-Legendre order must be positive");
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

GridSpec GridSpec::for_regularization(std::vector<double> t_grid, double epsilon) {
  GridSpec spec;
  spec.t_grid = std::move(t_grid);
  spec.diagonal_refine_width = 8.0 * epsilon;
  spec.diagonal_panel_width = epsilon / 4.0;
  return spec;
}

void GridSpec::validate() const {
  if (t_grid.empty()) throw ValidationError("grid: no output times");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!std::isfinite(t_grid[k]) || t_grid[k] < 0.0)
      throw ValidationError("grid: output time " + std::to_string(k) + " is negative or not finite");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1]))
      throw ValidationError("grid: output times must be strictly increasing at index " +
                            std::to_string(k));
  }
  if (base_panels_per_unit < 8) throw ValidationError("grid: base_panels_per_unit must be >= 8");
  if (!(diagonal_refine_width >= 0.0) || !std::isfinite(diagonal_refine_width))
    throw ValidationError("grid: diagonal_refine_width must be >= 0");
  if (!(diagonal_panel_width > 0.0) || !std::isfinite(diagonal_panel_width))
    throw ValidationError("grid: diagonal_panel_width must be > 0");
  if (gauss_order != 4 && gauss_order != 8 && gauss_order != 16)
    throw ValidationError("grid: gauss_order must be 4, 8 or 16");
}

GridSpec GridSpec::refined() const {
  GridSpec r = *this;
  r.base_panels_per_unit *= 2;
  r.diagonal_panel_width *= 0.5;
  return r;
}

Complex pairwise_sum(std::span<const Complex> values) {
  if (values.size() <= 8) {
    Complex s{};
    for (const Complex& v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void check_hermitian(const HermitianKernel& kernel, double t_max) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(0.0, t_max);
  for (int k = 0; k < 16; ++k) {
    const double a = dist(rng);
    const double b = dist(rng);
    const Complex kab = kernel(a, b);
    const Complex kba = kernel(b, a);
    const double scale = std::max(std::abs(kab), std::abs(kba));
    if (std::abs(kba - std::conj(kab)) > 1e-8 * scale) {
      std::ostringstream os;
      os.precision(17);
      os << "kernel is not Hermitian: K(" << a << ", " << b << ") = " << kab << " but K(" << b
         << ", " << a << ") = " << kba;
      throw ContractViolation("quad.hermitian", os.str());
    }
  }
}

CumulativeIntegral cumulative_square_integral(const HermitianKernel& kernel, const GridSpec& spec) {
  spec.validate();
  const GaussLegendreRule& rule = gauss_legendre(spec.gauss_order);
  const std::size_t m = spec.t_grid.size();
  check_hermitian(kernel, spec.t_grid.back());

  std::vector<Panel> panels;
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double next = spec.t_grid[k];
    const double width = next - prev;
    if (width > 0.0) {
      const std::size_t n = pieces(width, 1.0 / spec.base_panels_per_unit);
      for (std::size_t p = 0; p < n; ++p) {
        const double a = prev + width * static_cast<double>(p) / static_cast<double>(n);
        const double b = p + 1 == n ? next : prev + width * static_cast<double>(p + 1) / static_cast<double>(n);
        panels.push_back({a, b, k});
      }
    }
    prev = next;
  }

  std::vector<PanelRule> rules(panels.size());
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    append_rule(rule, panel.a, panel.b, rules[p].coarse_x, rules[p].coarse_w);
    const std::size_t n = pieces(panel.b - panel.a, spec.diagonal_panel_width);
    for (std::size_t s = 0; s < n; ++s) {
      const double w = panel.b - panel.a;
      const double a = panel.a + w * static_cast<double>(s) / static_cast<double>(n);
      const double b = s + 1 == n ? panel.b : panel.a + w * static_cast<double>(s + 1) / static_cast<double>(n);
      append_rule(rule, a, b, rules[p].fine_x, rules[p].fine_w);
    }
  }

  // Cell (i, j), i <= j, lives at slot j (j + 1) / 2 + i. Column j belongs to
  // the step of panel j's interval.
  const std::size_t np = panels.size();
  std::vector<CellResult> cells(np * (np + 1) / 2);
  parallel_for(np, [&](std::size_t j) {
    std::vector<Complex> block;
    const std::size_t base = j * (j + 1) / 2;
    for (std::size_t i = 0; i <= j; ++i) {
      const double gap = std::max(0.0, panels[j].a - panels[i].b);
      const bool near = i == j || gap < spec.diagonal_refine_width;
      const auto& xi = near ? rules[i].fine_x : rules[i].coarse_x;
      const auto& wi = near ? rules[i].fine_w : rules[i].coarse_w;
      const auto& xj = near ? rules[j].fine_x : rules[j].coarse_x;
      const auto& wj = near ? rules[j].fine_w : rules[j].coarse_w;
      block.resize(xi.size() * xj.size());
      kernel.evaluate_block(xi, xj, block);
      Complex total{};
      for (std::size_t a = 0; a < xi.size(); ++a) {
        Complex row{};
        for (std::size_t b = 0; b < xj.size(); ++b) row += wj[b] * block[a * xj.size() + b];
        total += wi[a] * row;
      }
      if (i != j) total = Complex(2.0 * total.real(), 0.0);
      cells[base + i] = {total, static_cast<std::uint64_t>(block.size())};
    }
  });

  CumulativeIntegral result;
  result.values.assign(m, Complex{});
  std::vector<Complex> step_cells;
  Complex running{};
  std::size_t j = 0;
  for (std::size_t k = 0; k < m; ++k) {
    step_cells.clear();
    for (; j < np && panels[j].interval == k; ++j) {
      const std::size_t base = j * (j + 1) / 2;
      for (std::size_t i = 0; i <= j; ++i) {
        step_cells.push_back(cells[base + i].value);
        result.kernel_evals += cells[base + i].evals;
      }
    }
    running += pairwise_sum(step_cells);
    result.values[k] = running;
  }
  return result;
}

ConvergenceReport convergence_check(const HermitianKernel& kernel, const GridSpec& spec,
                                    double tolerance, std::optional<Complex> baseline) {
  ConvergenceReport report;
  report.t_max = spec.t_grid.back();
  report.tolerance = tolerance;
  report.value = baseline ? *baseline : cumulative_square_integral(kernel, spec).values.back();
  const GridSpec fine = spec.refined();
  const CumulativeIntegral refined = cumulative_square_integral(kernel, fine);
  report.refined_value = refined.values.back();
  report.kernel_evals = refined.kernel_evals;
  const double scale = std::abs(report.refined_value);
  const double diff = std::abs(report.refined_value - report.value);
  report.relative_difference = scale > 0.0 ? diff / scale : diff;
  report.passed = report.relative_difference < tolerance;
  if (!report.passed) {
    report.advice = "relative change " + format(report.relative_difference) + " exceeds " +
                    format(tolerance) + "; rerun with base_panels_per_unit >= " +
                    std::to_string(fine.base_panels_per_unit) + " and diagonal_panel_width <= " +
                    format(fine.diagonal_panel_width) + ", or gauss_order 16";
  }
  return report;
}

}  // namespace qzeno

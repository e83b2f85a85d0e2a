#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qzeno {

/// K(tau1, tau2) with K(b, a) == conj(K(a, b)). Implementations must be safe to
/// call concurrently.
class HermitianKernel {
 public:
  virtual ~HermitianKernel() = default;

  /// out[i * tau2.size() + j] = K(tau1[i], tau2[j]).
  virtual void evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                              std::span<std::complex<double>> out) const = 0;

  std::complex<double> operator()(double tau1, double tau2) const;
};

/// Adapts a plain callable; mostly for tests.
class FunctionKernel final : public HermitianKernel {
 public:
  using Function = std::function<std::complex<double>(double, double)>;

  explicit FunctionKernel(Function f) : f_(std::move(f)) {}

  void evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                      std::span<std::complex<double>> out) const override;

 private:
  Function f_;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int order);

struct GridSpec {
  std::vector<double> t_grid;       // output times, strictly increasing
  int base_panels_per_unit = 8;     // >= 8
  double diagonal_refine_width = 0.0;
  double diagonal_panel_width = 0.0;
  int gauss_order = 8;              // 4, 8 or 16

  /// Defaults tied to the regularization scale: refinement within 8 eps of
  /// the diagonal, panels of eps / 4 there.
  static GridSpec for_regularization(std::vector<double> t_grid, double epsilon);

  /// Throws ValidationError.
  void validate() const;

  /// Same grid with every panel count doubled.
  GridSpec refined() const;
};

struct CumulativeIntegral {
  std::vector<std::complex<double>> values;  // I(T_k) over [0, T_k]^2
  std::uint64_t kernel_evals = 0;
};

/// Spot-checks K(b, a) == conj(K(a, b)) on 16 pseudo-random pairs in
/// [0, t_max]^2 (relative tolerance 1e-8). Throws ContractViolation.
void check_hermitian(const HermitianKernel& kernel, double t_max);

/// I(T_k) = integral of K over [0, T_k]^2 for every output time.
///
/// Each step adds the strip [0, T_k] x [T_k, T_k+1] (doubled real part,
/// standing in for its mirror image) and the corner square, so the total work
/// is that of the largest square. Tensor Gauss-Legendre cells; cells within
/// diagonal_refine_width of tau1 == tau2 are split into sub-panels no wider
/// than diagonal_panel_width. Cell values land in fixed slots and are combined
/// by pairwise summation, so results do not depend on the thread count.
CumulativeIntegral cumulative_square_integral(const HermitianKernel& kernel, const GridSpec& spec);

struct ConvergenceReport {
  double t_max = 0.0;
  std::complex<double> value;          // I(T_M) at the given resolution
  std::complex<double> refined_value;  // I(T_M) with panel counts doubled
  double relative_difference = 0.0;
  double tolerance = 1e-6;
  bool passed = false;
  std::uint64_t kernel_evals = 0;      // of the refined pass
  std::string advice;
};

/// Recomputes I(T_M) with all panel counts doubled. `baseline` may carry an
/// already computed I(T_M) at the original resolution.
ConvergenceReport convergence_check(const HermitianKernel& kernel, const GridSpec& spec,
                                    double tolerance = 1e-6,
                                    std::optional<std::complex<double>> baseline = std::nullopt);

/// Fixed-order pairwise summation.
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace qzeno

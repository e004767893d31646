#pragma once

#include <map>
#include <utility>
#include <vector>

namespace ginprod::exact {

// b_{j,k} = -(1/2 pi i) \int_C (G(j-1/2+s) G(k-s) / (G(j-1/2) G(k)))^m ds / s
// along a vertical line Re s = offset inside (1/2 - j, 0).
struct BjkRequest {
  double j = 1.0;  // >= 1
  double k = 1.0;  // > 0, need not be an integer
  int m = 1;       // >= 1
};

struct ContourSpec {
  double offset = -0.25;     // abscissa of the vertical line
  double half_height = 0.0;  // truncation |Im s| <= half_height
  int panels = 40;           // Gauss-Legendre panels on each half line
  int nodes_per_panel = 16;
  // Im s = scale * sinh(u) with u uniform in panels; clusters nodes where the
  // integrand peaks. 0 means "derive from the curvature at the offset".
  double scale = 0.0;
};

struct ContourResult {
  double value = 0.0;
  double imag_residual = 0.0;  // |Im| of the assembled integral
  double log_peak = 0.0;       // log |integrand| at Im s = 0
  ContourSpec contour;
};

// Magnitude at +-i*half_height relative to the peak must be below this.
inline constexpr double kEdgeRatio = 1e-18;

// Saddle-point contour: the offset minimizes |integrand| along the real
// segment (1/2 - j, 0), where the integrand is also largest along the
// vertical line, so the quadrature never has to cancel large values.
ContourSpec default_contour(const BjkRequest& req);

// Same, but with a caller-chosen offset.
ContourSpec contour_at(const BjkRequest& req, double offset);

ContourResult b_coeff_detailed(const BjkRequest& req, const ContourSpec& contour);
double b_coeff(const BjkRequest& req, const ContourSpec& contour);
double b_coeff(const BjkRequest& req);

// Large-N limit of b_{j, j+l} with j = tN/2 and m = alpha N.
double b_asymptotic(double t, int l, double alpha);

// Memoized b_{j,k} for a fixed m. Not thread-safe; use one per thread.
class BTable {
 public:
  explicit BTable(int m);
  double operator()(double j, double k);
  int m() const { return m_; }
  std::size_t size() const { return cache_.size(); }

 private:
  int m_;
  std::map<std::pair<double, double>, double> cache_;
};

double expected_real_count(int N, int m);
double variance_real_count(int N, int m);

// Moments of the one-point function of the product matrix eigenvalues.
double moment(int N, int m, int order);

// Moments of the Lyapunov-rescaled eigenvalues lambda = sign(x)|x|^{1/m}.
// Order 0 reproduces the expected count.
double rescaled_moment(int N, int m, int order);

struct ExactReport {
  int N = 0;
  int m = 0;
  double expected_count = 0.0;
  double variance = 0.0;
  std::vector<std::pair<int, double>> moments;  // (order, value)
};

ExactReport exact_report(int N, int m, int max_moment);

}  // namespace ginprod::exact

#include "density_engine/density_table.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "common/error.hpp"
#include "common/format.hpp"
#include "common/quadrature.hpp"
#include "density_engine/density_point.hpp"

namespace rlb {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) {
  auto* p = fftw_alloc_real(n);
  if (!p) throw std::bad_alloc();
  return RealBuffer(p);
}

ComplexBuffer alloc_complex(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (!p) throw std::bad_alloc();
  return ComplexBuffer(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (!p_) fail(ErrorCode::accuracy, "FFTW could not create a plan");
  }
  ~Plan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

// Lagrange weights for nodes at offsets -2..3 and fractional position p.
std::array<double, 6> lagrange6(double p) {
  static constexpr std::array<double, 6> denom = {-120.0, 24.0, -12.0, 12.0, -24.0, 120.0};
  std::array<double, 6> d{};
  for (int j = 0; j < 6; ++j) d[j] = p - static_cast<double>(j - 2);
  std::array<double, 6> w{};
  for (int j = 0; j < 6; ++j) {
    double prod = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m != j) prod *= d[m];
    }
    w[j] = prod / denom[j];
  }
  return w;
}

void clamp_negatives(std::vector<double>& half, double t, double dx) {
  const double peak = half.front();
  for (std::size_t k = 0; k < half.size(); ++k) {
    half[k] = clamp_density(half[k], peak, t, static_cast<double>(k) * dx);
  }
}

// Sum over images m >= 1 of A t (|mP - x|^(-1-a) + (mP + x)^(-1-a)); the
// terms beyond 16 periods are replaced by their integral.
double image_sum(double amp_t, double alpha, double period, double x) {
  double s = 0.0;
  for (int m = 1; m <= 16; ++m) {
    const double mp = m * period;
    s += std::pow(mp - x, -1.0 - alpha) + std::pow(mp + x, -1.0 - alpha);
  }
  const double far = 16.5 * period;
  s += (std::pow(far - x, -alpha) + std::pow(far + x, -alpha)) / (alpha * period);
  return amp_t * s;
}

// Removes the periodization error of power-law tails. The correction is
// smooth on [0, X] because X <= P / 2, so it is evaluated on a coarse grid
// and interpolated.
void subtract_images(std::vector<double>& half, const TailHint& tail, double t, double dx,
                     double period) {
  const std::size_t n = half.size();
  const double amp_t = tail.power_amplitude * t;
  const double x_max = static_cast<double>(n - 1) * dx;
  if (n <= 2048) {
    for (std::size_t k = 0; k < n; ++k) {
      half[k] -= image_sum(amp_t, tail.power_index, period, static_cast<double>(k) * dx);
    }
    return;
  }
  constexpr std::size_t coarse = 1024;
  const double h = x_max / coarse;
  std::vector<double> c(coarse + 4);
  for (std::size_t j = 0; j < c.size(); ++j) {
    c[j] = image_sum(amp_t, tail.power_index, period, static_cast<double>(j) * h);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * dx / h;
    auto i = static_cast<std::ptrdiff_t>(std::floor(s));
    i = std::min<std::ptrdiff_t>(i, coarse - 1);
    const auto w = lagrange6(s - static_cast<double>(i));
    double v = 0.0;
    for (int j = 0; j < 6; ++j) v += w[j] * c[static_cast<std::size_t>(std::llabs(i + j - 2))];
    half[k] -= v;
  }
}

double upper_quartile(const std::vector<double>& half, double dx) {
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < half.size(); ++k) {
    const double m = 0.5 * (half[k] + half[k + 1]) * dx;
    if (m > 0.0 && cum + m >= 0.25) {
      return static_cast<double>(k) * dx + invert_linear_cell(half[k], half[k + 1], dx, 0.25 - cum);
    }
    cum += m;
  }
  return static_cast<double>(half.size() - 1) * dx;
}

}  // namespace

DensityTable::DensityTable(double t, InversionPlan plan, std::vector<double> half_values)
    : t_(t), plan_(plan), half_(std::move(half_values)) {
  if (half_.size() < 2) fail(ErrorCode::invalid_argument, "density table needs at least 3 nodes");
  quartile_ = upper_quartile(half_, plan_.dx);
}

std::vector<double> DensityTable::x_grid() const {
  const auto k_max = static_cast<std::ptrdiff_t>(half_points());
  std::vector<double> x;
  x.reserve(size());
  for (std::ptrdiff_t k = -k_max; k <= k_max; ++k) x.push_back(static_cast<double>(k) * dx());
  return x;
}

std::vector<double> DensityTable::values() const {
  const auto k_max = static_cast<std::ptrdiff_t>(half_points());
  std::vector<double> v;
  v.reserve(size());
  for (std::ptrdiff_t k = -k_max; k <= k_max; ++k) v.push_back(value(k));
  return v;
}

bool DensityTable::covers(double x) const noexcept {
  const double s = std::fabs(x) / dx();
  return std::isfinite(s) && std::floor(s) + 3.0 <= static_cast<double>(half_points());
}

double DensityTable::interpolate(double x) const noexcept {
  const double s = std::fabs(x) / dx();
  const auto i = static_cast<std::ptrdiff_t>(std::floor(s));
  const double p = s - static_cast<double>(i);
  if (p == 0.0) return value(i);
  const auto w = lagrange6(p);
  double v = 0.0;
  for (int j = 0; j < 6; ++j) v += w[j] * value(i + j - 2);
  return std::max(v, 0.0);
}

double DensityTable::trapezoid_mass() const noexcept {
  // Symmetric grid: dx * (f_0 + 2 sum_{k=1}^{K-1} f_k + f_K).
  double s = 0.0;
  for (std::size_t k = 1; k + 1 < half_.size(); ++k) s += half_[k];
  return dx() * (half_.front() + 2.0 * s + half_.back());
}

DensityTable DensityTable::scaled(double factor) const {
  auto v = half_;
  for (auto& x : v) x *= factor;
  return DensityTable(t_, plan_, std::move(v));
}

DensityTable density_grid(const CharacteristicExponent& model, double t, const InversionPlan& plan) {
  validate_plan(model, t, plan);
  const std::size_t n = plan.transform_size;
  const double du = plan.du();
  auto in = alloc_real(n);
  auto out = alloc_real(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = static_cast<double>(j) * du;
    in[j] = u <= plan.cutoff ? std::exp(t * model(u)) : 0.0;
  }
  std::unique_ptr<Plan> fft;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fft = std::make_unique<Plan>(
        fftw_plan_r2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_REDFT00, FFTW_ESTIMATE));
  }
  fft->execute();

  // Y_k = g_0 + (-1)^k g_{n-1} + 2 sum g_j cos(pi j k / (n-1)) is the
  // trapezoid sum of the cosine integral times 2 / du.
  std::vector<double> half(plan.half_points + 1);
  const double scale = du / (2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < half.size(); ++k) half[k] = scale * out[k];

  const TailHint tail = model.tail_hint();
  if (tail.heavy()) subtract_images(half, tail, t, plan.dx, plan.period());
  clamp_negatives(half, t, plan.dx);
  return DensityTable(t, plan, std::move(half));
}

DensityTable convolve(const DensityTable& a, const DensityTable& b) {
  if (a.dx() != b.dx() || a.half_points() != b.half_points()) {
    fail(ErrorCode::grid_mismatch, "convolve requires identical grids (dx " + format_double(a.dx()) +
                                       " vs " + format_double(b.dx()) + ", K " +
                                       std::to_string(a.half_points()) + " vs " +
                                       std::to_string(b.half_points()) + ")");
  }
  const std::size_t k_half = a.half_points();
  const std::size_t len = 2 * k_half + 1;
  std::size_t n = smooth_ceil(2 * len - 1);
  if (n % 2 == 1) n = smooth_ceil(n + 1);
  const std::size_t nc = n / 2 + 1;

  auto ra = alloc_real(n);
  auto rb = alloc_real(n);
  auto ca = alloc_complex(nc);
  auto cb = alloc_complex(nc);
  const auto av = a.values();
  const auto bv = b.values();
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(av.begin(), av.end(), ra.get());
  std::copy(bv.begin(), bv.end(), rb.get());

  std::unique_ptr<Plan> fa, fb, inv;
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    fa = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, ra.get(), ca.get(), FFTW_ESTIMATE));
    fb = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, rb.get(), cb.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(ni, ca.get(), ra.get(), FFTW_ESTIMATE));
  }
  fa->execute();
  fb->execute();
  for (std::size_t j = 0; j < nc; ++j) {
    const std::complex<double> za(ca[j][0], ca[j][1]);
    const std::complex<double> zb(cb[j][0], cb[j][1]);
    const auto zc = za * zb;
    ca[j][0] = zc.real();
    ca[j][1] = zc.imag();
  }
  inv->execute();

  // Node k of the result sits at linear-convolution index k + 2K.
  std::vector<double> half(k_half + 1);
  const double scale = a.dx() / static_cast<double>(n);
  for (std::size_t k = 0; k <= k_half; ++k) half[k] = scale * ra[k + 2 * k_half];
  clamp_negatives(half, a.t() + b.t(), a.dx());
  return DensityTable(a.t() + b.t(), a.plan(), std::move(half));
}

}  // namespace rlb

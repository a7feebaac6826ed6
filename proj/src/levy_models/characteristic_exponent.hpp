#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace rlb {

enum class ModelId {
  stable,
  tempered_stable,
  modified_tempered_stable,
  nig,
  gaussian_oracle,
  cauchy_oracle,
};

/// Tail behaviour used by the inversion planner to size the x-range.
///
/// Power-law models satisfy f_t(x) ~ amplitude * t * |x|^(-1-index) for
/// large |x|; light-tailed models decay at least like exp(-rate * |x|).
struct TailHint {
  double power_index = 0.0;  // 0 for light tails
  double power_amplitude = 0.0;
  double exp_rate = std::numeric_limits<double>::infinity();

  bool heavy() const noexcept { return power_index > 0.0; }
};

/// Characteristic exponent psi of a symmetric Levy process, so that
/// E[exp(iuX_t)] = exp(t psi(u)). Always real, even and nonpositive.
class CharacteristicExponent {
 public:
  static CharacteristicExponent stable(double alpha);
  static CharacteristicExponent tempered_stable(double alpha, double c, double lambda);
  static CharacteristicExponent modified_tempered_stable(double alpha);
  static CharacteristicExponent nig();
  static CharacteristicExponent gaussian(double sigma);
  static CharacteristicExponent cauchy();

  /// Parses "stable:alpha=1.5", "tempered:alpha=0.5,c=1,lambda=1",
  /// "mts:alpha=0.5", "nig", "gaussian:sigma=1" or "cauchy".
  static CharacteristicExponent parse(std::string_view spec);

  double operator()(double u) const noexcept;

  ModelId id() const noexcept { return id_; }
  double alpha() const noexcept { return alpha_; }
  double c() const noexcept { return c_; }
  double lambda() const noexcept { return lambda_; }
  double sigma() const noexcept { return sigma_; }

  /// Canonical spec string; parse(spec()) reproduces the model.
  std::string spec() const;

  TailHint tail_hint() const noexcept;

  friend bool operator==(const CharacteristicExponent&, const CharacteristicExponent&) = default;

 private:
  CharacteristicExponent(ModelId id, double alpha, double c, double lambda, double sigma);

  ModelId id_;
  double alpha_ = 0.0;
  double c_ = 0.0;
  double lambda_ = 0.0;
  double sigma_ = 0.0;
  double prefactor_ = 0.0;
};

double evaluate(const CharacteristicExponent& model, double u) noexcept;

const char* model_name(ModelId id) noexcept;

}  // namespace rlb

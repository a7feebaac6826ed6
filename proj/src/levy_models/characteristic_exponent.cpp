#include "levy_models/characteristic_exponent.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include "common/error.hpp"
#include "common/format.hpp"

namespace rlb {
namespace {

bool stable_index_ok(double alpha) {
  return std::isfinite(alpha) && alpha > 0.0 && alpha < 2.0 && alpha != 1.0;
}

double parse_number(std::string_view text, std::string_view key) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::invalid_argument,
         "model spec: cannot parse value '" + std::string(text) + "' for '" + std::string(key) + "'");
  }
  return value;
}

std::map<std::string, double, std::less<>> parse_params(std::string_view body) {
  std::map<std::string, double, std::less<>> out;
  while (!body.empty()) {
    auto comma = body.find(',');
    auto item = body.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      fail(ErrorCode::invalid_argument, "model spec: expected key=value, got '" + std::string(item) + "'");
    }
    auto key = item.substr(0, eq);
    if (!out.emplace(std::string(key), parse_number(item.substr(eq + 1), key)).second) {
      fail(ErrorCode::invalid_argument, "model spec: duplicate key '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

double take(std::map<std::string, double, std::less<>>& params, std::string_view key,
            std::string_view model) {
  auto it = params.find(key);
  if (it == params.end()) {
    fail(ErrorCode::invalid_argument,
         "model spec: '" + std::string(model) + "' requires parameter '" + std::string(key) + "'");
  }
  double v = it->second;
  params.erase(it);
  return v;
}

}  // namespace

CharacteristicExponent::CharacteristicExponent(ModelId id, double alpha, double c, double lambda,
                                               double sigma)
    : id_(id), alpha_(alpha), c_(c), lambda_(lambda), sigma_(sigma) {
  switch (id_) {
    case ModelId::tempered_stable:
      prefactor_ = std::tgamma(-alpha_) * c_ * std::pow(lambda_, alpha_);
      break;
    case ModelId::modified_tempered_stable:
      prefactor_ = std::pow(2.0, -alpha_ - 0.5) * std::tgamma(-alpha_) / std::sqrt(std::numbers::pi);
      break;
    default:
      break;
  }
}

CharacteristicExponent CharacteristicExponent::stable(double alpha) {
  if (!stable_index_ok(alpha)) {
    fail(ErrorCode::parameter_domain,
         "stable: alpha must lie in (0,1) or (1,2), got " + format_double(alpha));
  }
  return {ModelId::stable, alpha, 0.0, 0.0, 0.0};
}

CharacteristicExponent CharacteristicExponent::tempered_stable(double alpha, double c, double lambda) {
  if (!stable_index_ok(alpha)) {
    fail(ErrorCode::parameter_domain,
         "tempered stable: alpha must lie in (0,1) or (1,2), got " + format_double(alpha));
  }
  if (!(std::isfinite(c) && c > 0.0) || !(std::isfinite(lambda) && lambda > 0.0)) {
    fail(ErrorCode::parameter_domain, "tempered stable: c and lambda must be positive");
  }
  return {ModelId::tempered_stable, alpha, c, lambda, 0.0};
}

CharacteristicExponent CharacteristicExponent::modified_tempered_stable(double alpha) {
  // For alpha in (1,2) Gamma(-alpha) > 0 and the exponent turns positive.
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::parameter_domain,
         "modified tempered stable: alpha must lie in (0,1), got " + format_double(alpha));
  }
  return {ModelId::modified_tempered_stable, alpha, 0.0, 0.0, 0.0};
}

CharacteristicExponent CharacteristicExponent::nig() { return {ModelId::nig, 0.0, 0.0, 0.0, 0.0}; }

CharacteristicExponent CharacteristicExponent::gaussian(double sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    fail(ErrorCode::parameter_domain, "gaussian: sigma must be positive");
  }
  return {ModelId::gaussian_oracle, 0.0, 0.0, 0.0, sigma};
}

CharacteristicExponent CharacteristicExponent::cauchy() {
  return {ModelId::cauchy_oracle, 0.0, 0.0, 0.0, 0.0};
}

CharacteristicExponent CharacteristicExponent::parse(std::string_view spec) {
  auto colon = spec.find(':');
  auto name = spec.substr(0, colon);
  auto params = colon == std::string_view::npos ? std::map<std::string, double, std::less<>>{}
                                                 : parse_params(spec.substr(colon + 1));
  auto build = [&]() -> CharacteristicExponent {
    if (name == "stable") return stable(take(params, "alpha", name));
    if (name == "tempered") {
      double alpha = take(params, "alpha", name);
      double c = take(params, "c", name);
      double lambda = take(params, "lambda", name);
      return tempered_stable(alpha, c, lambda);
    }
    if (name == "mts") return modified_tempered_stable(take(params, "alpha", name));
    if (name == "nig") return nig();
    if (name == "gaussian") return gaussian(take(params, "sigma", name));
    if (name == "cauchy") return cauchy();
    fail(ErrorCode::invalid_argument, "model spec: unknown model '" + std::string(name) + "'");
  };
  auto model = build();
  if (!params.empty()) {
    fail(ErrorCode::invalid_argument,
         "model spec: unexpected parameter '" + params.begin()->first + "' for '" + std::string(name) + "'");
  }
  return model;
}

double CharacteristicExponent::operator()(double u) const noexcept {
  const double a = std::fabs(u);
  switch (id_) {
    case ModelId::stable:
      return -std::pow(a, alpha_);
    case ModelId::tempered_stable: {
      // Gamma(-alpha) c lambda^alpha [(1 - iu/lambda)^alpha + (1 + iu/lambda)^alpha - 2]
      // in polar form: 2 (1+v^2)^(alpha/2) cos(alpha atan v) - 2, v = u/lambda.
      const double v = a / lambda_;
      const double angle = alpha_ * std::atan(v);
      const double grow = std::expm1(0.5 * alpha_ * std::log1p(v * v));
      const double half = std::sin(0.5 * angle);
      const double bracket = 2.0 * (grow * std::cos(angle) - 2.0 * half * half);
      // Rounding can leave a positive residue of order 1e-30 near u = 0.
      return std::min(prefactor_ * bracket, 0.0);
    }
    case ModelId::modified_tempered_stable:
      return prefactor_ * std::expm1(alpha_ * std::log1p(a * a));
    case ModelId::nig:
      return -(a * a) / (1.0 + std::sqrt(1.0 + a * a));
    case ModelId::gaussian_oracle:
      return -0.5 * sigma_ * sigma_ * a * a;
    case ModelId::cauchy_oracle:
      return -a;
  }
  return 0.0;
}

double evaluate(const CharacteristicExponent& model, double u) noexcept { return model(u); }

std::string CharacteristicExponent::spec() const {
  switch (id_) {
    case ModelId::stable:
      return "stable:alpha=" + format_double(alpha_);
    case ModelId::tempered_stable:
      return "tempered:alpha=" + format_double(alpha_) + ",c=" + format_double(c_) +
             ",lambda=" + format_double(lambda_);
    case ModelId::modified_tempered_stable:
      return "mts:alpha=" + format_double(alpha_);
    case ModelId::nig:
      return "nig";
    case ModelId::gaussian_oracle:
      return "gaussian:sigma=" + format_double(sigma_);
    case ModelId::cauchy_oracle:
      return "cauchy";
  }
  return {};
}

TailHint CharacteristicExponent::tail_hint() const noexcept {
  TailHint hint;
  switch (id_) {
    case ModelId::stable:
      hint.power_index = alpha_;
      hint.power_amplitude =
          std::tgamma(1.0 + alpha_) * std::sin(0.5 * std::numbers::pi * alpha_) / std::numbers::pi;
      hint.exp_rate = 0.0;
      break;
    case ModelId::cauchy_oracle:
      hint.power_index = 1.0;
      hint.power_amplitude = 1.0 / std::numbers::pi;
      hint.exp_rate = 0.0;
      break;
    case ModelId::tempered_stable:
      hint.exp_rate = lambda_;
      break;
    case ModelId::modified_tempered_stable:
    case ModelId::nig:
      hint.exp_rate = 1.0;
      break;
    case ModelId::gaussian_oracle:
      break;
  }
  return hint;
}

const char* model_name(ModelId id) noexcept {
  switch (id) {
    case ModelId::stable: return "stable";
    case ModelId::tempered_stable: return "tempered_stable";
    case ModelId::modified_tempered_stable: return "modified_tempered_stable";
    case ModelId::nig: return "nig";
    case ModelId::gaussian_oracle: return "gaussian_oracle";
    case ModelId::cauchy_oracle: return "cauchy_oracle";
  }
  return "unknown";
}

}  // namespace rlb

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "ftlz/core.hpp"

namespace ftlz {

/// pred(i,j,k) = b[0] + b[1]*i + b[2]*j + b[3]*k in local block coordinates.
struct RegressionCoeffs {
  std::array<float, 4> b{};

  friend bool operator==(const RegressionCoeffs&, const RegressionCoeffs&) = default;
};

enum class PredictorKind : std::uint8_t { lorenzo = 0, regression = 1 };

struct PredictorEstimate {
  double e_reg = 0.0;
  double e_lor = 0.0;
  PredictorKind chosen = PredictorKind::lorenzo;
};

/// Strictly smaller regression error wins; ties go to Lorenzo.
inline PredictorKind choose_predictor(double e_reg, double e_lor) {
  return e_reg < e_lor ? PredictorKind::regression : PredictorKind::lorenzo;
}

/// Closed-form least squares on the regular grid. Axes of extent 1 get a zero
/// slope.
RegressionCoeffs fit_regression(std::span<const float> block, const Extent& extent);

inline float regression_predict(const RegressionCoeffs& c, std::size_t i, std::size_t j, std::size_t k) {
  float p = c.b[0];
  p = p + c.b[1] * static_cast<float>(i);
  p = p + c.b[2] * static_cast<float>(j);
  p = p + c.b[3] * static_cast<float>(k);
  return p;
}

/// First-order 3D Lorenzo over the in-block buffer `d`; neighbours outside the
/// block read as zero.
inline float lorenzo_predict(std::span<const float> d, const Extent& e, std::size_t i, std::size_t j, std::size_t k) {
  const std::size_t sj = e[2], si = e[1] * e[2];
  const std::size_t n = i * si + j * sj + k;
  const float d100 = i ? d[n - si] : 0.0f;
  const float d010 = j ? d[n - sj] : 0.0f;
  const float d001 = k ? d[n - 1] : 0.0f;
  const float d110 = (i && j) ? d[n - si - sj] : 0.0f;
  const float d101 = (i && k) ? d[n - si - 1] : 0.0f;
  const float d011 = (j && k) ? d[n - sj - 1] : 0.0f;
  const float d111 = (i && j && k) ? d[n - si - sj - 1] : 0.0f;
  return d100 + d010 + d001 - d110 - d101 - d011 + d111;
}

inline constexpr std::size_t kDefaultSampleStride = 8;

/// Estimates both predictors' absolute error on every `stride`-th point (in
/// canonical order, block origin excluded) and picks one. Lorenzo is evaluated
/// on original values.
PredictorEstimate sample_select(std::span<const float> block, const Extent& extent, const RegressionCoeffs& coeffs,
                                std::size_t stride = kDefaultSampleStride);

}  // namespace ftlz

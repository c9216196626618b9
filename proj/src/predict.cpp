#include "ftlz/predict.hpp"

#include <cmath>

namespace ftlz {

RegressionCoeffs fit_regression(std::span<const float> block, const Extent& e) {
  const std::size_t n = e[0] * e[1] * e[2];
  if (n == 0) return {};

  // The design is a full grid, so centred coordinates are mutually orthogonal
  // and the normal equations decouple.
  const double ci = (static_cast<double>(e[0]) - 1.0) / 2.0;
  const double cj = (static_cast<double>(e[1]) - 1.0) / 2.0;
  const double ck = (static_cast<double>(e[2]) - 1.0) / 2.0;

  double sum = 0.0, si = 0.0, sj = 0.0, sk = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < e[0]; ++i)
    for (std::size_t j = 0; j < e[1]; ++j)
      for (std::size_t k = 0; k < e[2]; ++k) {
        const double v = block[idx++];
        sum += v;
        si += (static_cast<double>(i) - ci) * v;
        sj += (static_cast<double>(j) - cj) * v;
        sk += (static_cast<double>(k) - ck) * v;
      }

  // sum over the grid of (i - ci)^2 = (m^2 - 1) m / 12 per axis, times the other extents
  auto axis_var = [](std::size_t m) { return (static_cast<double>(m) * m - 1.0) * static_cast<double>(m) / 12.0; };
  const double nd = static_cast<double>(n);
  const double vi = axis_var(e[0]) * static_cast<double>(e[1] * e[2]);
  const double vj = axis_var(e[1]) * static_cast<double>(e[0] * e[2]);
  const double vk = axis_var(e[2]) * static_cast<double>(e[0] * e[1]);

  const double b1 = e[0] > 1 ? si / vi : 0.0;
  const double b2 = e[1] > 1 ? sj / vj : 0.0;
  const double b3 = e[2] > 1 ? sk / vk : 0.0;
  const double b0 = sum / nd - b1 * ci - b2 * cj - b3 * ck;

  RegressionCoeffs c;
  c.b = {static_cast<float>(b0), static_cast<float>(b1), static_cast<float>(b2), static_cast<float>(b3)};
  return c;
}

PredictorEstimate sample_select(std::span<const float> block, const Extent& e, const RegressionCoeffs& coeffs,
                                std::size_t stride) {
  if (stride == 0) stride = 1;
  PredictorEstimate est;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < e[0]; ++i)
    for (std::size_t j = 0; j < e[1]; ++j)
      for (std::size_t k = 0; k < e[2]; ++k, ++idx) {
        // The origin's Lorenzo prediction is all padding and says nothing
        // about the block.
        if (idx == 0 || idx % stride != 0) continue;
        const double v = block[idx];
        est.e_reg += std::abs(v - static_cast<double>(regression_predict(coeffs, i, j, k)));
        est.e_lor += std::abs(v - static_cast<double>(lorenzo_predict(block, e, i, j, k)));
      }
  est.chosen = choose_predictor(est.e_reg, est.e_lor);
  return est;
}

}  // namespace ftlz

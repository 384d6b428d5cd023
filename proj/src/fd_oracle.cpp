// SPDX-License-Identifier: Apache-2.0
#include "linesol/fd_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace linesol {

FiniteDifferenceOracle::FiniteDifferenceOracle(const LSContext& ctx, double omega, double a,
                                               OracleSteps steps)
    : ctx_(ctx), omega_(omega), a_(a), steps_(steps), w_scale_(std::min(1.0, ctx.wp)) {}

const LSState& FiniteDifferenceOracle::at(int order, int i, int j) {
  if (i == 0 && j == 0) order = 0;  // one center for every step size
  const auto key = std::make_tuple(order, i, j);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  std::optional<SymField> warm;
  auto c = cache_.find({0, 0, 0});
  if (c != cache_.end()) warm = c->second.eta;
  AuxOptions opts;
  opts.polish_steps = 5;
  const double h = order == 1 ? steps_.first : order == 2 ? steps_.second : steps_.third;
  LSState st = solve_auxiliary(ctx_, omega_ + i * h * w_scale_, a_ + j * h, warm, opts);
  return cache_.emplace(key, std::move(st)).first->second;
}

namespace {

// 1-D stencils as (offset, weight) lists, weights to be divided by h^order.
struct Stencil {
  std::array<int, 7> off;
  std::array<double, 7> w;
  int len;
  int order;
};

const Stencil kD1{{-2, -1, 1, 2}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}, 4, 1};
const Stencil kD2{{-2, -1, 0, 1, 2},
                  {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}, 5, 2};
const Stencil kD3{{-3, -2, -1, 1, 2, 3},
                  {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8}, 6, 3};
const Stencil kId{{0}, {1.0}, 1, 0};

// Σ_s Σ_t wω_s wa_t f(s, t) / (hω^order_ω · ha^order_a)
template <class T, class F>
T apply(F f, const Stencil& sw, const Stencil& sa, double hw, double ha) {
  T acc{};
  bool first = true;
  for (int s = 0; s < sw.len; ++s) {
    for (int t = 0; t < sa.len; ++t) {
      const double c = sw.w[s] * sa.w[t];
      if (first) {
        acc = c * f(sw.off[s], sa.off[t]);
        first = false;
      } else {
        acc = acc + c * f(sw.off[s], sa.off[t]);
      }
    }
  }
  return (1.0 / (std::pow(hw, sw.order) * std::pow(ha, sa.order))) * acc;
}

template <class T, class Bundle, class F>
void fill(Bundle& b, int order, F f, const OracleSteps& st, double w_scale) {
  b.order = order;
  auto at = [&](int o) { return [&f, o](int i, int j) { return f(o, i, j); }; };
  const double h1 = st.first, h2 = st.second, h3 = st.third;
  const double s = w_scale;
  b.a = apply<T>(at(1), kId, kD1, s * h1, h1);
  b.w = apply<T>(at(1), kD1, kId, s * h1, h1);
  if (order >= 2) {
    b.aa = apply<T>(at(2), kId, kD2, s * h2, h2);
    b.ww = apply<T>(at(2), kD2, kId, s * h2, h2);
    b.aw = apply<T>(at(2), kD1, kD1, s * h2, h2);
  }
  if (order >= 3) {
    b.aaa = apply<T>(at(3), kId, kD3, s * h3, h3);
    b.www = apply<T>(at(3), kD3, kId, s * h3, h3);
    b.aaw = apply<T>(at(3), kD1, kD2, s * h3, h3);
    b.aww = apply<T>(at(3), kD2, kD1, s * h3, h3);
  }
}

}  // namespace

DerivativeBundle FiniteDifferenceOracle::phi(int order) {
  DerivativeBundle d;
  fill<SymField>(d, order, [this](int o, int i, int j) { return at(o, i, j).phi; }, steps_,
                 w_scale_);
  return d;
}

FparBundle FiniteDifferenceOracle::fpar(int order) {
  FparBundle b;
  fill<double>(b, order, [this](int o, int i, int j) { return at(o, i, j).f_parallel; },
               steps_, w_scale_);
  return b;
}

}  // namespace linesol

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlpot/error.hpp"
#include "nlpot/wolff.hpp"

namespace nlpot {

DiscreteWolffOperator::DiscreteWolffOperator(const Params& pr, std::span<const Point> targets,
                                             std::span<const Point> sources, double t_min)
    : delta_(pr.delta), t_min_(t_min), nt_(targets.size()), ns_(sources.size()) {
  if (!(pr.s > 0.0)) throw InvalidArgument("DiscreteWolffOperator: requires s > 0");
  if (!(t_min >= 0.0)) throw InvalidArgument("DiscreteWolffOperator: t_min must be >= 0");
  const double decay = pr.s * pr.delta;
  order_.resize(nt_ * ns_);
  seg_.resize(nt_ * ns_);
  std::vector<double> dist(ns_);
  std::vector<std::uint32_t> idx(ns_);
  for (std::size_t i = 0; i < nt_; ++i) {
    for (std::size_t j = 0; j < ns_; ++j) dist[j] = distance(targets[i], sources[j]);
    std::iota(idx.begin(), idx.end(), 0U);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b]; });
    for (std::size_t k = 0; k < ns_; ++k) {
      const double lo = std::max(dist[idx[k]], t_min);
      const double hi = k + 1 < ns_ ? std::max(dist[idx[k + 1]], t_min) : kInf;
      order_[i * ns_ + k] = idx[k];
      seg_[i * ns_ + k] = power_segment(lo, hi, decay);
    }
  }
}

void DiscreteWolffOperator::apply(std::span<const double> weights, std::span<double> out) const {
  for (std::size_t i = 0; i < nt_; ++i) {
    const std::uint32_t* ord = &order_[i * ns_];
    const double* seg = &seg_[i * ns_];
    double cum = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < ns_; ++k) {
      cum += weights[ord[k]];
      if (cum > 0.0 && seg[k] > 0.0) acc += detail::pow_fast(cum, delta_) * seg[k];
    }
    out[i] = acc;
  }
}

void DiscreteWolffOperator::gradient(std::span<const double> weights, std::span<const double> coeff,
                                     std::span<double> grad, std::span<double> singular) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  std::fill(singular.begin(), singular.end(), 0.0);
  std::vector<double> cum(ns_);
  for (std::size_t i = 0; i < nt_; ++i) {
    if (coeff[i] == 0.0) continue;
    const std::uint32_t* ord = &order_[i * ns_];
    const double* seg = &seg_[i * ns_];
    double c = 0.0;
    for (std::size_t k = 0; k < ns_; ++k) {
      c += weights[ord[k]];
      cum[k] = c;
    }
    double regular = 0.0;
    double empty = 0.0;
    for (std::size_t k = ns_; k-- > 0;) {
      if (seg[k] > 0.0) {
        if (cum[k] > 0.0) {
          regular += delta_ == 1.0 ? seg[k] : detail::pow_fast(cum[k], delta_) / cum[k] * seg[k];
        } else if (delta_ < 1.0) {
          empty += seg[k];
        } else if (delta_ == 1.0) {
          regular += seg[k];
        }
      }
      grad[ord[k]] += coeff[i] * delta_ * regular;
      singular[ord[k]] += coeff[i] * empty;
    }
  }
}

}  // namespace nlpot

#pragma once

#include <cstdint>

#include "pgreserve/auction.hpp"

namespace pgreserve::mc {

/// Trials per seeded block. Changing it changes every seeded result.
inline constexpr std::int64_t kBlockTrials = 1 << 14;

/// Raw power sums of one block of trials.
struct BlockSums
{
  std::int64_t n = 0;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;   // payment
  double w1 = 0, w2 = 0;                   // winning bid

  void add(double p, double w)
  {
    ++n;
    const double p2 = p * p;
    s1 += p;
    s2 += p2;
    s3 += p2 * p;
    s4 += p2 * p2;
    w1 += w;
    w2 += w * w;
  }

  void merge(const BlockSums& o)
  {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
    w1 += o.w1;
    w2 += o.w2;
  }
};

MonteCarloEstimate summarize(const BlockSums& total);
void validate(int n_bidders, std::int64_t n_trials);
BlockSums run_block(const BidDistribution& dist, int n_bidders, std::int64_t trials,
                    std::uint64_t seed);

} // namespace pgreserve::mc

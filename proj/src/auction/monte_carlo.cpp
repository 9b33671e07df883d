#include <cmath>
#include <vector>

#include "pgreserve/auction.hpp"
#include "pgreserve/error.hpp"
#include "monte_carlo_block.hpp"

namespace pgreserve {

namespace mc {

MonteCarloEstimate summarize(const BlockSums& t)
{
  MonteCarloEstimate out;
  const auto n = static_cast<double>(t.n);
  out.trials = t.n;
  const double mean = t.s1 / n;
  out.mean_payment = mean;
  out.mean_winning_bid = t.w1 / n;
  if (t.n < 2)
    return out;

  const double var = std::max((t.s2 - n * mean * mean) / (n - 1.0), 0.0);
  const double sd = std::sqrt(var);
  out.std_payment = sd;
  out.se_mean_payment = sd / std::sqrt(n);

  const double wmean = t.w1 / n;
  const double wvar = std::max((t.w2 - n * wmean * wmean) / (n - 1.0), 0.0);
  out.se_mean_winning_bid = std::sqrt(wvar / n);

  // Delta method on the sample variance, using the fourth central moment.
  const double m4 = (t.s4 - 4.0 * mean * t.s3 + 6.0 * mean * mean * t.s2) / n -
                    3.0 * mean * mean * mean * mean;
  const double var_of_var = std::max((m4 - var * var * (n - 3.0) / (n - 1.0)) / n, 0.0);
  out.se_std_payment = sd > 0.0 ? std::sqrt(var_of_var) / (2.0 * sd) : 0.0;
  return out;
}

BlockSums run_block(const BidDistribution& dist, int n_bidders, std::int64_t trials,
                    std::uint64_t seed)
{
  Rng rng(seed);
  BlockSums b;
  for (std::int64_t i = 0; i < trials; ++i) {
    double best = -HUGE_VAL;
    double second = -HUGE_VAL;
    for (int k = 0; k < n_bidders; ++k) {
      const double x = dist.draw(rng);
      if (x > best) {
        second = best;
        best = x;
      } else if (x > second) {
        second = x;
      }
    }
    const double p = n_bidders > 1 ? second : 0.0;
    b.add(p, best);
  }
  return b;
}

void validate(int n_bidders, std::int64_t n_trials)
{
  if (n_bidders < 1)
    throw ValidationError("monte_carlo_auction needs n_bidders >= 1");
  if (n_trials < 1)
    throw ValidationError("monte_carlo_auction needs n_trials >= 1");
}

} // namespace mc

MonteCarloEstimate monte_carlo_auction(const BidDistribution& dist, int n_bidders,
                                       std::int64_t n_trials, std::uint64_t seed)
{
  mc::validate(n_bidders, n_trials);
  const std::int64_t n_blocks = (n_trials + mc::kBlockTrials - 1) / mc::kBlockTrials;
  std::vector<mc::BlockSums> blocks(static_cast<std::size_t>(n_blocks));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    const std::int64_t first = b * mc::kBlockTrials;
    const std::int64_t count = std::min(mc::kBlockTrials, n_trials - first);
    blocks[static_cast<std::size_t>(b)] =
      mc::run_block(dist, n_bidders, count, derive_seed(seed, static_cast<std::uint64_t>(b)));
  }

  mc::BlockSums total;
  for (const auto& b : blocks)
    total.merge(b);
  return mc::summarize(total);
}

} // namespace pgreserve

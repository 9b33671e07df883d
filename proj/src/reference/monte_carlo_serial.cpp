#include <algorithm>
#include <functional>
#include <vector>

#include "../auction/monte_carlo_block.hpp"
#include "pgreserve/auction.hpp"

namespace pgreserve::reference {

// One pass over all trials in order; the generator is re-seeded at each
// block boundary and block sums are folded in block order.
MonteCarloEstimate monte_carlo_auction(const BidDistribution& dist, int n_bidders,
                                       std::int64_t n_trials, std::uint64_t seed)
{
  mc::validate(n_bidders, n_trials);
  mc::BlockSums total;
  mc::BlockSums block;
  Rng rng(seed);
  std::vector<double> bids(static_cast<std::size_t>(n_bidders));
  for (std::int64_t i = 0; i < n_trials; ++i) {
    if (i % mc::kBlockTrials == 0) {
      if (i > 0)
        total.merge(block);
      block = {};
      rng = Rng(derive_seed(seed, static_cast<std::uint64_t>(i / mc::kBlockTrials)));
    }
    for (auto& b : bids)
      b = dist.draw(rng);
    double payment = 0.0;
    double winning = bids.front();
    if (n_bidders > 1) {
      std::vector<double> sorted = bids;
      std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
      winning = sorted[0];
      payment = sorted[1];
    }
    block.add(payment, winning);
  }
  total.merge(block);
  return mc::summarize(total);
}

} // namespace pgreserve::reference

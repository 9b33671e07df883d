#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pgreserve/rng.hpp"

namespace pgreserve {

/// Standard normal helpers shared by the log-normal and kernel models.
double normal_cdf(double z);
double normal_sf(double z);
double normal_quantile(double p);

/// Bid model for the bidders of a single-item second-price auction.
/// Money is per impression.
class BidDistribution
{
public:
  struct Uniform
  {
    double v;   // upper support; bids ~ U[0, v]
  };
  struct LogNormal
  {
    double mu;
    double sigma;
  };
  /// Gaussian kernel smoothing of an observed bid sample.
  struct Empirical
  {
    std::vector<double> sample;   // sorted ascending
    double bandwidth;             // Silverman's rule of thumb
  };

  static BidDistribution uniform(double v);
  static BidDistribution log_normal(double mu, double sigma);
  static BidDistribution empirical(std::vector<double> bids);

  bool is_uniform() const { return std::holds_alternative<Uniform>(model_); }
  bool is_log_normal() const { return std::holds_alternative<LogNormal>(model_); }
  bool is_empirical() const { return std::holds_alternative<Empirical>(model_); }

  const Uniform* as_uniform() const { return std::get_if<Uniform>(&model_); }
  const LogNormal* as_log_normal() const { return std::get_if<LogNormal>(&model_); }
  const Empirical* as_empirical() const { return std::get_if<Empirical>(&model_); }

  std::string describe() const;

  double pdf(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x) without cancellation in the upper tail.
  double sf(double x) const;

  /// Integration domain. Log-normal is truncated at the 1e-10 and 1 - 1e-10
  /// quantiles; the kernel model at 8 bandwidths beyond the sample range.
  double lower() const;
  double upper() const;

  /// Largest value a payment can take in this model (v, the truncation
  /// point, or the largest observed bid).
  double max_bid() const;

  double draw(Rng& rng) const;

private:
  using Model = std::variant<Uniform, LogNormal, Empirical>;
  explicit BidDistribution(Model m)
    : model_(std::move(m))
  {
  }

  Model model_;
};

/// Per-impression competition level: the (real-valued) number of bidders.
class CompetitionLevel
{
public:
  explicit CompetitionLevel(double xi);
  double value() const { return xi_; }

private:
  double xi_;
};

/// Expected second-highest bid among xi bidders, by adaptive quadrature.
/// Zero for xi <= 1.
double expected_second_price(const BidDistribution& dist, CompetitionLevel xi);

/// Standard deviation of the second-highest bid. Zero for xi <= 1.
double payment_std(const BidDistribution& dist, CompetitionLevel xi);

/// Expected highest bid among xi bidders. Zero for xi < 1.
double expected_winning_bid(const BidDistribution& dist, CompetitionLevel xi);

/// All three order-statistic moments from one quadrature pass.
struct OrderStatMoments
{
  double payment_mean = 0.0;
  double payment_std = 0.0;
  double winning_mean = 0.0;
};
OrderStatMoments order_stat_moments(const BidDistribution& dist, CompetitionLevel xi);

/// Closed forms for U[0, v]. The second-highest of xi draws is v * Beta(xi-1, 2)
/// and the highest is v * Beta(xi, 1).
OrderStatMoments uniform_order_stat_moments(double v, double xi);

struct MonteCarloEstimate
{
  double mean_payment = 0.0;
  double std_payment = 0.0;
  double mean_winning_bid = 0.0;
  // Standard errors of the three estimates above.
  double se_mean_payment = 0.0;
  double se_std_payment = 0.0;
  double se_mean_winning_bid = 0.0;
  std::int64_t trials = 0;
};

/// Simulates n_trials auctions with n_bidders independent bids each. Trials
/// are drawn in fixed-size blocks with per-block seeds, so the parallel and
/// serial runs produce identical results.
MonteCarloEstimate monte_carlo_auction(const BidDistribution& dist, int n_bidders,
                                       std::int64_t n_trials, std::uint64_t seed);

namespace reference {
MonteCarloEstimate monte_carlo_auction(const BidDistribution& dist, int n_bidders,
                                       std::int64_t n_trials, std::uint64_t seed);
}

} // namespace pgreserve

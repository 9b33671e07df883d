#include <cmath>
#include <vector>

#include "doctest.h"
#include "pgreserve/auction.hpp"
#include "pgreserve/error.hpp"

using namespace pgreserve;

namespace {
double phi(const BidDistribution& d, double xi) { return expected_second_price(d, CompetitionLevel(xi)); }
double psi(const BidDistribution& d, double xi) { return payment_std(d, CompetitionLevel(xi)); }
double pi_(const BidDistribution& d, double xi) { return expected_winning_bid(d, CompetitionLevel(xi)); }
} // namespace

TEST_CASE("uniform second price matches v(xi-1)/(xi+1)")
{
  for (double v : {1.0, 2.5})
    for (double xi : {1.5, 2.0, 3.0, 5.0, 10.0, 50.0}) {
      const auto d = BidDistribution::uniform(v);
      CHECK(std::abs(phi(d, xi) - v * (xi - 1) / (xi + 1)) < 1e-6);
    }
  CHECK(phi(BidDistribution::uniform(1.0), 3.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("no second bidder means no payment")
{
  const auto d = BidDistribution::uniform(1.0);
  CHECK(phi(d, 1.0) == 0.0);
  CHECK(phi(d, 0.3) == 0.0);
  CHECK(psi(d, 1.0) == 0.0);
  CHECK(pi_(d, 0.5) == 0.0);
  // A single bidder wins with their own draw.
  CHECK(pi_(d, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("uniform moments follow the Beta order statistics")
{
  const auto d = BidDistribution::uniform(1.0);
  // Second highest of three U[0,1] is Beta(2,2): variance 1/20.
  CHECK(psi(d, 3.0) == doctest::Approx(std::sqrt(0.05)).epsilon(1e-8));
  CHECK(psi(d, 3.0) == doctest::Approx(0.2236).epsilon(1e-4));
  // Highest of three is Beta(3,1): mean 3/4.
  CHECK(pi_(d, 3.0) == doctest::Approx(0.75).epsilon(1e-9));

  for (double xi : {1.25, 2.0, 4.5, 20.0}) {
    const auto closed = uniform_order_stat_moments(1.0, xi);
    const auto m = order_stat_moments(d, CompetitionLevel(xi));
    CHECK(m.payment_mean == doctest::Approx(closed.payment_mean).epsilon(1e-8));
    CHECK(m.payment_std == doctest::Approx(closed.payment_std).epsilon(1e-7));
    CHECK(m.winning_mean == doctest::Approx(closed.winning_mean).epsilon(1e-8));
  }
}

TEST_CASE("log-normal quadrature agrees with the Monte-Carlo oracle")
{
  const auto d = BidDistribution::log_normal(0.0, 0.5);
  const auto mc = monte_carlo_auction(d, 5, 1'000'000, 20240607);
  const auto m = order_stat_moments(d, CompetitionLevel(5.0));
  CHECK(std::abs(m.payment_mean - mc.mean_payment) < 3 * mc.se_mean_payment);
  CHECK(std::abs(m.payment_std - mc.std_payment) < 3 * mc.se_std_payment);
  CHECK(std::abs(m.winning_mean - mc.mean_winning_bid) < 3 * mc.se_mean_winning_bid);
}

TEST_CASE("Monte-Carlo estimates")
{
  SUBCASE("two uniform bidders pay 1/3 on average")
  {
    const auto mc = monte_carlo_auction(BidDistribution::uniform(1.0), 2, 1'000'000, 7);
    CHECK(std::abs(mc.mean_payment - 1.0 / 3.0) < 0.002);
  }
  SUBCASE("a lone bidder never pays")
  {
    const auto mc = monte_carlo_auction(BidDistribution::log_normal(1.0, 1.0), 1, 5000, 3);
    CHECK(mc.mean_payment == 0.0);
    CHECK(mc.std_payment == 0.0);
    CHECK(mc.mean_winning_bid > 0.0);
  }
  SUBCASE("seeded runs repeat exactly")
  {
    const auto d = BidDistribution::log_normal(0.0, 0.5);
    const auto a = monte_carlo_auction(d, 4, 50'000, 11);
    const auto b = monte_carlo_auction(d, 4, 50'000, 11);
    CHECK(a.mean_payment == b.mean_payment);
    CHECK(a.std_payment == b.std_payment);
    CHECK(a.mean_winning_bid == b.mean_winning_bid);
  }
  SUBCASE("parameter validation")
  {
    const auto d = BidDistribution::uniform(1.0);
    CHECK_THROWS_AS(monte_carlo_auction(d, 0, 10, 1), ValidationError);
    CHECK_THROWS_AS(monte_carlo_auction(d, 2, 0, 1), ValidationError);
  }
}

TEST_CASE("order-statistic curves are ordered, continuous and monotone")
{
  const std::vector<BidDistribution> dists = {BidDistribution::uniform(2.0),
                                              BidDistribution::log_normal(0.0, 0.5),
                                              BidDistribution::log_normal(-1.0, 1.2)};
  for (const auto& d : dists) {
    double prev_phi = 0.0;
    const double scale = d.is_uniform() ? 2.0 : std::exp(d.as_log_normal()->mu);
    for (double xi = 0.0; xi <= 60.0; xi += 0.37) {
      const auto m = order_stat_moments(d, CompetitionLevel(xi));
      CHECK(m.winning_mean >= m.payment_mean - 1e-12);
      CHECK(m.payment_mean >= 0.0);
      CHECK(m.payment_std >= 0.0);
      CHECK(m.payment_mean >= prev_phi - 1e-9 * scale);
      prev_phi = m.payment_mean;
    }
    for (double xi : {1.2, 2.0, 7.5, 40.0, 99.0}) {
      const auto a = order_stat_moments(d, CompetitionLevel(xi));
      const auto b = order_stat_moments(d, CompetitionLevel(xi + 1e-3));
      CHECK(std::abs(a.payment_mean - b.payment_mean) < 1e-2 * scale);
      CHECK(std::abs(a.payment_std - b.payment_std) < 1e-2 * scale);
      CHECK(std::abs(a.winning_mean - b.winning_mean) < 1e-2 * scale);
    }
  }
}

TEST_CASE("bid distribution validation and shape")
{
  CHECK_THROWS_AS(BidDistribution::uniform(0.0), ValidationError);
  CHECK_THROWS_AS(BidDistribution::log_normal(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(BidDistribution::empirical({}), ValidationError);
  CHECK_THROWS_AS(BidDistribution::empirical({1.0, -0.5}), ValidationError);
  CHECK_THROWS_AS(CompetitionLevel(-1.0), ValidationError);
  CHECK_THROWS_AS(CompetitionLevel(std::nan("")), ValidationError);

  const auto ln = BidDistribution::log_normal(0.3, 0.8);
  CHECK(ln.cdf(ln.lower()) == doctest::Approx(1e-10).epsilon(1e-3));
  CHECK(ln.sf(ln.upper()) == doctest::Approx(1e-10).epsilon(1e-3));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));

  const auto emp = BidDistribution::empirical({0.5, 0.1, 0.3, 0.9, 0.4});
  CHECK(emp.as_empirical()->sample.front() == 0.1);
  CHECK(emp.cdf(emp.lower()) < 1e-12);
  CHECK(emp.cdf(emp.upper()) > 1.0 - 1e-12);
  double prev = 0.0;
  for (double x = emp.lower(); x <= emp.upper(); x += 0.01) {
    CHECK(emp.cdf(x) >= prev);
    prev = emp.cdf(x);
  }
}

TEST_CASE("empirical curves track the Monte-Carlo oracle of the smoothed model")
{
  Rng rng(99);
  std::vector<double> bids;
  for (int i = 0; i < 400; ++i)
    bids.push_back(std::exp(rng.normal(0.0, 0.5)));
  const auto d = BidDistribution::empirical(bids);
  const auto m = order_stat_moments(d, CompetitionLevel(4.0));
  const auto mc = monte_carlo_auction(d, 4, 400'000, 5);
  CHECK(std::abs(m.payment_mean - mc.mean_payment) < 4 * mc.se_mean_payment);
  CHECK(std::abs(m.winning_mean - mc.mean_winning_bid) < 4 * mc.se_mean_winning_bid);
  CHECK(m.payment_mean <= d.max_bid());
}

#include <algorithm>
#include <cmath>

#include "pgreserve/error.hpp"
#include "pgreserve/pricing.hpp"

namespace pgreserve {

AuctionCurves AuctionCurves::from_distribution(BidDistribution dist)
{
  return AuctionCurves([d = std::move(dist)](double xi) {
    return order_stat_moments(d, CompetitionLevel(xi));
  });
}

AuctionCurves AuctionCurves::uniform_closed_form(double v)
{
  if (!(std::isfinite(v) && v > 0.0))
    throw ValidationError("uniform curves need finite v > 0");
  return AuctionCurves([v](double xi) { return uniform_order_stat_moments(v, xi); });
}

AuctionCurves AuctionCurves::from_fitted(const EmpiricalCurves& fitted)
{
  if (fitted.phi.empty() || fitted.psi.empty() || fitted.pi.empty())
    throw ValidationError("fitted auction curves are empty");
  return AuctionCurves([phi = fitted.phi, psi = fitted.psi, pi = fitted.pi](double xi) {
    return OrderStatMoments{phi(xi), psi(xi), pi(xi)};
  });
}

AuctionCurves AuctionCurves::from_function(MomentFn fn)
{
  if (!fn)
    throw ValidationError("auction curve function is empty");
  return AuctionCurves(std::move(fn));
}

OrderStatMoments AuctionCurves::at(double xi) const
{
  if (!std::isfinite(xi))
    throw ValidationError("competition level must be finite");
  OrderStatMoments m;
  if (xi < 1.0)
    return m;
  const OrderStatMoments raw = fn_(xi);
  m.winning_mean = std::max(raw.winning_mean, 0.0);
  if (xi > 1.0) {
    m.payment_mean = std::max(raw.payment_mean, 0.0);
    m.payment_std = std::max(raw.payment_std, 0.0);
    m.winning_mean = std::max(m.winning_mean, m.payment_mean);
  }
  return m;
}

AuctionCurves AuctionCurves::scaled(double c) const
{
  if (!(std::isfinite(c) && c > 0.0))
    throw ValidationError("curve scale factor must be positive");
  return AuctionCurves([fn = fn_, c](double xi) {
    OrderStatMoments m = fn(xi);
    m.payment_mean *= c;
    m.payment_std *= c;
    m.winning_mean *= c;
    return m;
  });
}

} // namespace pgreserve

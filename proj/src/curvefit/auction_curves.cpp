#include <algorithm>
#include <cmath>
#include <map>

#include "pgreserve/lowess.hpp"

namespace pgreserve {

std::vector<CompetitionBin> bin_by_competition(std::span<const AuctionObservation> records)
{
  struct Acc
  {
    std::int64_t n = 0;
    double sum = 0.0, sum2 = 0.0, win = 0.0;
  };
  std::map<int, Acc> acc;
  for (const auto& r : records) {
    if (r.bidders < 1)
      throw DataError("auction record with fewer than one bidder");
    auto& a = acc[r.bidders];
    ++a.n;
    a.sum += r.payment;
    a.sum2 += r.payment * r.payment;
    a.win += r.winning_bid;
  }

  std::vector<CompetitionBin> bins;
  for (const auto& [xi, a] : acc) {
    CompetitionBin b;
    b.xi = xi;
    b.count = a.n;
    const auto n = static_cast<double>(a.n);
    b.mean_payment = a.sum / n;
    b.mean_winning_bid = a.win / n;
    if (a.n > 1)
      b.std_payment = std::sqrt(std::max((a.sum2 - n * b.mean_payment * b.mean_payment) / (n - 1.0), 0.0));
    bins.push_back(b);
  }
  return bins;
}

namespace {

FittedCurve fit_scatter(std::span<const AuctionObservation> sample,
                        double (*value)(const AuctionObservation&), const RlwrOptions& opt)
{
  std::vector<CurvePoint> pts;
  pts.reserve(sample.size());
  for (const auto& r : sample)
    pts.push_back({static_cast<double>(r.bidders), value(r)});
  return fit_rlwr(pts, opt);
}

} // namespace

EmpiricalCurves build_auction_curves(std::span<const AuctionObservation> records,
                                     const CurveFitOptions& options)
{
  if (records.empty())
    throw DataError("no auction records to fit curves from");

  std::vector<AuctionObservation> sample;
  if (options.resample_rate != 1.0)
    sample = resample(records, options.resample_rate, options.seed);
  else
    sample.assign(records.begin(), records.end());

  EmpiricalCurves out;
  out.bins = bin_by_competition(sample);

  const bool single_bidder_only =
    std::all_of(out.bins.begin(), out.bins.end(), [](const CompetitionBin& b) { return b.xi <= 1; });
  if (single_bidder_only) {
    // Nobody ever faces a second bid: the payment curves are identically zero.
    const double x = out.bins.front().xi;
    out.phi = FittedCurve({x}, {0.0});
    out.psi = FittedCurve({x}, {0.0});
    out.pi = FittedCurve({x}, {std::max(out.bins.front().mean_winning_bid, 0.0)});
    return out;
  }
  if (out.bins.size() < 3)
    throw DataError("auction curves need at least 3 distinct competition levels, got " +
                    std::to_string(out.bins.size()));

  // phi and pi are smoothed over the per-auction scatter, one knot per level.
  out.phi = fit_scatter(sample, [](const AuctionObservation& r) { return r.payment; }, options.rlwr)
              .floored(0.0);
  FittedCurve pi =
    fit_scatter(sample, [](const AuctionObservation& r) { return r.winning_bid; }, options.rlwr);

  // psi^2 is the local mean of squared deviations from phi. Bisquare weights
  // would discard exactly the tail mass a variance measures, so no
  // robustness passes here.
  std::vector<CurvePoint> dev;
  dev.reserve(sample.size());
  for (const auto& r : sample) {
    const double e = r.payment - out.phi(r.bidders);
    dev.push_back({static_cast<double>(r.bidders), e * e});
  }
  RlwrOptions var_opt = options.rlwr;
  var_opt.robustness_iters = 0;
  const FittedCurve var = fit_rlwr(dev, var_opt);
  std::vector<double> sd(var.ys().begin(), var.ys().end());
  for (double& v : sd)
    v = std::sqrt(std::max(v, 0.0));
  out.psi = FittedCurve(std::vector<double>(var.xs().begin(), var.xs().end()), std::move(sd));

  // The winning bid can never be below the payment.
  std::vector<double> xs(pi.xs().begin(), pi.xs().end());
  std::vector<double> ys(pi.ys().begin(), pi.ys().end());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = std::max(ys[i], out.phi(xs[i]));
  out.pi = FittedCurve(std::move(xs), std::move(ys));
  return out;
}

} // namespace pgreserve

#include "pgreserve/surface.hpp"

namespace pgreserve::reference {

std::vector<double> predict_all(const SurfaceModel& model, std::span<const SurfacePoint> queries)
{
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries)
    out.push_back(predict(model, q.day, q.hour));
  return out;
}

} // namespace pgreserve::reference

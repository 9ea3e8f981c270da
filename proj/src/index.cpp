#include "turnhash/index.hpp"

#include <cmath>
#include <memory>

#include "turnhash/exact.hpp"

namespace turnhash {

IndexParams derive_params(std::size_t n, double p1, double p2, double delta) {
  if (!(p2 > 0.0 && p2 <= p1 && p1 <= 1.0 && p2 < 1.0))
    throw ParamError("derive_params: requires 0 < p2 <= p1 <= 1 with p2 < 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParamError("derive_params: requires delta in (0, 1)");
  IndexParams p;
  p.p1 = p1;
  p.p2 = p2;
  p.delta = delta;
  p.rho = p1 >= 1.0 ? 0.0 : std::log(1.0 / p1) / std::log(1.0 / p2);
  p.concat_k =
      n <= 1 ? 1
             : static_cast<int>(std::max<long long>(
                   1, guarded_ceil(std::log(static_cast<double>(n)) /
                                   std::log(1.0 / p2))));
  if (p1 >= 1.0) {
    p.tables_L = 1;
    return p;
  }
  const long long tables = std::max<long long>(
      1, guarded_ceil(std::log(1.0 / delta) / std::pow(p1, p.concat_k)));
  if (tables > 100'000'000)
    throw ParamError("derive_params: table count explodes at these (p1, p2, n)");
  p.tables_L = static_cast<int>(tables);
  return p;
}

FamilyAdapter<StepFunction> make_step_adapter(const HashFamily& fam) {
  FamilyAdapter<StepFunction> ad;
  ad.p1 = fam.p1;
  ad.p2 = fam.p2;
  switch (fam.kind) {
    case FamilyKind::RandomPoint:
      ad.data_hash = [fam](const StepFunction& f, std::uint64_t i) {
        return h1_apply(h1_draw(fam, i), f);
      };
      ad.distance = [](const StepFunction& a, const StepFunction& b) {
        return l1_distance(a, b);
      };
      break;
    case FamilyKind::MeanReduce:
      ad.data_hash = [fam](const StepFunction& f, std::uint64_t i) {
        return h1_apply(h1_draw(fam, i), mean_reduce(f));
      };
      ad.distance = [](const StepFunction& a, const StepFunction& b) {
        return d1_updown(a, b).distance;
      };
      break;
    case FamilyKind::AsymmetricTwoPoint:
      ad.data_hash = [fam](const StepFunction& f, std::uint64_t i) {
        return h2_data_hash(h2_draw(fam, i), f);
      };
      ad.query_hash = [fam](const StepFunction& g, std::uint64_t i) {
        return h2_query_hash(h2_draw(fam, i), g);
      };
      ad.distance = [](const StepFunction& a, const StepFunction& b) {
        return l2_distance(a, b);
      };
      break;
    case FamilyKind::DiscreteSample:
      throw ParamError(
          "make_step_adapter: DiscreteSample hashes through "
          "make_embedding_adapter");
  }
  return ad;
}

FamilyAdapter<std::vector<double>> make_vector_adapter(const HashFamily& fam) {
  if (fam.kind != FamilyKind::DiscreteSample)
    throw ParamError("make_vector_adapter: needs a DiscreteSample family");
  FamilyAdapter<std::vector<double>> ad;
  ad.p1 = fam.p1;
  ad.p2 = fam.p2;
  ad.data_hash = [fam](const std::vector<double>& v, std::uint64_t i) {
    return euclidean_apply(fam, i, v);
  };
  ad.distance = [](const std::vector<double>& a, const std::vector<double>& b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sq += d * d;
    }
    return std::sqrt(sq);
  };
  return ad;
}

FamilyAdapter<StepFunction> make_embedding_adapter(const HashFamily& fam) {
  auto table = std::make_shared<ProjectionTable>(fam);
  FamilyAdapter<StepFunction> ad;
  ad.p1 = fam.p1;
  ad.p2 = fam.p2;
  ad.begin_draw = [table](std::uint64_t i) { table->set_draw(i); };
  ad.data_hash = [table](const StepFunction& f, std::uint64_t) {
    return table->apply(f);
  };
  ad.distance = [dim = fam.dimension](const StepFunction& a,
                                      const StepFunction& b) {
    return embedded_l2(a, b, dim);
  };
  return ad;
}

}  // namespace turnhash

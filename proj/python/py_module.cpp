#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "turnhash/errors.hpp"
#include "turnhash/exact.hpp"
#include "turnhash/polyindex.hpp"
#include "turnhash/rng.hpp"
#include "turnhash/stepfn.hpp"
#include "turnhash/turning.hpp"

namespace py = pybind11;
using namespace turnhash;

namespace {

using VertexList = std::vector<std::pair<double, double>>;

Polygon poly_in(const std::string& id, const VertexList& verts) {
  Polygon p;
  p.id = id;
  p.vertices.reserve(verts.size());
  for (const auto& [x, y] : verts) p.vertices.push_back({x, y});
  return validate(std::move(p));
}

VertexList poly_out(const Polygon& p) {
  VertexList out;
  out.reserve(p.vertices.size());
  for (const auto& v : p.vertices) out.emplace_back(v.x, v.y);
  return out;
}

StepFunction step_in(std::vector<double> bp, std::vector<double> vals) {
  return make_step(std::move(bp), std::move(vals));
}

IndexVariant variant_in(const std::string& s) {
  if (s == "mean-reduce") return IndexVariant::MeanReduce;
  if (s == "step-shift") return IndexVariant::StepShift;
  throw ValidationError("unknown variant '" + s + "' (expected mean-reduce or step-shift)");
}

py::object hit_out(const PolygonQueryResult& res) {
  if (!res.hit) return py::none();
  return py::make_tuple(res.hit->id, res.hit->distance);
}

}  // namespace

PYBIND11_MODULE(turnhash, mod) {
  mod.doc() = "near-neighbor retrieval of polygons under turning-function distances";

  py::register_exception<ValidationError>(mod, "ValidationError");
  py::register_exception<ParamError>(mod, "ParamError");

  mod.def(
      "regular_polygon", [](int m) { return poly_out(make_regular_polygon(m)); },
      py::arg("m"));
  mod.def(
      "random_polygon",
      [](int m, std::uint64_t seed, std::uint64_t slot) {
        const RngStream gen(seed);
        return poly_out(make_random_polygon(m, gen, slot));
      },
      py::arg("m"), py::arg("seed"), py::arg("slot") = 0);
  mod.def(
      "spiral_polygon",
      [](int m, double epsilon, bool mirrored) {
        return poly_out(make_spiral_polygon(m, epsilon, mirrored));
      },
      py::arg("m"), py::arg("epsilon") = 0.1, py::arg("mirrored") = false);
  mod.def(
      "perturb_polygon",
      [](const VertexList& base, std::uint64_t seed, std::uint64_t slot,
         double magnitude) {
        const RngStream gen(seed);
        return poly_out(perturb_polygon(poly_in("base", base), gen, slot, magnitude));
      },
      py::arg("vertices"), py::arg("seed"), py::arg("slot") = 0,
      py::arg("magnitude") = 0.05);

  mod.def(
      "gon_bounds",
      [](int m) {
        const GonBounds b = gon_bounds(m);
        py::dict out;
        out["m"] = b.m;
        out["low"] = b.a_m;
        out["high"] = b.b_m;
        out["span"] = b.span_bound;
        return out;
      },
      py::arg("m"), "value and span bounds of m-gon turning functions");

  mod.def(
      "turning_function",
      [](const VertexList& verts) {
        const Polygon p = poly_in("q", verts);
        const StepFunction t = turning_function(p, first_edge_midpoint_reference(p));
        return py::make_tuple(t.breakpoints, t.values);
      },
      py::arg("vertices"),
      "breakpoints and values of the turning function, unit-perimeter domain");

  mod.def(
      "polygon_distance",
      [](const VertexList& a, const VertexList& b, int p) {
        const AlignedDistance res =
            polygon_distance(poly_in("a", a), poly_in("b", b), p);
        return py::make_tuple(res.distance, res.alpha, res.u);
      },
      py::arg("a"), py::arg("b"), py::arg("p") = 1,
      "slide-and-shift aligned distance; returns (distance, alpha, u)");

  mod.def(
      "d_updown",
      [](std::vector<double> bp1, std::vector<double> v1, std::vector<double> bp2,
         std::vector<double> v2, int p) {
        const StepFunction f = step_in(std::move(bp1), std::move(v1));
        const StepFunction g = step_in(std::move(bp2), std::move(v2));
        if (p == 1) {
          const AlignedDistance res = d1_updown(f, g);
          return py::make_tuple(res.distance, res.alpha);
        }
        if (p == 2) {
          const AlignedDistance res = d2_updown(f, g);
          return py::make_tuple(res.distance, res.alpha);
        }
        throw ParamError("p must be 1 or 2");
      },
      py::arg("breakpoints_f"), py::arg("values_f"), py::arg("breakpoints_g"),
      py::arg("values_g"), py::arg("p") = 1,
      "best vertical shift between two step functions; returns (distance, alpha)");

  mod.def(
      "d_slide",
      [](std::vector<double> bp1, std::vector<double> v1, std::vector<double> bp2,
         std::vector<double> v2, int p) {
        const AlignedDistance res = d_slide(step_in(std::move(bp1), std::move(v1)),
                                            step_in(std::move(bp2), std::move(v2)), p);
        return py::make_tuple(res.distance, res.alpha, res.u);
      },
      py::arg("breakpoints_f"), py::arg("values_f"), py::arg("breakpoints_g"),
      py::arg("values_g"), py::arg("p") = 1,
      "slide-and-shift distance between step functions; returns (distance, alpha, u)");

  py::class_<PolygonIndex>(mod, "PolygonIndex")
      .def(py::init([](const std::vector<std::pair<std::string, VertexList>>& polys,
                       int m, int p, double r, double c, const std::string& variant,
                       double delta, std::uint64_t seed) {
             std::vector<Polygon> stored;
             stored.reserve(polys.size());
             for (const auto& [id, verts] : polys) stored.push_back(poly_in(id, verts));
             PolygonIndexConfig cfg;
             cfg.m = m;
             cfg.p = p;
             cfg.r = r;
             cfg.c = c;
             cfg.variant = variant_in(variant);
             cfg.delta = delta;
             cfg.seed = seed;
             return PolygonIndex(std::move(stored), cfg);
           }),
           py::arg("polygons"), py::arg("m"), py::arg("p"), py::arg("r"),
           py::arg("c"), py::arg("variant") = "mean-reduce",
           py::arg("delta") = 0.1, py::arg("seed") = 0)
      .def(
          "query",
          [](const PolygonIndex& idx, const VertexList& verts) {
            return hit_out(idx.query(poly_in("q", verts)));
          },
          py::arg("vertices"),
          "returns (id, exact_distance) of a confirmed near neighbor, or None")
      .def(
          "query_batch",
          [](const PolygonIndex& idx, const std::vector<VertexList>& queries) {
            std::vector<Polygon> qs;
            qs.reserve(queries.size());
            for (std::size_t i = 0; i < queries.size(); ++i)
              qs.push_back(poly_in("q" + std::to_string(i), queries[i]));
            py::list out;
            for (const auto& res : idx.query_batch(qs)) out.append(hit_out(res));
            return out;
          },
          py::arg("queries"))
      .def("save", &PolygonIndex::save, py::arg("path"))
      .def_static("load", &PolygonIndex::load, py::arg("path"))
      .def_property_readonly(
          "ids",
          [](const PolygonIndex& idx) {
            std::vector<std::string> out;
            out.reserve(idx.polygons().size());
            for (const auto& p : idx.polygons()) out.push_back(p.id);
            return out;
          })
      .def("__len__",
           [](const PolygonIndex& idx) { return idx.polygons().size(); });
}

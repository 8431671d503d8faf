#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wcl/error.hpp"
#include "wcl/harness.hpp"

namespace py = pybind11;
using namespace wcl;

namespace {

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["method"] = r.method;
  d["N"] = r.n;
  d["sigma_s"] = r.sigma_s;
  d["x_c_over_D"] = r.x_c_over_d;
  d["sigma_l"] = r.sigma_l;
  d["doi"] = r.doi;
  d["participation"] = r.participation;
  d["mean_err_m"] = r.mean_err_m;
  d["mean_err_over_D"] = r.mean_err_over_d;
  d["std_err"] = r.std_err;
  d["trials"] = r.trials;
  d["skipped"] = r.skipped;
  d["D"] = r.spacing;
  return d;
}

py::dict report_dict(const OverheadReport& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["method"] = r.method;
  d["clusters"] = r.clusters;
  d["msg_count"] = r.msg_count;
  d["total_power_dbm"] = r.total_power_dbm();
  d["per_node_power_dbm"] = r.per_node_power_dbm();
  d["ops"] = r.ops;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wcl, m) {
  m.doc() = "Weighted centroid localization core";

  static py::exception<Error> exc(m, "WclError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  py::class_<Point2>(m, "Point2")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Point2{x, y}; }))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def("__repr__", [](const Point2& p) {
        return "Point2(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::enum_<ShadowingMode>(m, "ShadowingMode")
      .value("iid", ShadowingMode::iid)
      .value("correlated", ShadowingMode::correlated);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("p0", &ChannelParams::p0)
      .def_readwrite("d0", &ChannelParams::d0)
      .def_readwrite("gamma", &ChannelParams::gamma)
      .def_readwrite("sigma_s", &ChannelParams::sigma_s)
      .def_readwrite("x_c", &ChannelParams::x_c)
      .def_readwrite("mode", &ChannelParams::mode)
      .def_readwrite("doi", &ChannelParams::doi)
      .def_readwrite("doi_correlation", &ChannelParams::doi_correlation);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
      .def("derive", &Rng::derive)
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("normal", py::overload_cast<>(&Rng::normal));

  py::class_<Deployment>(m, "Deployment")
      .def_readonly("true_positions", &Deployment::true_positions)
      .def_readonly("measured_positions", &Deployment::measured_positions)
      .def_readwrite("pu", &Deployment::pu)
      .def_readonly("sigma_l", &Deployment::sigma_l)
      .def("size", &Deployment::size)
      .def("spacing", [](const Deployment& d) { return average_node_spacing(d); });

  m.def("place_fixed_grid", &place_fixed_grid, py::arg("radius"), py::arg("n"));
  m.def("place_random_grid", &place_random_grid, py::arg("radius"), py::arg("n"), py::arg("rng"));
  m.def("place_uniform_disk", &place_uniform_disk, py::arg("radius"), py::arg("n"), py::arg("rng"));
  m.def("place_uniform_square", &place_uniform_square, py::arg("half_side"), py::arg("n"), py::arg("rng"));
  m.def("apply_position_noise", &apply_position_noise, py::arg("dep"), py::arg("sigma_l"), py::arg("rng"));

  py::class_<RssRealization>(m, "RssRealization")
      .def_readonly("powers", &RssRealization::powers)
      .def_readonly("shadowing", &RssRealization::shadowing)
      .def_readonly("regularized", &RssRealization::regularized);

  m.def("mean_received_power", &mean_received_power, py::arg("params"), py::arg("distance"));
  m.def("sample_rss", py::overload_cast<const ChannelParams&, const Deployment&, Rng&>(&sample_rss),
        py::arg("params"), py::arg("dep"), py::arg("rng"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("position", &Estimate::position)
      .def_readonly("participants", &Estimate::participants)
      .def_readonly("weights", &Estimate::weights);

  m.def(
      "border_pmin",
      [](const ChannelParams& p, double radius, double margin) {
        WclConfig c;
        c.pmin = BorderQuantilePmin{margin};
        return compute_pmin(p, radius, c);
      },
      py::arg("params"), py::arg("radius"), py::arg("margin_sigmas") = 2.33);
  m.def("wcl_estimate", py::overload_cast<const Deployment&, const RssRealization&, double>(&wcl_estimate),
        py::arg("dep"), py::arg("rss"), py::arg("pmin"));
  m.def("strongest_node_estimate",
        py::overload_cast<const Deployment&, const RssRealization&>(&strongest_node_estimate));
  m.def("lateration_estimate",
        py::overload_cast<const Deployment&, const RssRealization&, const ChannelParams&>(&lateration_estimate));
  m.def("localization_error", &localization_error);

  m.def(
      "analyze_placement",
      [](const Deployment& dep, const ChannelParams& params, double pmin, const std::string& method) {
        const auto a = analyze_placement(dep, params, pmin, ratio_method_from_string(method));
        py::dict d;
        d["m_x"] = a.x.m_hat;
        d["m_y"] = a.y.m_hat;
        d["sigma_x"] = a.x.sigma_hat;
        d["sigma_y"] = a.y.sigma_hat;
        d["rho_xy"] = a.cross.rho_xy;
        d["mean_err"] = a.pdf.mean;
        d["std_err"] = a.pdf.std;
        d["grid"] = a.pdf.grid;
        d["density"] = a.pdf.density;
        d["fallback"] = a.pdf.fallback;
        return d;
      },
      py::arg("dep"), py::arg("params"), py::arg("pmin"), py::arg("method") = "hayya");

  m.def("link_tx_power",
        [](double p_r_min_dbm, double gamma, double distance, double shadow_db) {
          PowerModel pm;
          pm.p_r_min_dbm = p_r_min_dbm;
          pm.gamma = gamma;
          return link_tx_power(pm, distance, shadow_db);
        },
        py::arg("p_r_min_dbm"), py::arg("gamma"), py::arg("distance"), py::arg("shadow_db") = 0.0);
  m.def("cwcl_ops", &cwcl_ops);
  m.def("dwcl_ops", &dwcl_ops, py::arg("n"), py::arg("m"), py::arg("l"), py::arg("k"), py::arg("eta"));
  m.def("dwcl_message_count", &dwcl_message_count, py::arg("m"), py::arg("l"), py::arg("k"), py::arg("eta"));

  m.def(
      "run_experiment", [](const std::string& json) { return row_dict(run_experiment(parse_experiment_config(json))); },
      py::arg("config_json"), "Monte Carlo run of a JSON configuration; returns one result row.");
  m.def(
      "run_theory", [](const std::string& json) { return row_dict(run_theory(parse_experiment_config(json))); },
      py::arg("config_json"));
  m.def(
      "run_dwcl",
      [](const std::string& json) {
        const auto s = run_dwcl_experiment(parse_experiment_config(json), nullptr, nullptr);
        py::dict d = row_dict(s.row);
        d["fallbacks"] = s.fallbacks;
        d["eta"] = s.mean_eta;
        d["messages"] = s.mean_messages;
        return d;
      },
      py::arg("config_json"));
  m.def(
      "run_overhead",
      [](const std::string& json) {
        const auto c = run_overhead(parse_experiment_config(json));
        py::list out;
        for (const auto* r : {&c.cwcl_analytic, &c.cwcl_ledger, &c.dwcl_analytic, &c.dwcl_ledger}) {
          out.append(report_dict(*r));
        }
        return out;
      },
      py::arg("config_json"));
  m.def("figure_ids", &figure_ids);
}

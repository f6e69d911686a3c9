// Python bindings. Structured values (specs, schedules, certificates,
// level functions, Walsh polynomials) cross as the same JSON-shaped dicts the
// CLI reads and writes; rationals cross as fractions.Fraction.

#include "rankone/io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rankone;

namespace pybind11::detail {

template <>
struct type_caster<Rational> {
  PYBIND11_TYPE_CASTER(Rational, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    try {
      if (py::isinstance<py::str>(src)) {
        value = parse_rational(src.cast<std::string>());
        return true;
      }
      if (!py::hasattr(src, "numerator") || !py::hasattr(src, "denominator")) return false;
      const auto num = py::str(src.attr("numerator")).cast<std::string>();
      const auto den = py::str(src.attr("denominator")).cast<std::string>();
      value = Rational{BigInt{num}, BigInt{den}};
      value.canonicalize();
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }

  static handle cast(const Rational& q, return_value_policy, handle) {
    auto fraction = py::module_::import("fractions").attr("Fraction");
    auto builtins = py::module_::import("builtins");
    auto num = builtins.attr("int")(q.get_num().get_str());
    auto den = builtins.attr("int")(q.get_den().get_str());
    return fraction(num, den).release();
  }
};

}  // namespace pybind11::detail

namespace {

Json to_cpp(const py::handle& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return Json::parse(text);
}

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::tuple bracket(const Bracket& b) { return py::make_tuple(py::cast(b.lower), py::cast(b.upper)); }

CorrelationSequence sequence_from(const std::vector<Rational>& values) {
  CorrelationSequence s;
  for (const auto& v : values) s.entries.push_back({v, v});
  if (!values.empty()) s.norm_sq = values.front();
  return s;
}

SimulationConfig config_from(const py::object& cfg) {
  return cfg.is_none() ? SimulationConfig{} : simulation_config_from(to_cpp(cfg));
}

}  // namespace

PYBIND11_MODULE(_rankone, m) {
  m.doc() = "Exact rank-one constructions, correlations and certificates";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<PlanError>(m, "PlanError", PyExc_RuntimeError);
  py::register_exception<CorrelationError>(m, "CorrelationError", PyExc_RuntimeError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<ScheduleError>(m, "ScheduleError", PyExc_ValueError);
  py::register_exception<SpectralError>(m, "SpectralError", PyExc_ValueError);

  m.def("validate_spec", [](const py::object& spec) {
    const auto report = validate_spec(spec_from(to_cpp(spec)));
    py::list towers;
    for (const auto& t : report.towers) {
      towers.append(py::dict(py::arg("height") = t.height, py::arg("width") = py::cast(t.width)));
    }
    return py::dict(py::arg("ok") = report.ok(), py::arg("violations") = report.violations,
                    py::arg("towers") = towers, py::arg("spacer_mass") = py::cast(report.spacer_mass));
  });

  m.def("occurrence_set", [](const py::object& spec, std::size_t stage, std::size_t depth) {
    return occurrence_set(spec_from(to_cpp(spec)), stage, depth).positions;
  });

  m.def(
      "point_map",
      [](const py::object& spec, std::size_t depth, Position pos, std::int64_t steps,
         const std::vector<std::int64_t>& columns) {
        Geometry geo{spec_from(to_cpp(spec))};
        return point_map(geo, depth, pos, steps, columns);
      },
      py::arg("spec"), py::arg("depth"), py::arg("position"), py::arg("steps"),
      py::arg("columns") = std::vector<std::int64_t>{});

  m.def(
      "autocorrelation",
      [](const py::object& spec, const py::object& f, std::int64_t n, const Rational& tol) {
        return bracket(autocorrelation(spec_from(to_cpp(spec)), level_function_from(to_cpp(f)), n, tol));
      },
      py::arg("spec"), py::arg("f"), py::arg("n"), py::arg("tolerance") = Rational{0});

  m.def(
      "cross_correlation",
      [](const py::object& spec, const py::object& f, const py::object& g, std::int64_t n, const Rational& tol) {
        return bracket(cross_correlation(spec_from(to_cpp(spec)), level_function_from(to_cpp(f)),
                                         level_function_from(to_cpp(g)), n, tol));
      },
      py::arg("spec"), py::arg("f"), py::arg("g"), py::arg("n"), py::arg("tolerance") = Rational{0});

  m.def(
      "autocorrelation_sequence",
      [](const py::object& spec, const py::object& f, std::int64_t first, std::int64_t last, const Rational& tol) {
        const auto seq = autocorrelation_sequence(spec_from(to_cpp(spec)), level_function_from(to_cpp(f)), first,
                                                  last, tol);
        py::list out;
        for (const auto& b : seq.entries) out.append(bracket(b));
        return out;
      },
      py::arg("spec"), py::arg("f"), py::arg("first"), py::arg("last"), py::arg("tolerance") = Rational{0});

  m.def(
      "generate_schedule",
      [](const Rational& growth, std::int64_t horizon, const std::vector<std::int64_t>& seeds) {
        return to_py(to_json(generate_schedule(growth, horizon, seeds)));
      },
      py::arg("growth"), py::arg("horizon"), py::arg("seed_lengths") = std::vector<std::int64_t>{});

  m.def("validate_schedule", [](const py::object& s) {
    const auto r = validate_schedule(schedule_from(to_cpp(s)));
    return py::dict(py::arg("ok") = r.ok(), py::arg("violations") = r.violations,
                    py::arg("first_uncovered") = r.first_uncovered);
  });

  m.def(
      "plan_pair",
      [](const py::object& schedule, const py::object& policy) {
        const auto plan = plan_pair(schedule_from(to_cpp(schedule)),
                                    policy.is_none() ? PairPolicy{} : policy_from(to_cpp(policy)));
        return py::dict(py::arg("spec_S") = to_py(to_json(plan.spec_s)), py::arg("spec_T") = to_py(to_json(plan.spec_t)),
                        py::arg("cert_S") = to_py(to_json(plan.cert_s)), py::arg("cert_T") = to_py(to_json(plan.cert_t)),
                        py::arg("n0") = plan.n0);
      },
      py::arg("schedule"), py::arg("policy") = py::none());

  m.def("verify_certificate", [](const py::object& spec, const py::object& cert) {
    return to_py(to_json(verify_certificate(spec_from(to_cpp(spec)), certificate_from(to_cpp(cert)))));
  });

  m.def("fejer_density", [](const std::vector<Rational>& rho, std::int64_t order, std::size_t grid) {
    return fejer_density(sequence_from(rho), order, grid).values;
  });
  m.def("exact_density", [](const std::vector<Rational>& rho, std::size_t grid) {
    return exact_density(sequence_from(rho), grid).values;
  });
  m.def("chaos_exp_coefficients", [](const std::vector<Rational>& rho, std::int64_t cap) {
    const auto c = chaos_exp_coefficients(sequence_from(rho), cap);
    std::vector<Rational> values;
    for (const auto& b : c.coefficients.entries) values.push_back(b.lower);
    return py::make_tuple(py::cast(values), py::cast(c.tail_bounds));
  });

  m.def("inner_product", [](const py::object& p, const py::object& q) {
    return inner_product(walsh_from(to_cpp(p)), walsh_from(to_cpp(q)));
  });
  m.def("shift_power", [](const py::object& p, std::int64_t k) {
    return to_py(to_json(shift_power(walsh_from(to_cpp(p)), k)));
  });
  m.def("lemma3_truncate", [](const py::object& f, const Rational& delta) {
    const auto r = lemma3_truncate(walsh_from(to_cpp(f)), delta);
    return py::dict(py::arg("f_prime") = to_py(to_json(r.f_prime)), py::arg("M") = r.M,
                    py::arg("terms_kept") = r.terms_kept, py::arg("renormalized") = r.renormalized,
                    py::arg("distance_sq") = py::cast(r.distance_sq_bound));
  });
  m.def("corr_tail_certificate", [](const py::object& f, std::int64_t big_m, std::int64_t horizon) {
    return corr_tail_certificate(walsh_from(to_cpp(f)), big_m, horizon);
  });

  m.def(
      "gaussian_lag_covariance",
      [](const std::vector<Rational>& cov, std::int64_t length, const py::object& cfg) {
        const auto config = config_from(cfg);
        const auto s = gaussian_sample(sequence_from(cov), length, config);
        py::list out;
        for (const auto& e : lag_covariance(s, config.lag_max)) out.append(py::make_tuple(e.lag, e.estimate, e.std_error));
        return out;
      },
      py::arg("cov"), py::arg("length"), py::arg("config") = py::none());

  m.def(
      "poisson_linear_statistic",
      [](const py::object& spec, std::size_t depth, std::int64_t steps, const py::object& f, const py::object& cfg) {
        const auto s = spec_from(to_cpp(spec));
        const auto config = config_from(cfg);
        const auto pairs = poisson_sample_and_push(s, depth, steps, config);
        return to_py(to_json(linear_statistic_covariance(s, pairs, level_function_from(to_cpp(f)), config.confidence)));
      },
      py::arg("spec"), py::arg("depth"), py::arg("steps"), py::arg("f"), py::arg("config") = py::none());
}

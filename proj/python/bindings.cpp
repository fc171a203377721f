#include "contagion/errors.hpp"
#include "contagion/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace contagion;

namespace {

std::vector<std::pair<BankIndex, BankIndex>> edge_pairs(const Topology& t) {
    std::vector<std::pair<BankIndex, BankIndex>> out;
    out.reserve(t.edge_count());
    for (const Edge& e : t.edges())
        out.emplace_back(e.creditor, e.debtor);
    return out;
}

Topology topology_from(std::size_t n, const std::vector<std::pair<BankIndex, BankIndex>>& edges) {
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (auto [c, d] : edges)
        es.push_back({c, d});
    return Topology(n, std::move(es));
}

} // namespace

PYBIND11_MODULE(_contagion, m) {
    m.doc() = "Monte-Carlo interbank contagion with credit-default-swap risk transfer";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "ContagionError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<Unreachable>(m, "Unreachable", base.ptr());
    py::register_exception<CalibrationDiverged>(m, "CalibrationDiverged", base.ptr());
    py::register_exception<SampleExhausted>(m, "SampleExhausted", base.ptr());
    py::register_exception<NonInvertible>(m, "NonInvertible", base.ptr());
    py::register_exception<InfeasibleSheet>(m, "InfeasibleSheet", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

    py::enum_<Arm>(m, "Arm").value("baseline", Arm::baseline).value("transferred", Arm::transferred);
    py::enum_<CapitalAllocation>(m, "CapitalAllocation")
        .value("frozen", CapitalAllocation::frozen)
        .value("uniform_ratio", CapitalAllocation::uniform_ratio);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("n_banks", &SystemConfig::n_banks)
        .def_readwrite("m_assets", &SystemConfig::m_assets)
        .def_readwrite("s_sellers", &SystemConfig::s_sellers)
        .def_readwrite("theta", &SystemConfig::theta)
        .def_readwrite("gamma", &SystemConfig::gamma)
        .def_readwrite("kappa", &SystemConfig::kappa)
        .def_readwrite("rho", &SystemConfig::rho)
        .def_readwrite("leverage_f", &SystemConfig::leverage_f)
        .def_readwrite("dof", &SystemConfig::dof)
        .def_readwrite("calib_gamma", &SystemConfig::calib_gamma)
        .def_readwrite("calib_p", &SystemConfig::calib_p)
        .def_readwrite("calib_trials", &SystemConfig::calib_trials)
        .def_readwrite("samples", &SystemConfig::samples)
        .def_readwrite("master_seed", &SystemConfig::master_seed)
        .def_readwrite("gamma_grid", &SystemConfig::gamma_grid)
        .def_readwrite("f_set", &SystemConfig::f_set)
        .def_readwrite("arm", &SystemConfig::arm)
        .def_readwrite("workers", &SystemConfig::workers)
        .def_readwrite("attractiveness_ratio", &SystemConfig::attractiveness_ratio)
        .def_readwrite("protection_enabled", &SystemConfig::protection_enabled)
        .def_readwrite("capital_allocation", &SystemConfig::capital_allocation)
        .def_readwrite("shocks_enabled", &SystemConfig::shocks_enabled)
        .def("set", [](SystemConfig& c, const std::string& k, const std::string& v) { apply_setting(c, k, v); })
        .def("validate", [](const SystemConfig& c) { return validate(c); })
        .def("__repr__", [](const SystemConfig& c) { return describe(c); });
    m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); });

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("amplitude", &CalibrationResult::amplitude)
        .def_readonly("failure_probability", &CalibrationResult::failure_probability)
        .def_readonly("trials", &CalibrationResult::trials)
        .def_readonly("iterations", &CalibrationResult::iterations);
    m.def(
        "calibrate",
        [](const SystemConfig& c, std::uint64_t seed) {
            py::gil_scoped_release release;
            return calibrate_amplitude(calibration_settings(c), seed);
        },
        py::arg("config"), py::arg("seed"));
    m.def("solo_failure_rate", &solo_failure_rate, py::arg("amplitude"), py::arg("gamma_ref"),
          py::arg("m_assets"), py::arg("dof"), py::arg("trials"), py::arg("seed"));

    py::class_<WeightedNetwork>(m, "Network")
        .def_property_readonly("n_banks", &WeightedNetwork::n_banks)
        .def_property_readonly("edges", [](const WeightedNetwork& w) { return edge_pairs(w.topology); })
        .def_readonly("weights", &WeightedNetwork::weights)
        .def_readonly("exponent_r", &WeightedNetwork::exponent_r)
        .def_property_readonly("loans", &WeightedNetwork::loans)
        .def_property_readonly("borrowings", &WeightedNetwork::borrowings)
        .def_property_readonly("denseness", [](const WeightedNetwork& w) { return measure_denseness(w.topology); })
        .def_property_readonly("concentration",
                               [](const WeightedNetwork& w) { return measure_concentration(w); });
    m.def(
        "generate_network",
        [](std::size_t n, double kappa, double rho, double total_loans, std::uint64_t seed) {
            return tune_concentration(generate_topology(n, kappa, seed), rho, total_loans);
        },
        py::arg("n_banks"), py::arg("kappa"), py::arg("rho"), py::arg("total_loans"), py::arg("seed"));
    m.def(
        "weighted_network",
        [](std::size_t n, const std::vector<std::pair<BankIndex, BankIndex>>& edges, double r, double total) {
            return assign_loan_weights(topology_from(n, edges), r, total);
        },
        py::arg("n_banks"), py::arg("edges"), py::arg("exponent_r"), py::arg("total_loans"));

    m.def("core_tier1_ratio", &core_tier1_ratio, py::arg("gamma"), py::arg("theta"), py::arg("f"));
    m.def("leverage_ratio", &leverage_ratio, py::arg("gamma"), py::arg("theta"), py::arg("f"));
    m.def("transferred_loan_ratio", &transferred_loan_ratio, py::arg("theta"), py::arg("f"));

    py::class_<DistributionSummary>(m, "DistributionSummary")
        .def_readonly("sample_count", &DistributionSummary::sample_count)
        .def_readonly("histogram", &DistributionSummary::histogram)
        .def_readonly("f_star", &DistributionSummary::f_star)
        .def_readonly("mean_failures", &DistributionSummary::mean_failures)
        .def_readonly("discarded_samples", &DistributionSummary::discarded_samples)
        .def_readonly("low_sample_warning", &DistributionSummary::low_sample_warning);
    m.def(
        "run_cell",
        [](const SystemConfig& c, double amplitude) {
            py::gil_scoped_release release;
            return run_cell(c, amplitude);
        },
        py::arg("config"), py::arg("amplitude"));

    py::class_<SeverityCurve>(m, "SeverityCurve")
        .def_readonly("gammas", &SeverityCurve::gammas)
        .def_readonly("f_star", &SeverityCurve::f_star)
        .def_readonly("f_star_isotonic", &SeverityCurve::f_star_isotonic)
        .def_readonly("mean_failures", &SeverityCurve::mean_failures)
        .def_readonly("leverage_f", &SeverityCurve::leverage_f)
        .def_readonly("arm", &SeverityCurve::arm);
    py::class_<BufferCurve>(m, "BufferCurve")
        .def_readonly("gammas", &BufferCurve::gammas)
        .def_readonly("gamma_s", &BufferCurve::gamma_s)
        .def_readonly("clamped", &BufferCurve::clamped)
        .def_readonly("t_prime", &BufferCurve::t_prime)
        .def_readonly("l_prime", &BufferCurve::l_prime)
        .def_readonly("negative_impact", &BufferCurve::negative_impact)
        .def_readonly("leverage_f", &BufferCurve::leverage_f);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("amplitude", &SweepResult::amplitude)
        .def_readonly("baseline", &SweepResult::baseline)
        .def_readonly("transferred", &SweepResult::transferred)
        .def_readonly("buffers", &SweepResult::buffers)
        .def_readonly("discard_rate", &SweepResult::discard_rate)
        .def("write", [](const SweepResult& r, const SystemConfig& c, const std::filesystem::path& dir) {
            write_severity_csv(r, dir / "severity.csv");
            write_buffer_csv(r, dir / "buffer.csv");
            write_manifest(c, r, dir / "manifest.json");
        });
    m.def(
        "run_sweep",
        [](const SystemConfig& c, double amplitude) {
            py::gil_scoped_release release;
            return run_sweep(c, amplitude);
        },
        py::arg("config"), py::arg("amplitude"));

    m.def(
        "buffer_ratio",
        [](const std::vector<double>& gammas, const std::vector<double>& baseline, const std::vector<double>& levels) {
            std::vector<bool> clamped;
            auto gs = invert_severity(gammas, isotonic_nonincreasing(baseline), levels, &clamped);
            return py::make_tuple(gs, clamped);
        },
        py::arg("gammas"), py::arg("baseline_f_star"), py::arg("transferred_f_star"));
}

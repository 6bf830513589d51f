// Python bindings. Scenario-level reports come back as lists of dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "minerkelly/equilibrium.hpp"
#include "minerkelly/errors.hpp"
#include "minerkelly/kelly.hpp"
#include "minerkelly/report.hpp"
#include "minerkelly/scenario_io.hpp"
#include "minerkelly/simulator.hpp"
#include "minerkelly/stats.hpp"

namespace py = pybind11;
namespace mk = minerkelly;

namespace {

py::list rows(const mk::Table& t) {
    py::list out;
    for (const auto& row : t.rows) {
        py::dict d;
        for (std::size_t k = 0; k < row.size(); ++k)
            std::visit([&](const auto& v) { d[py::str(t.columns[k])] = v; }, row[k]);
        out.append(d);
    }
    return out;
}

mk::Scenario scenario_from_file(const std::string& path) { return mk::resolve_scenario(mk::load_scenario(path)); }

}  // namespace

PYBIND11_MODULE(_minerkelly, m) {
    m.doc() = "Kelly leverage and hash-rate equilibrium for proof-of-work miners";

    py::register_exception<mk::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<mk::NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);

    py::class_<mk::TwoPointReturn>(m, "TwoPointReturn")
        .def(py::init([](double up, double down, double prob) { return mk::TwoPointReturn{up, down, prob}; }),
             py::arg("up"), py::arg("down"), py::arg("prob"))
        .def_readwrite("up", &mk::TwoPointReturn::up)
        .def_readwrite("down", &mk::TwoPointReturn::down)
        .def_readwrite("prob", &mk::TwoPointReturn::prob)
        .def("mean", &mk::TwoPointReturn::mean)
        .def("variance", &mk::TwoPointReturn::variance);

    py::class_<mk::Environment>(m, "Environment")
        .def(py::init([](double b, double tau, double r, double d) { return mk::Environment{b, tau, r, d}; }),
             py::arg("block_reward"), py::arg("block_interval"), py::arg("riskfree_rate") = 0.0,
             py::arg("difficulty") = 0.0)
        .def_readwrite("block_reward", &mk::Environment::block_reward)
        .def_readwrite("block_interval", &mk::Environment::block_interval)
        .def_readwrite("riskfree_rate", &mk::Environment::riskfree_rate)
        .def_readwrite("difficulty", &mk::Environment::difficulty);

    py::class_<mk::BalanceSheet>(m, "BalanceSheet")
        .def_readonly("equity", &mk::BalanceSheet::equity)
        .def_readonly("liabilities", &mk::BalanceSheet::liabilities)
        .def_readonly("mining_assets", &mk::BalanceSheet::mining_assets)
        .def_readonly("riskfree_assets", &mk::BalanceSheet::riskfree_assets)
        .def("leverage", &mk::BalanceSheet::leverage);
    m.def("make_balance_sheet", &mk::make_balance_sheet, py::arg("mining_assets"), py::arg("leverage"));

    py::class_<mk::LeverageSolution>(m, "LeverageSolution")
        .def_readonly("f_exact", &mk::LeverageSolution::f_exact)
        .def_readonly("f_approx", &mk::LeverageSolution::f_approx)
        .def_readonly("f_simple", &mk::LeverageSolution::f_simple)
        .def_readonly("expected_log_payoff_at_exact", &mk::LeverageSolution::expected_log_payoff_at_exact)
        .def_readonly("sharpe", &mk::LeverageSolution::sharpe)
        .def_readonly("clamped", &mk::LeverageSolution::clamped)
        .def_readonly("unprofitable", &mk::LeverageSolution::unprofitable);

    m.def("expected_log_payoff", &mk::expected_log_payoff, py::arg("leverage"), py::arg("ret"),
          py::arg("riskfree_rate") = 0.0);
    m.def("f_max_exact", [](const mk::TwoPointReturn& ret, double r) { return mk::f_max_exact(ret, r).value; },
          py::arg("ret"), py::arg("riskfree_rate") = 0.0);
    m.def("g_infinity", &mk::g_infinity, py::arg("leverage"), py::arg("mean"), py::arg("variance"),
          py::arg("riskfree_rate") = 0.0);
    m.def("solve_leverage", &mk::solve_leverage, py::arg("ret"), py::arg("riskfree_rate") = 0.0);

    m.def("best_response", &mk::best_response, py::arg("others_mining_assets"), py::arg("cost_rate"), py::arg("env"));
    auto equilibrium = [](const mk::EquilibriumResult& r) {
        py::dict d;
        d["holdings"] = r.holdings;
        d["shares"] = r.shares;
        d["in_support"] = r.in_support;
        d["world_hash"] = r.world_hash;
        d["payoff_per_stage"] = r.payoff_per_stage;
        d["iterations"] = r.iterations;
        return d;
    };
    m.def("equilibrium_closed_form",
          [=](std::vector<double> costs, double z, const mk::Environment& env) {
              return equilibrium(mk::equilibrium_closed_form({std::move(costs), z, env}));
          },
          py::arg("costs"), py::arg("exogenous_hash"), py::arg("env"));
    m.def("equilibrium_fixed_point",
          [=](std::vector<double> costs, double z, const mk::Environment& env) {
              return equilibrium(mk::equilibrium_fixed_point({std::move(costs), z, env}));
          },
          py::arg("costs"), py::arg("exogenous_hash"), py::arg("env"));

    m.def("ks_two_sample",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              const auto ks = mk::stats::ks_two_sample(a, b);
              return py::make_tuple(ks.statistic, ks.p_value);
          },
          py::arg("a"), py::arg("b"));
    m.def("kolmogorov_survival", &mk::stats::kolmogorov_survival, py::arg("x"));

    m.def("coinflip_median",
          [](const mk::TwoPointReturn& ret, double f, std::size_t rounds, std::size_t n, double w0, std::uint64_t seed) {
              return mk::run_coinflip(ret, f, rounds, n, w0, seed).median_wealth;
          },
          py::arg("ret"), py::arg("leverage"), py::arg("rounds"), py::arg("trajectories"),
          py::arg("initial_wealth") = 1.0, py::arg("seed") = 1);

    m.def("optimize", [](const std::string& path) { return rows(mk::optimize_report(scenario_from_file(path))); },
          py::arg("scenario"));
    m.def("equilibrium", [](const std::string& path) { return rows(mk::equilibrium_report(scenario_from_file(path))); },
          py::arg("scenario"));
    m.def("sweep",
          [](const std::string& path, std::size_t grid) { return rows(mk::sweep_report(scenario_from_file(path), grid)); },
          py::arg("scenario"), py::arg("grid") = 1000);
    m.def("simulate",
          [](const std::string& path, std::size_t n, std::uint64_t seed, bool retarget, unsigned workers) {
              auto s = scenario_from_file(path);
              s.seed = seed;
              mk::SimulationOptions opt;
              opt.trajectories = n;
              opt.retarget_difficulty = retarget;
              opt.workers = workers;
              mk::Table t;
              {
                  py::gil_scoped_release release;
                  t = mk::simulate_report(s, opt);
              }
              return rows(t);
          },
          py::arg("scenario"), py::arg("trajectories"), py::arg("seed"), py::arg("retarget_difficulty") = false,
          py::arg("workers") = 1);
    m.def("example", [](const std::string& name) {
        if (name == "bitcoin") return rows(mk::bitcoin_example());
        if (name == "coinflip") return rows(mk::coinflip_example());
        throw py::value_error("unknown example: " + name);
    });
}

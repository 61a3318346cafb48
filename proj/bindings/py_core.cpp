// Python bindings for the main operations: Hilbert-Schmidt primitives, the
// gate-set and Clifford synthesis, pulse shaping, the simulated plant, the
// figures of merit and the closed-loop optimizer.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gsopt/analysis.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/foms.hpp"
#include "gsopt/gateset.hpp"
#include "gsopt/hs.hpp"
#include "gsopt/optimizer.hpp"
#include "gsopt/plant.hpp"
#include "gsopt/pulse.hpp"

namespace py = pybind11;
using namespace gsopt;

namespace {

FomSpec make_spec(const std::string& kind, int length, int n_circuits, int qpt_gate) {
  const auto parsed = fom_kind_from_name(kind);
  if (!parsed) throw ValidationError("unknown FoM kind '" + kind + "'");
  FomSpec spec;
  spec.kind = *parsed;
  spec.length = length;
  spec.n_circuits = n_circuits;
  spec.qpt_gate = qpt_gate;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gate-set evaluation and closed-loop pulse optimization workbench";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NormalizationError>(m, "NormalizationError", PyExc_RuntimeError);
  py::register_exception<LookupError>(m, "GsoLookupError", PyExc_LookupError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  //--- Hilbert-Schmidt primitives ----------------------------------------
  m.def("vectorize", [](const Mat2c& rho) { return vectorize(rho).coords; },
        py::arg("rho"), "Density matrix to normalized-Pauli coefficient vector");
  m.def("devectorize", [](const Vec4& coords) { return devectorize(HSVector{coords}); },
        py::arg("coords"));
  m.def("unitary_to_ptm", [](const Mat2c& u) { return unitary_to_ptm(u).m; }, py::arg("u"));
  m.def("ptm_to_chi", [](const Mat4& r) { return ptm_to_chi(Ptm{r}).m; }, py::arg("ptm"));
  m.def("chi_from_unitary", [](const Mat2c& u) { return chi_from_unitary(u).m; }, py::arg("u"));
  m.def("rotation_unitary", &rotation_unitary, py::arg("angle"), py::arg("nx"), py::arg("ny"),
        py::arg("nz"));
  m.def("ground_state", []() { return ground_state().coords; });
  m.def(
      "expectation",
      [](const Vec4& effect, const std::vector<Mat4>& gates, const Vec4& state) {
        std::vector<Ptm> ops;
        ops.reserve(gates.size());
        for (const auto& g : gates) ops.emplace_back(g);
        return expectation(HSVector{effect}, ops, HSVector{state});
      },
      py::arg("effect"), py::arg("gates"), py::arg("state"));

  //--- pulses --------------------------------------------------------------
  py::class_<PulseShape>(m, "PulseShape")
      .def(py::init<>())
      .def_readwrite("dt", &PulseShape::dt)
      .def_readwrite("ax", &PulseShape::ax)
      .def_readwrite("ay", &PulseShape::ay)
      .def_property_readonly("duration", &PulseShape::duration)
      .def("max_envelope", &PulseShape::max_envelope)
      .def("scaled", &PulseShape::scaled, py::arg("factor"));

  py::class_<DcrabBasis>(m, "DcrabBasis")
      .def_readonly("freq_x", &DcrabBasis::freq_x)
      .def_readonly("freq_y", &DcrabBasis::freq_y)
      .def("coeff_count", &DcrabBasis::coeff_count);

  m.def("rectangular", &rectangular, py::arg("amplitude"), py::arg("duration"), py::arg("dt"));
  m.def(
      "sample_basis",
      [](std::uint64_t seed, double duration, int vectors_per_pulse, int max_oscillations) {
        Rng rng = SeedSeq{seed}.rng();
        return sample_basis(rng, duration, vectors_per_pulse, max_oscillations);
      },
      py::arg("seed"), py::arg("duration"), py::arg("vectors_per_pulse") = 2,
      py::arg("max_oscillations") = 4);
  m.def(
      "expand",
      [](const PulseShape& base, const DcrabBasis& basis, const std::vector<double>& coeffs) {
        return expand(base, basis, coeffs);
      },
      py::arg("base"), py::arg("basis"), py::arg("coeffs"));
  m.def("clip", &clip, py::arg("pulse"), py::arg("a_max"));
  m.def("fluence", &fluence, py::arg("pulse"));

  //--- gate-set ------------------------------------------------------------
  py::class_<GateSet>(m, "GateSet")
      .def_property_readonly("targets",
                             [](const GateSet& gs) {
                               std::vector<Mat4> out;
                               for (const auto& t : gs.targets) out.push_back(t.m);
                               return out;
                             })
      .def_property_readonly(
          "pulses", [](const GateSet& gs) {
            return std::vector<PulseShape>(gs.pulses.begin(), gs.pulses.end());
          })
      .def("with_pulse", [](GateSet gs, int gate, const PulseShape& pulse) {
        if (gate < 0 || gate >= kNumGates)
          throw ValidationError("gate index out of range");
        gs.pulses[gate] = pulse;
        return gs;
      }, py::arg("gate"), py::arg("pulse"), "Copy of the set with one pulse replaced");

  m.def("build_gateset", py::overload_cast<double, double>(&build_gateset), py::arg("dt"),
        py::arg("gate_duration"));
  m.def("calibrated_pulse", &calibrated_pulse, py::arg("gate"), py::arg("duration"),
        py::arg("dt"));

  py::class_<CliffordTable>(m, "CliffordTable")
      .def_property_readonly("decompositions",
                             [](const CliffordTable& t) {
                               return std::vector<std::vector<int>>(
                                   t.decompositions.begin(), t.decompositions.end());
                             })
      .def_property_readonly("composed",
                             [](const CliffordTable& t) {
                               std::vector<Mat4> out;
                               for (const auto& c : t.composed) out.push_back(c.m);
                               return out;
                             })
      .def("mean_length", &CliffordTable::mean_length);
  m.def("build_clifford_table", &build_clifford_table, py::arg("gateset"));
  m.def("matched_gate_length", &matched_gate_length, py::arg("clifford_length"));

  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("kind",
                             [](const Circuit& c) {
                               return c.kind == Circuit::Kind::GateString ? "gate-string"
                                                                          : "clifford-string";
                             })
      .def_readonly("indices", &Circuit::indices)
      .def_readonly("recovery", &Circuit::recovery);
  m.def(
      "sample_clifford_circuit",
      [](const CliffordTable& table, int m_cliffords, std::uint64_t seed) {
        Rng rng = SeedSeq{seed}.rng();
        return sample_clifford_circuit(table, m_cliffords, rng);
      },
      py::arg("table"), py::arg("m"), py::arg("seed"));
  m.def(
      "sample_gate_string",
      [](int length, std::uint64_t seed) {
        Rng rng = SeedSeq{seed}.rng();
        return sample_gate_string(length, rng);
      },
      py::arg("length"), py::arg("seed"));

  //--- plant ---------------------------------------------------------------
  py::class_<EnsembleMember>(m, "EnsembleMember")
      .def(py::init([](double detuning, double rabi_scale, double weight) {
             return EnsembleMember{detuning, rabi_scale, weight};
           }),
           py::arg("detuning"), py::arg("rabi_scale"), py::arg("weight"))
      .def_readwrite("detuning", &EnsembleMember::detuning)
      .def_readwrite("rabi_scale", &EnsembleMember::rabi_scale)
      .def_readwrite("weight", &EnsembleMember::weight);

  py::class_<EnsembleModel>(m, "EnsembleModel")
      .def(py::init<>())
      .def_readwrite("members", &EnsembleModel::members)
      .def_readwrite("t2", &EnsembleModel::t2)
      .def_readwrite("shots", &EnsembleModel::shots)
      .def_readwrite("contrast_c0", &EnsembleModel::contrast_c0)
      .def_readwrite("contrast_c1", &EnsembleModel::contrast_c1)
      .def_readwrite("spam_purity", &EnsembleModel::spam_purity)
      .def_readwrite("drift_sigma", &EnsembleModel::drift_sigma)
      .def_readwrite("drift_multiplier", &EnsembleModel::drift_multiplier)
      .def_readwrite("seed", &EnsembleModel::seed)
      .def_property(
          "drift",
          [](const EnsembleModel& m) {
            return m.drift == DriftMode::RandomWalk ? "random_walk" : "none";
          },
          [](EnsembleModel& m, const std::string& mode) {
            if (mode == "none")
              m.drift = DriftMode::None;
            else if (mode == "random_walk")
              m.drift = DriftMode::RandomWalk;
            else
              throw ValidationError("drift mode must be none or random_walk");
          });

  m.def("default_model", &default_model);
  m.def("noiseless_model", &noiseless_model);
  m.def("make_ensemble_model", &make_ensemble_model, py::arg("delta"),
        py::arg("line_weights"), py::arg("rabi_sigma"), py::arg("detuning_offset") = 0.0);
  m.def("propagate", &propagate, py::arg("pulse"), py::arg("member"));
  m.def("gate_superop",
        [](const PulseShape& pulse, const EnsembleModel& model) {
          return gate_superop(pulse, model).m;
        },
        py::arg("pulse"), py::arg("model"));
  m.def(
      "run_circuit",
      [](const Circuit& circuit, const GateSet& gs, const CliffordTable& table,
         const EnsembleModel& model, std::uint64_t seed) {
        Rng rng = SeedSeq{seed}.rng();
        return run_circuit(circuit, gs, &table, model, rng);
      },
      py::arg("circuit"), py::arg("gateset"), py::arg("table"), py::arg("model"),
      py::arg("seed"));
  m.def("rabi_trace", &rabi_trace, py::arg("model"), py::arg("duration"), py::arg("a_max"),
        py::arg("n_samples") = 120);

  //--- figures of merit ------------------------------------------------------
  m.def(
      "evaluate_fom",
      [](const std::string& kind, int length, int n_circuits, const GateSet& gs,
         const CliffordTable& table, const EnsembleModel& model, double a_max,
         std::uint64_t circuit_seed, std::uint64_t noise_seed, int qpt_gate) {
        const FomSpec spec = make_spec(kind, length, n_circuits, qpt_gate);
        const FomValue v = evaluate_fom(spec, gs, table, model, a_max, SeedSeq{circuit_seed},
                                        SeedSeq{noise_seed});
        return py::make_tuple(v.value, v.std_estimate, v.n_measurements);
      },
      py::arg("kind"), py::arg("length"), py::arg("n_circuits"), py::arg("gateset"),
      py::arg("table"), py::arg("model"), py::arg("a_max"), py::arg("circuit_seed"),
      py::arg("noise_seed"), py::arg("qpt_gate") = 2,
      "Returns (value, internal_std, n_measurements)");

  py::class_<RbFit>(m, "RbFit")
      .def_readonly("amplitude", &RbFit::amplitude)
      .def_readonly("offset", &RbFit::offset)
      .def_readonly("decay", &RbFit::decay)
      .def_readonly("error_per_clifford", &RbFit::error_per_clifford)
      .def_readonly("amplitude_std", &RbFit::amplitude_std)
      .def_readonly("decay_std", &RbFit::decay_std)
      .def_readonly("converged", &RbFit::converged);
  m.def(
      "rb_fit",
      [](const std::vector<int>& lengths, const std::vector<double>& survivals) {
        return rb_fit(lengths, survivals);
      },
      py::arg("lengths"), py::arg("survivals"));

  py::class_<RbResult>(m, "RbResult")
      .def_readonly("lengths", &RbResult::lengths)
      .def_readonly("survival", &RbResult::survival)
      .def_readonly("survival_std", &RbResult::survival_std)
      .def_readonly("fit", &RbResult::fit);
  m.def(
      "run_rb",
      [](const GateSet& gs, const CliffordTable& table, const EnsembleModel& model,
         double a_max, const std::vector<int>& lengths, int n_circuits, std::uint64_t seed) {
        return run_rb(gs, table, model, a_max, lengths, n_circuits, SeedSeq{seed});
      },
      py::arg("gateset"), py::arg("table"), py::arg("model"), py::arg("a_max"),
      py::arg("lengths"), py::arg("n_circuits"), py::arg("seed"));
  m.def("default_rb_lengths", &default_rb_lengths);

  //--- optimizer -------------------------------------------------------------
  py::class_<DcrabConfig>(m, "DcrabConfig")
      .def(py::init<>())
      .def_readwrite("superiterations", &DcrabConfig::superiterations)
      .def_readwrite("vectors_per_pulse", &DcrabConfig::vectors_per_pulse)
      .def_readwrite("max_oscillations", &DcrabConfig::max_oscillations)
      .def_readwrite("stop_window", &DcrabConfig::stop_window)
      .def_readwrite("reeval_max", &DcrabConfig::reeval_max)
      .def_readwrite("drift_remeasure_every", &DcrabConfig::drift_remeasure_every)
      .def_readwrite("max_evals_per_superiteration",
                     &DcrabConfig::max_evals_per_superiteration)
      .def_readwrite("a_max", &DcrabConfig::a_max)
      .def_readwrite("sigma_repeats", &DcrabConfig::sigma_repeats)
      .def_readwrite("endpoint_repeats", &DcrabConfig::endpoint_repeats)
      .def_readwrite("eps_gain", &DcrabConfig::eps_gain)
      .def_readwrite("initial_step_fraction", &DcrabConfig::initial_step_fraction);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("eval_index", &TraceRow::eval_index)
      .def_readonly("superiteration", &TraceRow::superiteration)
      .def_readonly("fom", &TraceRow::fom)
      .def_readonly("std_estimate", &TraceRow::std_estimate)
      .def_readonly("is_reeval", &TraceRow::is_reeval)
      .def_readonly("is_drift_check", &TraceRow::is_drift_check);

  py::class_<ValueWithStd>(m, "ValueWithStd")
      .def_readonly("value", &ValueWithStd::value)
      .def_readonly("std", &ValueWithStd::std);

  py::class_<OptimizationRecord>(m, "OptimizationRecord")
      .def_readonly("trace", &OptimizationRecord::trace)
      .def_readonly("best_pulse", &OptimizationRecord::best_pulse)
      .def_readonly("fom_guess", &OptimizationRecord::fom_guess)
      .def_readonly("fom_ref", &OptimizationRecord::fom_ref)
      .def_readonly("fom_opt", &OptimizationRecord::fom_opt)
      .def_readonly("sigma", &OptimizationRecord::sigma)
      .def_readonly("gain", &OptimizationRecord::gain)
      .def_readonly("gain_defined", &OptimizationRecord::gain_defined)
      .def_readonly("n_evals", &OptimizationRecord::n_evals);

  m.def(
      "nelder_mead",
      [](const std::function<double(std::vector<double>)>& objective,
         std::vector<double> x0, int max_evals, double initial_step) {
        NelderMeadOptions options;
        options.max_evals = max_evals;
        options.initial_step = initial_step;
        const auto result = nelder_mead(
            [&](std::span<const double> x) {
              return objective(std::vector<double>(x.begin(), x.end()));
            },
            std::move(x0), options);
        return py::make_tuple(result.x, result.f, result.n_evals);
      },
      py::arg("objective"), py::arg("x0"), py::arg("max_evals") = 600,
      py::arg("initial_step") = 0.1, "Returns (x_best, f_best, n_evals)");

  m.def(
      "estimate_sigma",
      [](const std::string& kind, int length, int n_circuits, const PulseShape& pulse,
         const GateSet& gs, const CliffordTable& table, const EnsembleModel& model,
         double a_max, std::uint64_t seed, int repeats) {
        return estimate_sigma(make_spec(kind, length, n_circuits, 2), pulse, gs, table, model,
                              a_max, SeedSeq{seed}, repeats);
      },
      py::arg("kind"), py::arg("length"), py::arg("n_circuits"), py::arg("pulse"),
      py::arg("gateset"), py::arg("table"), py::arg("model"), py::arg("a_max"),
      py::arg("seed"), py::arg("repeats") = 100);

  m.def(
      "dcrab_run",
      [](const std::string& kind, int length, int n_circuits, const GateSet& gs,
         const CliffordTable& table, const EnsembleModel& model,
         const PulseShape& reference_pulse, const DcrabConfig& cfg, std::uint64_t seed,
         int qpt_gate) {
        return dcrab_run(make_spec(kind, length, n_circuits, qpt_gate), gs, table, model,
                         reference_pulse, cfg, SeedSeq{seed});
      },
      py::arg("kind"), py::arg("length"), py::arg("n_circuits"), py::arg("gateset"),
      py::arg("table"), py::arg("model"), py::arg("reference_pulse"), py::arg("config"),
      py::arg("seed"), py::arg("qpt_gate") = 2);

  m.def("gain", &gain, py::arg("fom_opt"), py::arg("fom_guess"), py::arg("fom_ref"),
        py::arg("eps_gain") = 1e-9);

  //--- analysis ----------------------------------------------------------------
  m.def(
      "correlation_matrix",
      [](const Eigen::MatrixXd& values, std::vector<std::string> names) {
        DataMatrix data;
        data.values = values;
        data.column_names = std::move(names);
        return correlation_matrix(data);
      },
      py::arg("values"), py::arg("names") = std::vector<std::string>{});

  m.attr("NUM_GATES") = kNumGates;
  m.attr("SPAM_INDICES") = std::vector<int>(kSpamIndices.begin(), kSpamIndices.end());
}

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qadv/attacks.hpp"
#include "qadv/bounds.hpp"
#include "qadv/data.hpp"
#include "qadv/experiment.hpp"
#include "qadv/model.hpp"
#include "qadv/state.hpp"
#include "qadv/training.hpp"

namespace py = pybind11;
using namespace qadv;

namespace {

StateVector state_from_array(py::array_t<std::complex<double>, py::array::c_style> amps) {
    auto buf = amps.request();
    if (buf.ndim != 1) throw std::invalid_argument("amplitudes must be a 1-d array");
    const auto* data = static_cast<const std::complex<double>*>(buf.ptr);
    std::size_t size = static_cast<std::size_t>(buf.shape[0]);
    int n = 0;
    while ((std::size_t{1} << n) < size) ++n;
    if ((std::size_t{1} << n) != size) {
        throw std::invalid_argument("amplitude count must be a power of two");
    }
    StateVector s(n, std::vector<cxd>(data, data + size));
    s.validate();
    return s;
}

py::array_t<std::complex<double>> amps_to_array(const StateVector& s) {
    py::array_t<std::complex<double>> out(s.dim());
    std::copy(s.amps.begin(), s.amps.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "statevector laboratory for adversarial attacks on quantum classifiers";

    py::class_<StateVector>(m, "StateVector")
        .def(py::init(&state_from_array), py::arg("amplitudes"))
        .def_readonly("n_qubits", &StateVector::n_qubits)
        .def_property_readonly("amplitudes", &amps_to_array)
        .def("norm_sq", &StateVector::norm_sq)
        .def_static("basis", &StateVector::basis, py::arg("n_qubits"), py::arg("index"))
        .def("__repr__", [](const StateVector& s) {
            return "<StateVector n_qubits=" + std::to_string(s.n_qubits) + ">";
        });

    py::class_<GateOp>(m, "GateOp")
        .def_static("rx", &GateOp::rx, py::arg("target"), py::arg("angle"))
        .def_static("rz", &GateOp::rz, py::arg("target"), py::arg("angle"))
        .def_static("cnot", &GateOp::cnot, py::arg("control"), py::arg("target"))
        .def("__repr__", &GateOp::describe);

    m.def("apply_gate", &apply_gate, py::arg("state"), py::arg("gate"));
    m.def(
        "apply_circuit",
        [](const StateVector& s, const std::vector<GateOp>& gates) {
            return apply_circuit(s, gates);
        },
        py::arg("state"), py::arg("gates"));
    m.def(
        "measure_probabilities",
        [](const StateVector& s, const std::vector<int>& qubits) {
            return measure_probabilities(s, qubits);
        },
        py::arg("state"), py::arg("qubits"));
    m.def("overlap_fidelity", &overlap_fidelity);
    m.def("fidelity_squared", &fidelity_squared);
    m.def("trace_distance_pure", &trace_distance_pure);
    m.def("hs_distance_pure", &hs_distance_pure);
    m.def("haar_random_state", &haar_random_state, py::arg("n_qubits"), py::arg("seed"));

    m.def(
        "amplitude_encode",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> v) {
            auto buf = v.request();
            if (buf.ndim != 1) throw std::invalid_argument("expected a 1-d array");
            const double* data = static_cast<const double*>(buf.ptr);
            return amplitude_encode(std::span<const double>(data, buf.shape[0]));
        },
        py::arg("values"));
    m.def(
        "build_ising_hamiltonian",
        [](int length, double jx) {
            const Eigen::MatrixXd h = build_ising_hamiltonian(length, jx);
            py::array_t<double> out({h.rows(), h.cols()});
            for (Eigen::Index r = 0; r < h.rows(); ++r) {
                for (Eigen::Index c = 0; c < h.cols(); ++c) out.mutable_at(r, c) = h(r, c);
            }
            return out;
        },
        py::arg("length"), py::arg("jx"));
    m.def("ising_ground_state", &ising_ground_state, py::arg("length"), py::arg("jx"));
    m.def("free_fermion_ground_energy", &free_fermion_ground_energy, py::arg("length"),
          py::arg("jx"));

    py::class_<LabeledSample>(m, "LabeledSample")
        .def(py::init([](const StateVector& s, int label, const std::string& meta) {
                 return LabeledSample{s, label, meta};
             }),
             py::arg("state"), py::arg("label"), py::arg("meta") = "")
        .def_readonly("state", &LabeledSample::state)
        .def_readonly("label", &LabeledSample::label)
        .def_readonly("meta", &LabeledSample::meta);

    py::class_<LabeledDataset>(m, "LabeledDataset")
        .def(py::init([](std::vector<LabeledSample> samples, const std::string& split,
                         std::uint64_t seed) {
                 LabeledDataset ds;
                 if (samples.empty()) throw std::invalid_argument("dataset must be nonempty");
                 ds.n_qubits = samples[0].state.n_qubits;
                 ds.samples = std::move(samples);
                 ds.split = split;
                 ds.seed = seed;
                 return ds;
             }),
             py::arg("samples"), py::arg("split") = "train", py::arg("seed") = 0)
        .def_readonly("samples", &LabeledDataset::samples)
        .def_readonly("split", &LabeledDataset::split)
        .def_readonly("seed", &LabeledDataset::seed)
        .def_readonly("n_qubits", &LabeledDataset::n_qubits)
        .def("__len__", [](const LabeledDataset& d) { return d.samples.size(); });

    m.def("generate_ising_dataset", &generate_ising_dataset, py::arg("length") = 8,
          py::arg("n_train") = 300, py::arg("n_test") = 100, py::arg("seed") = 0);
    m.def("save_dataset",
          [](const LabeledDataset& ds, const std::filesystem::path& p) { save_dataset(ds, p); });
    m.def("load_dataset", &load_dataset);

    py::class_<ClassifierModel>(m, "ClassifierModel")
        .def_property_readonly("param_count",
                               [](const ClassifierModel& m_) { return m_.spec.param_count; })
        .def_property_readonly("n_in", [](const ClassifierModel& m_) { return m_.spec.n_in; })
        .def_property_readonly(
            "architecture",
            [](const ClassifierModel& m_) { return architecture_name(m_.spec.architecture); })
        .def_readonly("name", &ClassifierModel::name)
        .def_property(
            "params",
            [](const ClassifierModel& m_) { return m_.params; },
            [](ClassifierModel& m_, const std::vector<double>& p) {
                if (static_cast<int>(p.size()) != m_.spec.param_count) {
                    throw std::invalid_argument("parameter vector length mismatch");
                }
                m_.params = p;
            })
        .def("__repr__", [](const ClassifierModel& m_) {
            return "<ClassifierModel " + m_.name + " params=" +
                   std::to_string(m_.spec.param_count) + ">";
        });

    m.def("build_variational_classifier", &build_variational_classifier, py::arg("n_in"),
          py::arg("depth"), py::arg("seed"));
    m.def(
        "build_qcnn",
        [](int n_in, const std::string& variant, std::uint64_t seed) {
            if (variant == "small") return build_qcnn(n_in, QcnnVariant::Small, seed);
            if (variant == "large") return build_qcnn(n_in, QcnnVariant::Large, seed);
            throw std::invalid_argument("variant must be 'small' or 'large'");
        },
        py::arg("n_in"), py::arg("variant"), py::arg("seed"));
    m.def("forward", &forward, py::arg("model"), py::arg("input"));
    m.def("predict", &predict, py::arg("model"), py::arg("input"));
    m.def("save_checkpoint",
          [](const ClassifierModel& m_, const std::filesystem::path& p) { save_checkpoint(m_, p); });
    m.def("load_checkpoint", &load_checkpoint);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init([](double lr, int batch_size, int epochs, std::uint64_t seed,
                         const std::string& gradient) {
                 TrainConfig c;
                 c.learning_rate = lr;
                 c.batch_size = batch_size;
                 c.epochs = epochs;
                 c.seed = seed;
                 c.gradient = gradient == "parameter-shift" ? GradientMethod::ParameterShift
                                                            : GradientMethod::Adjoint;
                 return c;
             }),
             py::arg("learning_rate") = 0.01, py::arg("batch_size") = 30, py::arg("epochs") = 40,
             py::arg("seed") = 0, py::arg("gradient") = "adjoint")
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<TrainHistory>(m, "TrainHistory")
        .def_readonly("train_loss", &TrainHistory::train_loss)
        .def_readonly("train_acc", &TrainHistory::train_acc)
        .def_readonly("val_loss", &TrainHistory::val_loss)
        .def_readonly("val_acc", &TrainHistory::val_acc);

    m.def("cross_entropy",
          [](const std::vector<double>& probs, int label, double floor) {
              return cross_entropy(probs, label, floor);
          },
          py::arg("probs"), py::arg("label"), py::arg("floor") = 1e-12);
    m.def("gradient_parameter_shift",
          [](const ClassifierModel& model, const std::vector<LabeledSample>& batch) {
              return gradient_parameter_shift(model, batch);
          });
    m.def("gradient_finite_difference",
          [](const ClassifierModel& model, const std::vector<LabeledSample>& batch, double h) {
              return gradient_finite_difference(model, batch, h);
          });
    m.def("gradient_adjoint",
          [](const ClassifierModel& model, const std::vector<LabeledSample>& batch) {
              return gradient_adjoint(model, batch);
          });
    m.def("train", &train, py::arg("model"), py::arg("train_set"), py::arg("val_set"),
          py::arg("config"));
    m.def("evaluate", &evaluate, py::arg("model"), py::arg("dataset"));

    py::class_<AttackConfig>(m, "AttackConfig")
        .def(py::init([](double step_alpha, double epsilon_budget, int max_iters,
                         std::uint64_t seed) {
                 AttackConfig c;
                 c.step_alpha = step_alpha;
                 c.epsilon_budget = epsilon_budget;
                 c.max_iters = max_iters;
                 c.seed = seed;
                 return c;
             }),
             py::arg("step_alpha") = 0.02, py::arg("epsilon_budget") = 0.1,
             py::arg("max_iters") = 100, py::arg("seed") = 0)
        .def_readwrite("step_alpha", &AttackConfig::step_alpha)
        .def_readwrite("epsilon_budget", &AttackConfig::epsilon_budget)
        .def_readwrite("max_iters", &AttackConfig::max_iters)
        .def_readwrite("restarts", &AttackConfig::restarts)
        .def_readwrite("seed", &AttackConfig::seed);

    py::class_<SampleAttackRecord>(m, "SampleAttackRecord")
        .def_readonly("initial_loss", &SampleAttackRecord::initial_loss)
        .def_readonly("final_loss", &SampleAttackRecord::final_loss)
        .def_readonly("fooled", &SampleAttackRecord::fooled)
        .def_readonly("fidelity", &SampleAttackRecord::fidelity)
        .def_readonly("iterations", &SampleAttackRecord::iterations);

    py::class_<AttackReport>(m, "AttackReport")
        .def_readonly("records", &AttackReport::records)
        .def_readonly("universal_risk", &AttackReport::universal_risk)
        .def_readonly("mean_fidelity", &AttackReport::mean_fidelity)
        .def_readonly("mean_fidelity_fooled", &AttackReport::mean_fidelity_fooled)
        .def_readonly("epsilon", &AttackReport::epsilon);

    py::class_<PerturbationLayer>(m, "PerturbationLayer")
        .def(py::init([](int n_qubits, const std::vector<double>& angles) {
                 PerturbationLayer l;
                 l.n_qubits = n_qubits;
                 if (angles.size() != 3 * static_cast<std::size_t>(n_qubits)) {
                     throw std::invalid_argument("need 3 angles per qubit");
                 }
                 l.angles = angles;
                 return l;
             }),
             py::arg("n_qubits"), py::arg("angles"))
        .def_static("identity", &PerturbationLayer::identity)
        .def_readonly("n_qubits", &PerturbationLayer::n_qubits)
        .def_readonly("angles", &PerturbationLayer::angles)
        .def("apply", &PerturbationLayer::apply)
        .def("apply_inverse", &PerturbationLayer::apply_inverse);

    py::class_<RiskCurve>(m, "RiskCurve")
        .def_readonly("epsilon", &RiskCurve::epsilon)
        .def_readonly("risk", &RiskCurve::risk)
        .def_readonly("mean_fidelity", &RiskCurve::mean_fidelity)
        .def_readonly("n_samples", &RiskCurve::n_samples);

    py::class_<PerturbationTrace>(m, "PerturbationTrace")
        .def_readonly("eps_proxy", &PerturbationTrace::eps_proxy)
        .def_readonly("mean_loss", &PerturbationTrace::mean_loss)
        .def_readonly("accuracy", &PerturbationTrace::accuracy);

    m.def(
        "qbim_state_attack",
        [](const std::vector<ClassifierModel>& models, const LabeledSample& sample,
           const AttackConfig& config) { return qbim_state_attack(models, sample, config); },
        py::arg("models"), py::arg("sample"), py::arg("config"));
    m.def(
        "universal_example_search",
        [](const std::vector<ClassifierModel>& models, const LabeledDataset& test,
           const AttackConfig& config) { return universal_example_search(models, test, config); },
        py::arg("models"), py::arg("test_set"), py::arg("config"));
    m.def(
        "risk_curve",
        [](const std::vector<ClassifierModel>& models, const LabeledDataset& test,
           const std::vector<double>& grid, const AttackConfig& config) {
            return risk_curve(models, test, grid, config);
        },
        py::arg("models"), py::arg("test_set"), py::arg("epsilon_grid"), py::arg("config"));
    m.def(
        "transfer_attack_eval",
        [](const ClassifierModel& surrogate, const std::vector<ClassifierModel>& targets,
           const LabeledDataset& test, const AttackConfig& config) {
            return transfer_attack_eval(surrogate, targets, test, config);
        },
        py::arg("surrogate"), py::arg("targets"), py::arg("test_set"), py::arg("config"));
    m.def(
        "universal_perturbation_search",
        [](const ClassifierModel& model, const LabeledDataset& test, const AttackConfig& config) {
            PerturbationTrace trace;
            auto [layer, report] = universal_perturbation_search(model, test, config, &trace);
            return py::make_tuple(layer, report, trace);
        },
        py::arg("model"), py::arg("test_set"), py::arg("config"));
    m.def(
        "empirical_error_rate",
        [](const ClassifierModel& model, const PerturbationLayer& layer,
           const std::vector<LabeledSample>& samples) {
            return empirical_error_rate(model, layer, samples);
        },
        py::arg("model"), py::arg("layer"), py::arg("samples"));
    m.def(
        "haar_risk_estimate",
        [](const ClassifierModel& model, const ClassifierModel& truth,
           const PerturbationLayer* layer, int n, std::uint64_t seed) {
            return haar_risk_estimate(model, truth, layer, n, seed);
        },
        py::arg("model"), py::arg("truth"), py::arg("layer") = nullptr, py::arg("n_samples") = 1000,
        py::arg("seed") = 0);

    m.def("theorem1_min_epsilon", &theorem1_min_epsilon, py::arg("d"), py::arg("k"),
          py::arg("mu_min"), py::arg("r0"));
    m.def("lemma_a1_min_epsilon", &lemma_a1_min_epsilon, py::arg("d"), py::arg("mu"), py::arg("r"));
    m.def("levy_min_epsilon", &levy_min_epsilon, py::arg("alpha"), py::arg("beta"), py::arg("d"),
          py::arg("mu"), py::arg("r"));
    m.def(
        "union_risk_lower_bound",
        [](const std::vector<double>& risks) { return union_risk_lower_bound(risks); },
        py::arg("risks"));
    m.def("hoeffding_deviation", &hoeffding_deviation, py::arg("n"), py::arg("delta"));
    m.def("qnfl_classifier_bound", &qnfl_classifier_bound, py::arg("d"), py::arg("d_prime"),
          py::arg("n_train"));
    m.def("qnfl_classifier_bound_clamped", &qnfl_classifier_bound_clamped, py::arg("d"),
          py::arg("d_prime"), py::arg("n_train"));
    m.def("qnfl_unitary_bound", &qnfl_unitary_bound, py::arg("d"), py::arg("n_train"));

    py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
        .def_readonly("mean", &MonteCarloEstimate::mean)
        .def_readonly("std_error", &MonteCarloEstimate::std_error)
        .def_readonly("n_samples", &MonteCarloEstimate::n_samples);
    m.def(
        "estimate_quantum_risk",
        [](const std::vector<GateOp>& truth, const std::vector<GateOp>& hyp, int n_qubits,
           long n_samples, std::uint64_t seed) {
            return estimate_quantum_risk(truth, hyp, n_qubits, n_samples, seed);
        },
        py::arg("truth_circuit"), py::arg("hypothesis_circuit"), py::arg("n_qubits"),
        py::arg("n_samples"), py::arg("seed"));
    m.def("verify_hoeffding", &verify_hoeffding, py::arg("model"), py::arg("layer"),
          py::arg("oracle_samples"), py::arg("trials"), py::arg("n"), py::arg("delta"),
          py::arg("seed"));

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "0.1.0";
#endif
}

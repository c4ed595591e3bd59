// Copyright 2026 The hyqut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyqut/accounting.hpp"
#include "hyqut/config.hpp"
#include "hyqut/data.hpp"
#include "hyqut/error.hpp"
#include "hyqut/model.hpp"
#include "hyqut/qproj.hpp"
#include "hyqut/qsim.hpp"
#include "hyqut/train.hpp"
#include "hyqut/vqc.hpp"

namespace py = pybind11;
using namespace hyqut;

namespace {

std::vector<std::complex<double>> simulate(int n_qubits, const std::string& circuit) {
  auto gates = qsim::parse_circuit(circuit);
  qsim::StateVector s(n_qubits);
  s.apply(gates);
  return {s.amps().begin(), s.amps().end()};
}

std::vector<double> measure_circuit(int n_qubits, const std::string& circuit) {
  qsim::StateVector s(n_qubits);
  s.apply(qsim::parse_circuit(circuit));
  return qsim::measure_all_z(s);
}

std::vector<double> encoded_expectations(const std::vector<double>& x) {
  const auto a = qproj::encode_angles(x);
  const int n = static_cast<int>(a.theta.size());
  return qsim::measure_all_z(qproj::build_encoded_state(a.theta, a.phi, n));
}

py::dict census(const std::string& variant, int n_qubits, int n_layers) {
  const auto c = accounting::gate_and_param_census(
      qproj::AnsatzDescriptor::make(qproj::parse_variant(variant), n_qubits, n_layers));
  py::dict d;
  d["gates"] = c.gates;
  d["rotations"] = c.rotations;
  d["cnots"] = c.cnots;
  d["params"] = c.params;
  return d;
}

py::dict count_params(const std::string& config_text) {
  const Config cfg = Config::parse(config_text);
  const auto r = accounting::count_params(cfg.model);
  py::list entries;
  for (const auto& e : r.entries) entries.append(py::make_tuple(e.name, e.shape, e.count));
  py::dict d;
  d["total"] = r.total;
  d["entries"] = entries;
  d["flops"] = r.flops;
  d["classical_percent"] = r.classical_percent;
  return d;
}

py::list ablation(const std::string& config_text) {
  const Config cfg = Config::parse(config_text);
  py::list rows;
  for (const auto& r : accounting::ablation_rows(cfg.model))
    rows.append(py::make_tuple(r.strategy.label(), r.params, r.flops, r.classical_percent));
  return rows;
}

py::dict gradcheck(const std::string& variant, int n_qubits, int n_layers, std::uint64_t seed,
                   double delta) {
  const auto r = qproj::gradcheck(
      qproj::AnsatzDescriptor::make(qproj::parse_variant(variant), n_qubits, n_layers), seed,
      delta);
  py::dict d;
  d["params"] = r.params;
  d["evaluations"] = r.loss_evaluations;
  d["max_rel_error"] = r.max_rel_error;
  return d;
}

class PyModel {
 public:
  PyModel(const std::string& config_text, std::uint64_t seed)
      : model_(Config::parse(config_text).model, seed) {}

  std::vector<std::vector<double>> forward(const std::vector<std::int32_t>& tokens) {
    TokenBatch b{1, tokens.size(), tokens};
    const Matrix logits = model_.forward(b);
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < logits.rows; ++r)
      out.emplace_back(logits.row(r).begin(), logits.row(r).end());
    return out;
  }

  double loss(const std::vector<std::int32_t>& tokens, const std::vector<std::int32_t>& targets) {
    TokenBatch b{1, tokens.size(), tokens};
    return train::cross_entropy(model_.forward(b), targets);
  }

  std::vector<std::int32_t> generate(const std::vector<std::int32_t>& prompt, std::size_t max_new,
                                     double temperature, std::uint64_t seed) {
    return hyqut::generate(prompt, model_, max_new, temperature, seed);
  }

  std::size_t parameter_count() { return model_.parameter_count(); }

  std::vector<std::string> parameter_names() {
    std::vector<std::string> names;
    for (auto* p : model_.parameters()) names.push_back(p->name);
    return names;
  }

 private:
  Model model_;
};

}  // namespace

PYBIND11_MODULE(_hyqut, m) {
  m.doc() = "Hybrid quantum-classical transformer core";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("simulate", &simulate, py::arg("n_qubits"), py::arg("circuit"),
        "Amplitudes after running a text circuit (\"H 0\\nCNOT 1 0\\n...\") on |0...0>.");
  m.def("measure", &measure_circuit, py::arg("n_qubits"), py::arg("circuit"),
        "Pauli-Z expectation per qubit after running a text circuit.");
  m.def("encoded_expectations", &encoded_expectations, py::arg("x"),
        "<Z_j> of the angle-encoded state for a compressed feature vector of length 2n.");
  m.def("census", &census, py::arg("variant"), py::arg("n_qubits"), py::arg("n_layers"));
  m.def("count_params", &count_params, py::arg("config_text"));
  m.def("ablation", &ablation, py::arg("config_text"));
  m.def("gradcheck", &gradcheck, py::arg("variant"), py::arg("n_qubits"), py::arg("n_layers"),
        py::arg("seed") = 0, py::arg("delta") = 1e-4);
  m.def(
      "lr_at_step",
      [](std::size_t step, const std::string& config_text) {
        return train::lr_at_step(step, Config::parse(config_text).train);
      },
      py::arg("step"), py::arg("config_text"));

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&, std::uint64_t>(), py::arg("config_text"),
           py::arg("seed") = 0)
      .def("forward", &PyModel::forward, py::arg("tokens"))
      .def("loss", &PyModel::loss, py::arg("tokens"), py::arg("targets"))
      .def("generate", &PyModel::generate, py::arg("prompt"), py::arg("max_new"),
           py::arg("temperature") = 0.0, py::arg("seed") = 0)
      .def("parameter_count", &PyModel::parameter_count)
      .def("parameter_names", &PyModel::parameter_names);
}

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "orgrad/learner.hpp"
#include "orgrad/svd.hpp"

namespace py = pybind11;
using namespace orgrad;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

DenseTensor tensor_from(const FArray& a) {
    Dims dims(static_cast<std::size_t>(a.ndim()));
    for (py::ssize_t j = 0; j < a.ndim(); ++j)
        dims[static_cast<std::size_t>(j)] = a.shape(j);
    DenseTensor t(dims);
    // entry (i_0, ..., i_{m-1}) sits at i_0 + d_0 (i_1 + d_1 (...)), which is
    // exactly the Fortran layout the array type above guarantees
    std::memcpy(t.entries.data(), a.data(),
                sizeof(double) * static_cast<std::size_t>(a.size()));
    return t;
}

py::array tensor_to(const DenseTensor& t) {
    std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
    std::vector<py::ssize_t> strides(shape.size());
    py::ssize_t stride = static_cast<py::ssize_t>(sizeof(double));
    for (std::size_t j = 0; j < shape.size(); ++j) {
        strides[j] = stride;
        stride *= shape[j];
    }
    return py::array(py::dtype::of<double>(), shape, strides, t.entries.data());
}

LossModel model_from(const std::string& loss, double sigma, double sigma_link,
                     double intensity) {
    if (loss == "linear") return LossModel::linear(sigma);
    if (loss == "logistic") return LossModel::logistic(sigma_link);
    if (loss == "poisson") return LossModel::poisson(intensity);
    throw std::invalid_argument("unknown loss: " + loss);
}

py::dict report_to(const SpectralReport& r) {
    py::dict d;
    d["lambda_min"] = r.lambda_min;
    d["lambda_max"] = r.lambda_max;
    d["kappa0"] = r.kappa0;
    d["incoherence"] = r.incoherence;
    d["spikiness"] = r.spikiness;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "streaming low-rank tensor learning core";

    py::class_<TuckerTensor>(m, "TuckerTensor")
        .def_property_readonly("core", [](const TuckerTensor& t) { return tensor_to(t.core); })
        .def_property_readonly("factors",
                               [](const TuckerTensor& t) { return t.factors; })
        .def_property_readonly("dims", [](const TuckerTensor& t) { return t.dims(); })
        .def_property_readonly("ranks", [](const TuckerTensor& t) { return t.ranks(); })
        .def("materialize", [](const TuckerTensor& t) { return tensor_to(materialize(t)); })
        .def("__repr__", [](const TuckerTensor& t) {
            std::string s = "TuckerTensor(dims=[";
            for (std::size_t j = 0; j < t.dims().size(); ++j)
                s += (j ? "," : "") + std::to_string(t.dims()[j]);
            s += "], ranks=[";
            for (std::size_t j = 0; j < t.ranks().size(); ++j)
                s += (j ? "," : "") + std::to_string(t.ranks()[j]);
            return s + "])";
        });

    py::class_<TangentVector>(m, "TangentVector")
        .def("materialize",
             [](const TangentVector& tv) { return tensor_to(materialize(tv)); })
        .def("fro_norm", &TangentVector::fro_norm);

    m.def("hosvd",
          [](const FArray& a, const Dims& ranks) { return hosvd(tensor_from(a), ranks); },
          py::arg("tensor"), py::arg("ranks"));

    m.def("matricize",
          [](const FArray& a, int mode) { return matricize(tensor_from(a), mode); },
          py::arg("tensor"), py::arg("mode"));

    m.def("mode_product",
          [](const FArray& a, const Matrix& w, int mode) {
              return tensor_to(mode_product(tensor_from(a), w, mode));
          },
          py::arg("tensor"), py::arg("matrix"), py::arg("mode"));

    m.def("project_tangent",
          [](const TuckerTensor& point, const FArray& x) {
              return project_tangent(point, tensor_from(x));
          },
          py::arg("point"), py::arg("x"));

    m.def("retract",
          [](const TuckerTensor& point, const TangentVector& g, double eta) {
              return retract(point, g, eta);
          },
          py::arg("point"), py::arg("gradient"), py::arg("eta"));

    m.def("spectral_report",
          [](const FArray& a, const Dims& ranks) {
              return report_to(spectral_report(tensor_from(a), ranks));
          },
          py::arg("tensor"), py::arg("ranks"));

    m.def("loss",
          [](const std::string& loss, double theta, double y, double sigma,
             double sigma_link, double intensity) {
              return orgrad::loss(model_from(loss, sigma, sigma_link, intensity), theta, y);
          },
          py::arg("loss"), py::arg("theta"), py::arg("y"), py::arg("sigma") = 1.0,
          py::arg("sigma_link") = 1.0, py::arg("intensity") = 1.0);

    m.def("dloss",
          [](const std::string& loss, double theta, double y, double sigma,
             double sigma_link, double intensity) {
              return dloss(model_from(loss, sigma, sigma_link, intensity), theta, y);
          },
          py::arg("loss"), py::arg("theta"), py::arg("y"), py::arg("sigma") = 1.0,
          py::arg("sigma_link") = 1.0, py::arg("intensity") = 1.0);

    m.def("gen_truth",
          [](const std::string& recipe, const Dims& dims, const Dims& ranks,
             std::uint64_t seed) {
              Rng rng(seed);
              const Truth t = gen_truth(TruthSpec{recipe, dims, ranks, {}}, rng);
              return py::make_tuple(t.tensor, report_to(t.report));
          },
          py::arg("recipe"), py::arg("dims"), py::arg("ranks"), py::arg("seed"));

    m.def("run_online",
          [](const TuckerTensor& truth, const std::string& design, const std::string& loss,
             double eta, std::int64_t horizon, std::uint64_t seed, double sigma,
             double init_c, std::int64_t log_stride) {
              LearnerState state;
              Rng init_rng(seed_stream(seed, 0));
              state.estimate = init_oracle_perturb(truth, init_c, init_rng);
              state.schedule = StepSchedule::fixed(eta);
              state.model = model_from(loss, sigma, 1.0, 1.0);
              ModelStream stream(truth, parse_design(design), state.model,
                                 seed_stream(seed, 1));
              RunOptions opt;
              opt.horizon = horizon;
              opt.log_stride = log_stride;
              const RunResult res = run(std::move(state), stream, &truth, opt);

              const std::size_t n = res.log.records.size();
              py::array_t<double> t_arr(static_cast<py::ssize_t>(n));
              py::array_t<double> rel(static_cast<py::ssize_t>(n));
              py::array_t<double> regret(static_cast<py::ssize_t>(n));
              auto* tp = t_arr.mutable_data();
              auto* rp = rel.mutable_data();
              auto* gp = regret.mutable_data();
              for (std::size_t i = 0; i < n; ++i) {
                  tp[i] = static_cast<double>(res.log.records[i].t);
                  rp[i] = res.log.records[i].rel_err;
                  gp[i] = res.log.records[i].regret;
              }
              py::dict out;
              out["estimate"] = res.final_estimate;
              out["t"] = t_arr;
              out["rel_err"] = rel;
              out["regret"] = regret;
              out["final_regret"] = res.log.final_regret;
              out["diverged"] = res.log.diverged;
              return out;
          },
          py::arg("truth"), py::arg("design"), py::arg("loss"), py::arg("eta"),
          py::arg("horizon"), py::arg("seed"), py::arg("sigma") = 1.0,
          py::arg("init_c") = 0.3, py::arg("log_stride") = 0);
}

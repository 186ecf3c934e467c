#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "keystep/analysis.hpp"
#include "keystep/embedding.hpp"
#include "keystep/error.hpp"
#include "keystep/evaluate.hpp"
#include "keystep/features.hpp"
#include "keystep/frame_stack.hpp"
#include "keystep/json_io.hpp"
#include "keystep/reconstruct.hpp"
#include "keystep/selector.hpp"
#include "keystep/synth.hpp"

namespace py = pybind11;
using namespace keystep;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array frames_to_array(const Dataset& d) {
    Array out({d.size(), d.height(), d.width()});
    auto* p = out.mutable_data();
    for (const auto& f : d.frames) p = std::copy(f.values.begin(), f.values.end(), p);
    return out;
}

Dataset array_to_dataset(const std::string& id, const std::string& variable, const Array& a,
                         std::optional<std::vector<std::string>> timestamps) {
    if (a.ndim() != 3) throw FormatError("frames must be a (t, height, width) array");
    const auto t = static_cast<std::size_t>(a.shape(0)), h = static_cast<std::size_t>(a.shape(1)),
               w = static_cast<std::size_t>(a.shape(2));
    std::vector<GridFrame> frames;
    const double* p = a.data();
    for (std::size_t i = 0; i < t; ++i, p += w * h) frames.emplace_back(w, h, std::vector<double>(p, p + w * h));
    std::vector<std::string> ts;
    if (timestamps) {
        ts = *timestamps;
    } else {
        for (std::size_t i = 0; i < t; ++i) ts.push_back(format_iso8601(3600.0 * i));
    }
    return make_dataset(id, variable, std::move(frames), std::move(ts));
}

Array matrix_to_array(const CostMatrix& m) {
    Array out({m.size(), m.size()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

CostMatrix array_to_matrix(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw FormatError("cost matrix must be square");
    CostMatrix m(static_cast<std::size_t>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), &m(0, 0));
    return m;
}

std::vector<LatentCode> array_to_codes(const Array& a) {
    if (a.ndim() != 2) throw FormatError("codes must be a (count, dim) array");
    std::vector<LatentCode> codes(static_cast<std::size_t>(a.shape(0)));
    const auto dim = static_cast<std::size_t>(a.shape(1));
    for (std::size_t i = 0; i < codes.size(); ++i) codes[i].values.assign(a.data() + i * dim, a.data() + (i + 1) * dim);
    return codes;
}

Array codes_to_array(const std::vector<LatentCode>& codes) {
    const std::size_t dim = codes.empty() ? 0 : codes.front().dims();
    Array out({codes.size(), dim});
    for (std::size_t i = 0; i < codes.size(); ++i) std::copy(codes[i].values.begin(), codes[i].values.end(), out.mutable_data() + i * dim);
    return out;
}

py::tuple selection_tuple(const Selection& s) { return py::make_tuple(s.steps, s.total_cost); }

}  // namespace

PYBIND11_MODULE(_keystep, m) {
    m.doc() = "Salient time-step selection for raster time series";

    auto base = py::register_exception<Error>(m, "KeystepError", PyExc_ValueError);
    py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<BoundsError>(m, "BoundsError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<EmptyDataError>(m, "EmptyDataError", base.ptr());
    py::register_exception<InvalidCodeError>(m, "InvalidCodeError", base.ptr());
    py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("id", &Dataset::id)
        .def_readonly("variable", &Dataset::variable)
        .def_readonly("timestamps", &Dataset::timestamps)
        .def_property_readonly("width", &Dataset::width)
        .def_property_readonly("height", &Dataset::height)
        .def_property_readonly("vmin", [](const Dataset& d) { return d.norm.vmin; })
        .def_property_readonly("vmax", [](const Dataset& d) { return d.norm.vmax; })
        .def("__len__", &Dataset::size)
        .def("frames", &frames_to_array, "All frames as a (t, height, width) float64 array")
        .def("describe", [](const Dataset& d) { return describe(d).dump(); })
        .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

    m.def("from_array", &array_to_dataset, py::arg("id"), py::arg("variable"), py::arg("frames"),
          py::arg("timestamps") = py::none());
    m.def(
        "synthesize",
        [](const std::string& family, std::size_t t, std::size_t width, std::size_t height, std::uint64_t seed,
           std::vector<std::size_t> bursts) {
            SyntheticSpec s{parse_synth_family(family), t, width, height, seed};
            s.bursts = std::move(bursts);
            return synthesize(s);
        },
        py::arg("family"), py::arg("t"), py::arg("width") = 32, py::arg("height") = 32, py::arg("seed") = 0,
        py::arg("bursts") = std::vector<std::size_t>{});
    m.def("ingest_stack", &ingest_stack, py::arg("path"));
    m.def("export_stack", &export_stack, py::arg("dataset"), py::arg("path"));

    m.def("structural_cost", py::overload_cast<double>(&structural_cost), py::arg("similarity"));
    m.def("statistical_cost", &statistical_cost, py::arg("a"), py::arg("b"));
    m.def("distance_cost", &distance_cost, py::arg("i"), py::arg("j"), py::arg("n"), py::arg("k"),
          py::arg("gamma") = kDefaultGamma, py::arg("sigma") = kDefaultSigma);

    m.def(
        "codes",
        [](const Dataset& d, std::optional<std::pair<std::size_t, std::size_t>> range,
           std::optional<std::array<std::size_t, 4>> region) {
            const FocusRange r = range ? FocusRange{range->first, range->second} : d.full_range();
            std::optional<Region> reg;
            if (region) reg = Region{(*region)[0], (*region)[1], (*region)[2], (*region)[3]};
            return codes_to_array(compute_codes(d, r, reg));
        },
        py::arg("dataset"), py::arg("range") = py::none(), py::arg("region") = py::none(),
        "Pyramid-descriptor latent codes as a (t, 512) array");
    m.def(
        "load_latent_codes", [](const std::filesystem::path& p) { return codes_to_array(load_latent_codes(p)); },
        py::arg("path"));
    m.def(
        "save_latent_codes", [](const Array& codes, const std::filesystem::path& p) { save_latent_codes(array_to_codes(codes), p); },
        py::arg("codes"), py::arg("path"));
    m.def(
        "structural_cost_matrix", [](const Array& codes) { return matrix_to_array(structural_cost_matrix(array_to_codes(codes))); },
        py::arg("codes"));

    m.def(
        "select_salient",
        [](const Array& cost, std::size_t k, std::set<std::size_t> pinned, std::set<std::size_t> excluded) {
            return selection_tuple(select_salient(array_to_matrix(cost), k, pinned, excluded));
        },
        py::arg("cost"), py::arg("k"), py::arg("pinned") = std::set<std::size_t>{},
        py::arg("excluded") = std::set<std::size_t>{}, "DP over a pair-cost matrix; returns (steps, total_cost)");
    m.def(
        "brute_force_select",
        [](const Array& cost, std::size_t k, std::set<std::size_t> pinned, std::set<std::size_t> excluded) {
            const auto mat = array_to_matrix(cost);
            return selection_tuple(brute_force_select(
                mat.size(), k, [&](std::size_t i, std::size_t j) { return mat(i, j); }, pinned, excluded));
        },
        py::arg("cost"), py::arg("k"), py::arg("pinned") = std::set<std::size_t>{},
        py::arg("excluded") = std::set<std::size_t>{});
    m.def("even_selection", &even_selection, py::arg("t"), py::arg("k"));

    m.def(
        "select_json",
        [](const Dataset& d, const std::string& params, std::optional<Array> codes) {
            auto p = params_from_json(Json::parse(params), d.size());
            std::vector<LatentCode> external;
            if (codes) external = array_to_codes(*codes);
            return to_json(select(d, p, external)).dump();
        },
        py::arg("dataset"), py::arg("params"), py::arg("codes") = py::none());
    m.def(
        "evaluate_json",
        [](const Dataset& d, std::vector<std::string> methods, std::vector<std::size_t> ks, bool beta_sweep) {
            EvalOptions o;
            o.methods.clear();
            for (const auto& name : methods) o.methods.push_back(parse_eval_method(name));
            o.ks = std::move(ks);
            o.beta_sweep = beta_sweep;
            return to_json(evaluate(d, d.full_range(), o)).dump();
        },
        py::arg("dataset"), py::arg("methods") = std::vector<std::string>{"dp", "even", "arc"},
        py::arg("ks") = std::vector<std::size_t>{5, 10, 20}, py::arg("beta_sweep") = false);
    m.def(
        "reconstruct",
        [](const Dataset& d, std::vector<std::size_t> steps) {
            auto rec = interpolate(d, d.full_range(), steps);
            Dataset out = d;
            out.frames = std::move(rec);
            return frames_to_array(out);
        },
        py::arg("dataset"), py::arg("steps"));
    m.def(
        "project_2d",
        [](const Array& codes) {
            auto pts = project_2d(array_to_codes(codes));
            Array out({pts.size(), std::size_t{2}});
            for (std::size_t i = 0; i < pts.size(); ++i) {
                out.mutable_at(i, 0) = pts[i].x;
                out.mutable_at(i, 1) = pts[i].y;
            }
            return out;
        },
        py::arg("codes"));
}

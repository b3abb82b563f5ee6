#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsd/analysis.hpp"
#include "qsd/error.hpp"
#include "qsd/montecarlo.hpp"
#include "qsd/schemes.hpp"
#include "qsd/serialize.hpp"

namespace py = pybind11;
using namespace qsd;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

py::array_t<Complex> to_numpy(const CMatrix& m) {
    py::array_t<Complex> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            view(r, c) = m(r, c);
        }
    }
    return out;
}

CMatrix from_numpy(const ComplexArray& a) {
    if (a.ndim() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "expected a 2-d array");
    }
    const auto view = a.unchecked<2>();
    CMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = view(r, c);
        }
    }
    return m;
}

// Rows are the kets.
py::array_t<Complex> kets_to_numpy(const std::vector<Ket>& kets) {
    py::array_t<Complex> out({kets.size(), kets.empty() ? std::size_t{0} : kets.front().dim()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < kets.size(); ++i) {
        for (std::size_t k = 0; k < kets[i].dim(); ++k) {
            view(i, k) = kets[i][k];
        }
    }
    return out;
}

py::array_t<double> table_to_numpy(const ProbabilityTable& t) {
    py::array_t<double> out({t.size(), t.empty() ? std::size_t{0} : t.front().size()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t x = 0; x < t[i].size(); ++x) {
            view(i, x) = t[i][x];
        }
    }
    return out;
}

py::dict record_dict(const ComparisonRecord& r) {
    py::dict d;
    d["gamma"] = r.gamma;
    d["alpha"] = r.alpha ? py::cast(*r.alpha) : py::none();
    d["priors"] = r.priors;
    d["p_mixed"] = r.p_mixed;
    d["p_una_reference"] = r.p_una_reference;
    d["reference_kind"] = to_string(r.reference_kind);
    d["margin"] = r.margin;
    d["verdict"] = r.verdict;
    d["hypothesis_holds"] = r.hypothesis_holds;
    d["theorem_bound"] = r.theorem_bound ? py::cast(*r.theorem_bound) : py::none();
    d["xu_case"] = r.xu_case;
    d["permutation"] = r.permutation;
    return d;
}

std::vector<std::string> label_strings(const Povm& p) {
    std::vector<std::string> out;
    for (const auto& l : p.labels()) {
        out.push_back(l.to_string());
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum state discrimination schemes on small Hilbert spaces";

    py::exception<Error>(m, "QsdError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            const py::object type = py::module_::import("qsd._core").attr("QsdError");
            py::object exc = type(py::str(e.what()));
            exc.attr("code") = std::string(e.name());
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::class_<Scheme>(m, "Scheme")
        .def_property_readonly("kind", [](const Scheme& s) { return scheme_kind(s.params); })
        .def_property_readonly("analytic_success", [](const Scheme& s) { return s.analytic_success; })
        .def_property_readonly("branch_note", [](const Scheme& s) { return s.branch_note; })
        .def_property_readonly("ancilla_dim", [](const Scheme& s) { return s.ancilla_dim; })
        .def_property_readonly("joint_dim", &Scheme::joint_dim)
        .def_property_readonly("priors", [](const Scheme& s) { return s.ensemble.priors; })
        .def_property_readonly("states", [](const Scheme& s) { return kets_to_numpy(s.ensemble.states); })
        .def_property_readonly("coupled_states",
                               [](const Scheme& s) { return kets_to_numpy(s.coupled_ensemble().states); })
        .def_property_readonly("coupling", [](const Scheme& s) { return to_numpy(s.coupling); })
        .def_property_readonly("povm_elements",
                               [](const Scheme& s) {
                                   std::vector<py::array_t<Complex>> out;
                                   for (const auto& e : s.povm.elements()) {
                                       out.push_back(to_numpy(e));
                                   }
                                   return out;
                               })
        .def_property_readonly("labels", [](const Scheme& s) { return label_strings(s.povm); })
        .def("coupled_density", [](const Scheme& s) { return to_numpy(s.coupled_density().matrix()); })
        .def("confusion_matrix",
             [](const Scheme& s) { return table_to_numpy(confusion_matrix(s.coupled_ensemble(), s.povm)); })
        .def("unitarity_residual", [](const Scheme& s) { return unitarity_residual(s.coupling); })
        .def("povm_residual", [](const Scheme& s) { return s.povm.completeness_residual(); })
        .def("to_json", [](const Scheme& s) { return to_json(s).dump(); })
        .def("__repr__", [](const Scheme& s) {
            return "<Scheme " + scheme_kind(s.params) + " success=" + format_number(s.analytic_success) + ">";
        });

    m.def(
        "build_rra",
        [](Complex c_plus, Complex c_minus, std::vector<double> priors) { return build_rra(c_plus, c_minus, priors); },
        py::arg("c_plus"), py::arg("c_minus"), py::arg("priors"));
    m.def(
        "build_mixed_special",
        [](double gamma, std::vector<double> priors, bool allow_trivial) {
            return build_mixed_special(gamma, priors, BuildOptions{allow_trivial});
        },
        py::arg("gamma"), py::arg("priors"), py::arg("allow_trivial") = false);
    m.def(
        "build_mixed_general",
        [](double gamma, double alpha, std::vector<double> priors, bool allow_trivial) {
            return build_mixed_general(gamma, alpha, priors, BuildOptions{allow_trivial});
        },
        py::arg("gamma"), py::arg("alpha"), py::arg("priors"), py::arg("allow_trivial") = false);
    m.def(
        "build_unambiguous_special",
        [](double gamma, double x0, double x1, std::vector<double> priors, bool allow_trivial) {
            return build_unambiguous_special(gamma, x0, x1, priors, BuildOptions{allow_trivial});
        },
        py::arg("gamma"), py::arg("x0"), py::arg("x1"), py::arg("priors"), py::arg("allow_trivial") = false);
    m.def(
        "build_zero_aux",
        [](Complex g01, Complex g12, Complex g20, std::vector<double> priors) {
            return build_zero_aux(g01, g12, g20, priors);
        },
        py::arg("g01"), py::arg("g12"), py::arg("g20"), py::arg("priors"));

    m.def("zero_aux_posterior", &zero_aux_posterior);
    m.def("brute_force_success", &brute_force_success);

    m.def(
        "simulate",
        [](const Scheme& s, std::uint64_t n, std::uint64_t seed) {
            SimResult r;
            {
                py::gil_scoped_release release;
                r = simulate(s, n, seed);
            }
            py::dict d;
            d["n"] = r.n;
            d["seed"] = r.seed;
            d["counts"] = r.counts;
            d["empirical_success"] = r.empirical_success;
            d["std_error"] = r.std_error;
            return d;
        },
        py::arg("scheme"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "xu_max_unambiguous",
        [](double gamma, std::vector<double> priors) {
            const auto x = xu_max_unambiguous(gamma, priors);
            py::dict d;
            d["value"] = x.value;
            d["case"] = x.case_tag;
            d["sorted_priors"] = x.sorted_priors;
            d["permutation"] = x.permutation;
            d["gamma1"] = x.gamma1;
            d["gamma2"] = x.gamma2;
            return d;
        },
        py::arg("gamma"), py::arg("priors"));

    m.def(
        "optimize_unambiguous_special",
        [](double gamma, std::vector<double> priors) {
            const auto o = optimize_unambiguous_special(gamma, priors);
            return py::make_tuple(o.x0, o.x1, o.value);
        },
        py::arg("gamma"), py::arg("priors"));

    m.def(
        "theorem21_check",
        [](double gamma, std::vector<double> priors) { return record_dict(theorem21_check(gamma, priors)); },
        py::arg("gamma"), py::arg("priors"));
    m.def(
        "theorem31_check",
        [](double gamma, std::vector<double> priors) { return record_dict(theorem31_check(gamma, priors)); },
        py::arg("gamma"), py::arg("priors"));

    m.def(
        "sweep",
        [](const std::string& kind, std::vector<double> gammas, double prior_step, bool hypothesis_only) {
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = sweep(parse_sweep_kind(kind), gammas, simplex_grid(prior_step), hypothesis_only);
            }
            py::list rows;
            for (const auto& rec : r.records) {
                rows.append(record_dict(rec));
            }
            return py::make_tuple(rows, r.skipped);
        },
        py::arg("kind"), py::arg("gammas"), py::arg("prior_step") = 0.05, py::arg("hypothesis_only") = true);

    m.def(
        "separable_decomposition",
        [](const Scheme& s) {
            const auto d = separable_decomposition(s);
            py::dict out;
            out["weight"] = d.weight;
            out["part_system"] = to_numpy(d.part_system);
            out["part_ancilla"] = to_numpy(d.part_ancilla);
            out["reconstruction_residual"] = d.reconstruction_residual;
            out["ancilla_part_spectrum"] = d.ancilla_part_spectrum;
            return out;
        },
        py::arg("scheme"));

    m.def(
        "right_classicality_check",
        [](const ComplexArray& rho, std::size_t dim_system, std::size_t dim_ancilla) {
            const auto r = right_classicality_check(DensityMatrix(from_numpy(rho)), dim_system, dim_ancilla);
            return py::make_tuple(r.classical, r.residual);
        },
        py::arg("rho"), py::arg("dim_system"), py::arg("dim_ancilla"));

    m.def(
        "hermitian_eig",
        [](const ComplexArray& h) {
            const auto e = hermitian_eig(from_numpy(h));
            return py::make_tuple(py::array_t<double>(e.values.size(), e.values.data()), to_numpy(e.vectors));
        },
        py::arg("h"));

    m.def(
        "states_from_gram",
        [](const ComplexArray& gram, std::vector<double> priors) {
            return kets_to_numpy(states_from_gram(GramSpec(from_numpy(gram), priors)).states);
        },
        py::arg("gram"), py::arg("priors"));

    m.def(
        "isometry_completion",
        [](const ComplexArray& domain, const ComplexArray& image, std::size_t dim) {
            const CMatrix d = from_numpy(domain);
            const CMatrix i = from_numpy(image);
            std::vector<CVector> dv;
            std::vector<CVector> iv;
            for (std::size_t r = 0; r < d.rows(); ++r) {
                dv.emplace_back(d.entries().begin() + r * d.cols(), d.entries().begin() + (r + 1) * d.cols());
            }
            for (std::size_t r = 0; r < i.rows(); ++r) {
                iv.emplace_back(i.entries().begin() + r * i.cols(), i.entries().begin() + (r + 1) * i.cols());
            }
            return to_numpy(isometry_completion(dv, iv, dim));
        },
        py::arg("domain"), py::arg("image"), py::arg("dim"),
        "Unitary mapping each row of `domain` to the matching row of `image`.");
}

#include "qsd/serialize.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include "qsd/error.hpp"

namespace qsd {

namespace {

template <typename F>
auto parse_field(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed ") + what + ": " + e.what());
    }
}

} // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(to_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Ket& k) {
    Json amps = Json::array();
    for (const auto& z : k.amplitudes()) {
        amps.push_back(to_json(z));
    }
    return {{"dim", k.dim()}, {"amplitudes", std::move(amps)}};
}

Json to_json(const Ensemble& e) {
    Json states = Json::array();
    for (const auto& k : e.states) {
        states.push_back(to_json(k));
    }
    return {{"states", std::move(states)}, {"priors", e.priors}};
}

Json to_json(const GramSpec& g) { return {{"overlaps", to_json(g.overlaps)}, {"priors", g.priors}}; }

Json to_json(const Povm& p) {
    Json elements = Json::array();
    Json labels = Json::array();
    for (std::size_t x = 0; x < p.size(); ++x) {
        elements.push_back(to_json(p.element(x)));
        labels.push_back(p.label(x).to_string());
    }
    return {{"dim", p.dim()}, {"elements", std::move(elements)}, {"labels", std::move(labels)}};
}

Json to_json(const SchemeParams& params) {
    struct Visitor {
        Json operator()(const RraParams& p) const {
            return {{"c_plus", to_json(p.c_plus)}, {"c_minus", to_json(p.c_minus)}};
        }
        Json operator()(const MixedSpecialParams& p) const { return {{"gamma", p.gamma}}; }
        Json operator()(const MixedGeneralParams& p) const { return {{"gamma", p.gamma}, {"alpha", p.alpha}}; }
        Json operator()(const UnambiguousSpecialParams& p) const {
            return {{"gamma", p.gamma}, {"x0", p.x0}, {"x1", p.x1}};
        }
        Json operator()(const ZeroAuxParams& p) const {
            return {{"g01", to_json(p.g01)}, {"g12", to_json(p.g12)}, {"g20", to_json(p.g20)}};
        }
    };
    Json j = std::visit(Visitor{}, params);
    j["kind"] = scheme_kind(params);
    return j;
}

Json to_json(const Scheme& s) {
    return {{"kind", scheme_kind(s.params)},
            {"params", to_json(s.params)},
            {"ensemble", to_json(s.ensemble)},
            {"ancilla_dim", s.ancilla_dim},
            {"coupling", to_json(s.coupling)},
            {"povm", to_json(s.povm)},
            {"analytic_success", s.analytic_success},
            {"branch_note", s.branch_note}};
}

Json to_json(const SimResult& r) {
    return {{"n", r.n},
            {"counts", r.counts},
            {"empirical_success", r.empirical_success},
            {"std_error", r.std_error},
            {"seed", r.seed}};
}

Json to_json(const ComparisonRecord& r) {
    Json j = {{"gamma", r.gamma},
              {"alpha", r.alpha ? Json(*r.alpha) : Json(nullptr)},
              {"priors", r.priors},
              {"p_mixed", r.p_mixed},
              {"reference_kind", to_string(r.reference_kind)},
              {"p_una_reference", r.p_una_reference},
              {"margin", r.margin},
              {"verdict", r.verdict},
              {"hypothesis_holds", r.hypothesis_holds},
              {"permutation", r.permutation}};
    if (r.theorem_bound) {
        j["theorem_bound"] = *r.theorem_bound;
    }
    if (!r.xu_case.empty()) {
        j["xu_case"] = r.xu_case;
    }
    return j;
}

Complex complex_from_json(const Json& j) {
    return parse_field("complex number", [&] {
        if (j.is_number()) {
            return Complex{j.get<double>(), 0.0};
        }
        if (!j.is_array() || j.size() != 2) {
            throw Error(ErrorCode::InvalidArgument, "complex numbers are [re, im] pairs");
        }
        return Complex{j.at(0).get<double>(), j.at(1).get<double>()};
    });
}

CMatrix matrix_from_json(const Json& j) {
    return parse_field("matrix", [&] {
        if (!j.is_array() || j.empty()) {
            throw Error(ErrorCode::InvalidArgument, "matrices are non-empty arrays of rows");
        }
        const std::size_t rows = j.size();
        const std::size_t cols = j.at(0).size();
        std::vector<Complex> entries;
        entries.reserve(rows * cols);
        for (const auto& row : j) {
            if (!row.is_array() || row.size() != cols) {
                throw Error(ErrorCode::DimensionMismatch, "ragged matrix");
            }
            for (const auto& z : row) {
                entries.push_back(complex_from_json(z));
            }
        }
        return CMatrix(rows, cols, std::move(entries));
    });
}

Ket ket_from_json(const Json& j) {
    return parse_field("ket", [&] {
        CVector amps;
        for (const auto& z : j.at("amplitudes")) {
            amps.push_back(complex_from_json(z));
        }
        if (j.contains("dim") && j.at("dim").get<std::size_t>() != amps.size()) {
            throw Error(ErrorCode::DimensionMismatch, "ket dim does not match amplitudes");
        }
        return Ket(std::move(amps));
    });
}

Ensemble ensemble_from_json(const Json& j) {
    return parse_field("ensemble", [&] {
        std::vector<Ket> states;
        for (const auto& k : j.at("states")) {
            states.push_back(ket_from_json(k));
        }
        return Ensemble(std::move(states), j.at("priors").get<std::vector<double>>());
    });
}

GramSpec gram_spec_from_json(const Json& j) {
    return parse_field("gram spec", [&] {
        return GramSpec(matrix_from_json(j.at("overlaps")), j.at("priors").get<std::vector<double>>());
    });
}

Povm povm_from_json(const Json& j) {
    return parse_field("POVM", [&] {
        std::vector<CMatrix> elements;
        for (const auto& m : j.at("elements")) {
            elements.push_back(matrix_from_json(m));
        }
        std::vector<OutcomeLabel> labels;
        for (const auto& l : j.at("labels")) {
            labels.push_back(OutcomeLabel::parse(l.get<std::string>()));
        }
        return Povm(std::move(elements), std::move(labels));
    });
}

std::string format_number(double x) {
    if (x == 0.0) {
        return "0"; // folds -0
    }
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.12g", x);
    std::string s(buf.data());
    // %g honours LC_NUMERIC; pin the separator.
    for (auto& c : s) {
        if (c == ',') {
            c = '.';
        }
    }
    return s;
}

std::string csv_header() { return "gamma,alpha,p0,p1,p2,p_mixed,reference_kind,p_una_reference,margin,verdict"; }

std::string to_csv_row(const ComparisonRecord& r) {
    std::ostringstream out;
    out << format_number(r.gamma) << ',' << (r.alpha ? format_number(*r.alpha) : "") << ','
        << format_number(r.priors[0]) << ',' << format_number(r.priors[1]) << ',' << format_number(r.priors[2])
        << ',' << format_number(r.p_mixed) << ',' << to_string(r.reference_kind) << ','
        << format_number(r.p_una_reference) << ',' << format_number(r.margin) << ','
        << (r.verdict ? "true" : "false");
    return out.str();
}

} // namespace qsd

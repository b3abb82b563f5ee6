#pragma once

// JSON and CSV encodings. Complex numbers are [re, im] pairs; matrices are
// row-major nested arrays of such pairs.

#include <string>

#include <json.hpp>

#include "qsd/analysis.hpp"
#include "qsd/measurement.hpp"
#include "qsd/montecarlo.hpp"
#include "qsd/schemes.hpp"
#include "qsd/states.hpp"

namespace qsd {

using Json = nlohmann::json;

Json to_json(Complex z);
Json to_json(const CMatrix& m);
Json to_json(const Ket& k);
Json to_json(const Ensemble& e);
Json to_json(const GramSpec& g);
Json to_json(const Povm& p);
Json to_json(const SchemeParams& p);
Json to_json(const Scheme& s);
Json to_json(const SimResult& r);
Json to_json(const ComparisonRecord& r);

Complex complex_from_json(const Json& j);
CMatrix matrix_from_json(const Json& j);
Ket ket_from_json(const Json& j);
Ensemble ensemble_from_json(const Json& j);
GramSpec gram_spec_from_json(const Json& j);
Povm povm_from_json(const Json& j);

/// 12 significant digits, '.' separator, independent of locale.
std::string format_number(double x);

/// gamma,alpha,p0,p1,p2,p_mixed,reference_kind,p_una_reference,margin,verdict
std::string csv_header();
/// One row without trailing newline; alpha is empty when absent.
std::string to_csv_row(const ComparisonRecord& r);

} // namespace qsd

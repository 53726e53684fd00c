#pragma once

#include <string>
#include <vector>

#include "fqr/design.hpp"

namespace fqr {

struct SubsamplePlan;

/// Curve CSV: header `t,<t_1>,...,<t_m>`, then one `<id>,<x(t_1)>,...` row
/// per curve. Malformed rows raise std::runtime_error with the line number.
FunctionalDataset readCurvesCsv(const std::string& path);
void writeCurvesCsv(const std::string& path, const FunctionalDataset& dataset);

/// Responses CSV: two columns `id,y`. Matched to the dataset by id; a
/// missing or duplicate id is an error.
void attachResponsesCsv(FunctionalDataset& dataset, const std::string& path);
void writeResponsesCsv(const std::string& path, const FunctionalDataset& dataset);

/// Plan audit CSV: `index,count,prob` for the selected indices.
void writePlanCsv(const std::string& path, const SubsamplePlan& plan);

/// Format a double with round-trip precision (used by all CSV writers so
/// repeated runs are byte-identical).
std::string formatDouble(double v);

}  // namespace fqr

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "neumann/checks.hpp"

namespace neumann {

// Deterministic numeric formatting (%.12g): identical inputs give identical
// bytes on every platform that rounds IEEE doubles correctly.
std::string format_num(double v);

// Point column: "0.3" in 1D, "0.3;0.2" in 2D (semicolon keeps the CSV flat).
std::string format_point(Vec x, int dim);

// Header: statement,model,f,x,t,lhs,rhs,se,margin,verdict
void write_report_csv(std::ostream& os, const std::vector<InequalityReport>& rows, int dim);

// Metadata companion: per-row slack decomposition (se, dt margin, h margin),
// verdict tallies, and the second-fundamental-form estimates, if any.
void write_report_json(std::ostream& os, const std::vector<InequalityReport>& rows,
                       const std::vector<IIEstimate>& ii, int dim, std::uint64_t base_seed);

}  // namespace neumann

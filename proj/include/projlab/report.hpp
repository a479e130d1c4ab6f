// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "projlab/criteria.hpp"
#include "projlab/engine.hpp"

namespace projlab {

// Shortest decimal that reads back to the same double; "inf"/"-inf"/"nan"
// otherwise. Locale independent, so CSV output is byte-stable.
std::string format_double(double v);

// step,deviation,envelope,violated (envelope empty where no bound applies)
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

// Log-scale line chart of deviation and envelope against the step.
void write_trace_svg(std::ostream& out, const IterationTrace& trace, const std::string& title);

nlohmann::ordered_json criteria_to_json(const CriteriaReport& report);

// name,pass,r_or_q,C,gamma,reason
void write_criteria_csv(std::ostream& out, const CriteriaReport& report);

}  // namespace projlab

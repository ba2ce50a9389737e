#pragma once

#include <string>

#include "ecs/analysis.hpp"
#include "ecs/coherent.hpp"
#include "ecs/protocols.hpp"

namespace ecs {

// Shortest representation with up to 17 significant digits; byte-stable for
// identical doubles. Throws on non-finite values (invalid in JSON/CSV).
std::string format_double(double v);

std::string format_complex(cx v); // [re,im]

// {"modes":M,"terms":[{"coeff":[re,im],"labels":[[re,im],...]},...]}
std::string state_to_json(const CoherentSuperposition& s);

// {"params":{...},"engine":"...","outcomes":[...],"success_probability":...,
//  "closed_form_reference":...} with fixed key order; optional params are
// omitted, never null.
std::string report_to_json(const TeleportReport& r);

// header "alpha,value" plus one row per point; trailing newline
std::string curve_to_csv(const ClosedFormCurve& c);
std::string curve_to_json(const ClosedFormCurve& c);

// {"parity":"even|odd","atom":"ground|excited"}
std::string parity_to_json(const ParityResult& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace ecs

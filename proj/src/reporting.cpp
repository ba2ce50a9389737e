#include "ecs/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ecs {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw Error("non-finite value in report");
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_complex(cx v) {
    return "[" + format_double(v.real()) + "," + format_double(v.imag()) + "]";
}

std::string state_to_json(const CoherentSuperposition& s) {
    std::ostringstream out;
    out << "{\"modes\":" << s.mode_count << ",\"terms\":[";
    for (std::size_t t = 0; t < s.terms.size(); ++t) {
        if (t) out << ",";
        out << "{\"coeff\":" << format_complex(s.terms[t].coeff) << ",\"labels\":[";
        for (std::size_t k = 0; k < s.terms[t].labels.size(); ++k) {
            if (k) out << ",";
            out << format_complex(s.terms[t].labels[k]);
        }
        out << "]}";
    }
    out << "]}";
    return out.str();
}

std::string report_to_json(const TeleportReport& r) {
    std::ostringstream out;
    out << "{\"params\":{";
    bool first = true;
    auto field = [&](const char* key, const std::string& value) {
        if (!first) out << ",";
        first = false;
        out << "\"" << key << "\":" << value;
    };
    if (r.input) {
        field("alpha", format_complex(r.input->alpha));
        field("eps_plus", format_complex(r.input->eps_plus));
        field("eps_minus", format_complex(r.input->eps_minus));
    }
    if (r.channel)
        field("channel_sign", r.channel->sign == ChannelSign::kMinus
                                  ? "\"minus\""
                                  : "\"plus\"");
    if (r.input) field("parties", std::to_string(r.input->parties));
    field("mass_tolerance", format_double(r.mass_tolerance));
    if (r.cutoff_override)
        field("cutoff_override", std::to_string(*r.cutoff_override));
    if (r.qubit_a) field("qubit_a", format_complex(*r.qubit_a));
    if (r.qubit_b) field("qubit_b", format_complex(*r.qubit_b));
    if (r.channel_limit_fidelity)
        field("channel_limit_fidelity", format_double(*r.channel_limit_fidelity));
    out << "},\"engine\":\""
        << (r.engine == Engine::kAnalytic ? "analytic" : "fock")
        << "\",\"outcomes\":[";
    for (std::size_t k = 0; k < r.outcomes.size(); ++k) {
        const auto& o = r.outcomes[k];
        if (k) out << ",";
        out << "{\"n\":" << o.cls.n << ",\"m\":" << o.cls.m << ",\"class\":\""
            << to_string(o.cls.kind)
            << "\",\"probability\":" << format_double(o.probability)
            << ",\"fidelity\":" << format_double(o.fidelity) << "}";
    }
    out << "],\"success_probability\":" << format_double(r.success_probability)
        << ",\"closed_form_reference\":" << format_double(r.closed_form_reference)
        << "}";
    return out.str();
}

std::string curve_to_csv(const ClosedFormCurve& c) {
    if (c.alpha.size() != c.values.size())
        throw Error("curve has mismatched column lengths");
    std::string out = "alpha,value\n";
    for (std::size_t k = 0; k < c.alpha.size(); ++k)
        out += format_double(c.alpha[k]) + "," + format_double(c.values[k]) + "\n";
    return out;
}

std::string curve_to_json(const ClosedFormCurve& c) {
    if (c.alpha.size() != c.values.size())
        throw Error("curve has mismatched column lengths");
    std::ostringstream out;
    out << "{\"name\":\"" << c.name << "\",\"points\":[";
    for (std::size_t k = 0; k < c.alpha.size(); ++k) {
        if (k) out << ",";
        out << "{\"alpha\":" << format_double(c.alpha[k])
            << ",\"value\":" << format_double(c.values[k]) << "}";
    }
    out << "]}";
    return out.str();
}

std::string parity_to_json(const ParityResult& r) {
    std::string out = "{\"parity\":\"";
    out += r.parity == Parity::kEven ? "even" : "odd";
    out += "\",\"atom\":\"";
    out += r.atom == AtomLevel::kGround ? "ground" : "excited";
    out += "\"}";
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(text.data(), std::streamsize(text.size()));
    f.flush();
    if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace ecs

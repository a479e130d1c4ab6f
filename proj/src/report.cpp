// SPDX-License-Identifier: Apache-2.0
#include "projlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace projlab {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "step,deviation,envelope,violated\n";
  for (const auto& r : trace.steps) {
    out << r.step << ',' << format_double(r.deviation) << ',';
    if (r.envelope) out << format_double(*r.envelope);
    out << ',' << (r.violated ? 1 : 0) << '\n';
  }
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

void write_trace_svg(std::ostream& out, const IterationTrace& trace, const std::string& title) {
  constexpr double kW = 720, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  constexpr double kFloor = 1e-18;
  double lo = 1.0, hi = 1.0;
  for (const auto& r : trace.steps) {
    for (double v : {r.deviation, r.envelope.value_or(r.deviation)}) {
      v = std::max(v, kFloor);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double llo = std::floor(std::log10(lo)), lhi = std::ceil(std::log10(hi));
  const double span = std::max(lhi - llo, 1.0);
  const double last = trace.steps.empty() ? 1.0 : std::max<double>(1.0, trace.steps.back().step);
  auto px = [&](double step) { return kLeft + (kW - kLeft - kRight) * step / last; };
  auto py = [&](double v) {
    return kTop + (kH - kTop - kBottom) * (lhi - std::log10(std::max(v, kFloor))) / span;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\">" << escape_xml(title)
      << "</text>\n";
  for (double e = llo; e <= lhi; e += std::max(1.0, std::ceil(span / 8))) {
    const double y = py(std::pow(10.0, e));
    out << "<line x1=\"" << kLeft << "\" x2=\"" << kW - kRight << "\" y1=\"" << y << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e"
        << static_cast<int>(e) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\">step (0.." << static_cast<long long>(last) << ")</text>\n";

  auto polyline = [&](const char* color, bool envelope) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : trace.steps) {
      if (envelope && !r.envelope) continue;
      out << px(static_cast<double>(r.step)) << ',' << py(envelope ? *r.envelope : r.deviation) << ' ';
    }
    out << "\"/>\n";
  };
  polyline("#1f77b4", false);
  polyline("#d62728", true);
  for (const auto& r : trace.steps)
    if (r.violated)
      out << "<circle cx=\"" << px(static_cast<double>(r.step)) << "\" cy=\"" << py(r.deviation)
          << "\" r=\"3\" fill=\"#d62728\"/>\n";
  out << "<text x=\"" << kW - kRight - 150 << "\" y=\"" << kTop + 14
      << "\" fill=\"#1f77b4\">deviation</text>\n"
      << "<text x=\"" << kW - kRight - 150 << "\" y=\"" << kTop + 30
      << "\" fill=\"#d62728\">envelope</text>\n"
      << "</svg>\n";
}

namespace {

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

template <class T>
ordered_json optional_number(const std::optional<T>& v) {
  return v ? number(static_cast<double>(*v)) : ordered_json(nullptr);
}

ordered_json budget_json(const QualityBudget& b) {
  return {{"gamma", number(b.gamma)}, {"gamma1", number(b.gamma1)}, {"gamma2", number(b.gamma2)},
          {"i0", b.i0},               {"r", number(b.r)},           {"C", number(b.C)}};
}

}  // namespace

ordered_json criteria_to_json(const CriteriaReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["beta"] = number(report.beta);
  j["q"] = number(report.q);
  j["m"] = report.m;
  j["weakly_consistent"] = report.weakly_consistent;
  j["max_cos"] = number(report.max_cos);
  ordered_json table = ordered_json::array();
  for (std::size_t a = 0; a < report.cos_table.size(); ++a)
    for (std::size_t b = a + 1; b < report.cos_table.size(); ++b) {
      const AngleValue& v = report.cos_table.at(a, b);
      table.push_back({{"pair", {a + 1, b + 1}},
                       {"cos_lower", number(v.lower)},
                       {"cos_upper", number(v.upper)},
                       {"exact", v.exact}});
    }
  j["cosines"] = table;
  if (report.averaged) {
    const auto& a = *report.averaged;
    ordered_json per = ordered_json::array();
    for (double c : a.per_index) per.push_back(number(c));
    j["averaged"] = {{"r", number(a.r)},     {"r_min", number(a.r_min)}, {"per_index", per},
                     {"C", number(a.C)},     {"pass", a.pass}};
  }
  if (report.uniform) {
    const auto& g = *report.uniform;
    j["averaged_uniform"] = {{"gamma_prime", number(g.gamma_prime)},
                             {"gamma", number(g.gamma)},
                             {"r", number(g.r)},
                             {"C", number(g.C)}};
  }
  if (report.cyclic) j["cyclic"] = budget_json(*report.cyclic);
  if (report.quasi_periodic) j["quasi_periodic"] = budget_json(*report.quasi_periodic);
  if (report.random) {
    ordered_json r = {{"freq", number(report.random->freq)},
                      {"lambda", number(report.random->lambda)},
                      {"q", number(report.random->q)}};
    if (report.random_budget) r["budget"] = budget_json(*report.random_budget);
    j["random"] = r;
  }
  ordered_json hyps = ordered_json::array();
  for (const auto& h : report.hypotheses)
    hyps.push_back({{"name", h.name},
                    {"pass", h.pass},
                    {"reason", h.reason},
                    {"r_or_q", optional_number(h.r_or_q)},
                    {"C", optional_number(h.C)},
                    {"gamma", optional_number(h.gamma)}});
  j["hypotheses"] = hyps;
  j["all_pass"] = report.all_pass();
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

}  // namespace

void write_criteria_csv(std::ostream& out, const CriteriaReport& report) {
  out << "name,pass,r_or_q,C,gamma,reason\n";
  for (const auto& h : report.hypotheses) {
    out << h.name << ',' << (h.pass ? "pass" : "fail") << ',';
    if (h.r_or_q) out << format_double(*h.r_or_q);
    out << ',';
    if (h.C) out << format_double(*h.C);
    out << ',';
    if (h.gamma) out << format_double(*h.gamma);
    out << ',' << csv_field(h.reason) << '\n';
  }
}

}  // namespace projlab

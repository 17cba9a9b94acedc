#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pelastica/curves.hpp"

namespace pelastica {

void write_csv(const Trace& trace, std::ostream& out) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "s,x,y,theta,k\n";
    for (const auto& c : trace.samples)
        out << c.s << ',' << c.x << ',' << c.y << ',' << c.theta << ',' << c.k << '\n';
    out.precision(old);
}

Trace read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "s,x,y,theta,k") throw DomainError("CSV header must be s,x,y,theta,k");
    Trace t;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        CurveSample c;
        if (!(row >> c.s >> c.x >> c.y >> c.theta >> c.k)) throw DomainError("malformed CSV row: " + line);
        t.samples.push_back(c);
    }
    return t;
}

void write_svg(const Trace& trace, std::ostream& out) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!trace.samples.empty()) {
        xmin = xmax = trace.samples.front().x;
        ymin = ymax = -trace.samples.front().y;
        for (const auto& c : trace.samples) {
            xmin = std::min(xmin, c.x);
            xmax = std::max(xmax, c.x);
            ymin = std::min(ymin, -c.y);
            ymax = std::max(ymax, -c.y);
        }
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
    const double pad = 0.05 * span;
    const double stroke = 0.005 * span;
    const auto old = out.precision(10);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin - pad << ' ' << ymin - pad << ' '
        << (xmax - xmin) + 2 * pad << ' ' << (ymax - ymin) + 2 * pad << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\" points=\"";
    for (size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& c = trace.samples[i];
        if (i) out << ' ';
        // SVG y grows downward.
        out << c.x << ',' << -c.y;
    }
    out << "\"/>\n</svg>\n";
    out.precision(old);
}

std::string report_json(const ClosedCurveReport& report) {
    nlohmann::json j;
    j["position_gap"] = report.position_gap;
    j["tangent_gap"] = report.tangent_gap;
    j["turning_number"] = report.turning_number;
    return j.dump();
}

}  // namespace pelastica

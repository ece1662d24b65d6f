#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ufem::report {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

struct Axis {
    double lo, hi;  // log10 bounds, whole decades

    double map(double v, double a, double b) const { return a + (std::log10(v) - lo) / (hi - lo) * (b - a); }
};

Axis decade_axis(double mn, double mx)
{
    double lo = std::floor(std::log10(mn)), hi = std::ceil(std::log10(mx));
    if (hi <= lo) hi = lo + 1;
    return {lo, hi};
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series)
{
    double xmn = std::numeric_limits<double>::infinity(), xmx = 0, ymn = xmn, ymx = 0;
    auto usable = [](double x, double y) { return std::isfinite(x) && std::isfinite(y) && x > 0 && y > 0; };
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!usable(s.x[k], s.y[k])) continue;
            xmn = std::min(xmn, s.x[k]);
            xmx = std::max(xmx, s.x[k]);
            ymn = std::min(ymn, s.y[k]);
            ymx = std::max(ymx, s.y[k]);
        }
    }
    if (!(xmx > 0)) xmn = ymn = 1, xmx = ymx = 10;
    const Axis ax = decade_axis(xmn, xmx), ay = decade_axis(ymn, ymx);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";

    for (int d = static_cast<int>(ax.lo); d <= static_cast<int>(ax.hi); ++d) {
        const double px = ax.map(std::pow(10.0, d), x0, x1);
        os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(y1)
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(y0 + 18) << "\" text-anchor=\"middle\">1e" << d
           << "</text>\n";
    }
    for (int d = static_cast<int>(ay.lo); d <= static_cast<int>(ay.hi); ++d) {
        const double py = ay.map(std::pow(10.0, d), y0, y1);
        os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(py)
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">1e" << d
           << "</text>\n";
    }
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y1) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
       << fmt(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
       << escape(xlabel) << "</text>\n";
    os << "<text transform=\"translate(20," << fmt((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(ylabel) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
        std::string pts;
        for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
            if (!usable(series[s].x[k], series[s].y[k])) continue;
            const double px = ax.map(series[s].x[k], x0, x1), py = ay.map(series[s].y[k], y0, y1);
            pts += fmt(px) + "," + fmt(py) + " ";
            os << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        if (!pts.empty()) {
            pts.pop_back();
            os << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        }
        const double ly = y1 + 14 + 18 * static_cast<double>(s);
        os << "<line x1=\"" << fmt(x1 + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(x1 + 32) << "\" y2=\""
           << fmt(ly - 4) << "\" stroke=\"" << color << "\"/>\n";
        os << "<text x=\"" << fmt(x1 + 38) << "\" y=\"" << fmt(ly) << "\">" << escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("not an integer: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

std::pair<int, int> parse_range(const std::string& s)
{
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const auto v = parse_int_list(s);
        if (v.size() != 1) throw std::invalid_argument("bad range: " + s);
        return {v[0], v[0]};
    }
    const auto a = parse_int_list(s.substr(0, dots)), b = parse_int_list(s.substr(dots + 2));
    if (a.size() != 1 || b.size() != 1 || b[0] < a[0]) throw std::invalid_argument("bad range: " + s);
    return {a[0], b[0]};
}

std::pair<double, double> parse_pair(const std::string& s)
{
    const auto items = split_list(s);
    if (items.size() != 2) throw std::invalid_argument("expected two comma-separated numbers: " + s);
    return {std::stod(items[0]), std::stod(items[1])};
}

std::vector<std::string> merge_config(const std::vector<std::string>& args, const nlohmann::json& config)
{
    if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
    auto present = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    auto scalar = [](const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
            return std::string(buf);
        }
        throw std::invalid_argument("unsupported config value: " + v.dump());
    };

    std::vector<std::string> extra;
    for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        if (present(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) extra.push_back(flag);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (const auto& v : value) text += (text.empty() ? "" : ",") + scalar(v);
        } else {
            text = scalar(value);
        }
        extra.push_back(flag);
        extra.push_back(text);
    }
    std::vector<std::string> out(args.begin(), args.begin() + std::min<std::ptrdiff_t>(2, std::ssize(args)));
    out.insert(out.end(), extra.begin(), extra.end());
    if (args.size() > 2) out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

}  // namespace ufem::report

#include "gcce/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gcce/error.hpp"

namespace gcce {

std::string format_curve_csv(const CoherenceCurve& curve) {
    if (curve.times.size() != curve.values.size()) throw ShapeError("curve times and values differ in length");
    std::string out = std::string(kCurveCsvHeader) + "\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const Complex v = curve.values[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", curve.times[i], v.real(), v.imag(), std::abs(v));
        out += buf;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_curve_csv(const std::string& path, const CoherenceCurve& curve) { write_text_file(path, format_curve_csv(curve)); }

CoherenceCurve parse_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    CoherenceCurve curve;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line.rfind("time_ms,coh_re,coh_im", 0) != 0) throw ParseError("missing curve header", lineno);
            continue;
        }
        double t = 0, re = 0, im = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &re, &im) != 3) throw ParseError("malformed curve row", lineno);
        curve.times.push_back(t);
        curve.values.emplace_back(re, im);
    }
    if (curve.times.empty()) throw ParseError("curve file has no rows", lineno);
    return curve;
}

CoherenceCurve read_curve_csv(const std::string& path) { return parse_curve_csv(read_text_file(path)); }

} // namespace gcce

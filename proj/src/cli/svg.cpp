#include "harbor/cli/svg.hpp"

#include "harbor/util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace harbor::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_event_study_svg(const std::filesystem::path& path, const est::EventStudyFit& fit,
                           const EventPlotOptions& opts) {
    std::vector<const est::EventStudyTerm*> terms;
    for (const auto& t : fit.terms) {
        if (!opts.treatment.empty() && t.treatment != opts.treatment) continue;
        terms.push_back(&t);
    }
    if (terms.empty()) throw DataError("event plot: no terms to draw");
    std::sort(terms.begin(), terms.end(),
              [](const auto* a, const auto* b) { return a->year < b->year; });

    double lo = 0.0, hi = 0.0;
    for (const auto* t : terms) {
        lo = std::min(lo, t->beta - opts.ci_z * t->se);
        hi = std::max(hi, t->beta + opts.ci_z * t->se);
    }
    const double pad = 0.1 * std::max(hi - lo, 1e-12);
    lo -= pad;
    hi += pad;

    const double mleft = 60, mright = 20, mtop = 36, mbottom = 40;
    const double pw = opts.width - mleft - mright;
    const double ph = opts.height - mtop - mbottom;
    const int year_min = terms.front()->year;
    const int year_max = terms.back()->year;
    const auto sx = [&](double year) {
        return year_max == year_min
                   ? mleft + pw / 2
                   : mleft + pw * (year - year_min) / static_cast<double>(year_max - year_min);
    };
    const auto sy = [&](double v) { return mtop + ph * (hi - v) / (hi - lo); };

    std::ofstream out(path);
    if (!out) throw DataError("event plot: cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
        << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.title.empty()) {
        out << "<text x=\"" << num(opts.width / 2.0)
            << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\">"
            << opts.title << "</text>\n";
    }
    // Axes and the zero line.
    out << "<line x1=\"" << num(mleft) << "\" y1=\"" << num(mtop) << "\" x2=\"" << num(mleft)
        << "\" y2=\"" << num(mtop + ph) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(mleft) << "\" y1=\"" << num(mtop + ph) << "\" x2=\""
        << num(mleft + pw) << "\" y2=\"" << num(mtop + ph) << "\" stroke=\"black\"/>\n";
    if (lo < 0.0 && hi > 0.0) {
        out << "<line x1=\"" << num(mleft) << "\" y1=\"" << num(sy(0.0)) << "\" x2=\""
            << num(mleft + pw) << "\" y2=\"" << num(sy(0.0))
            << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (double v : {lo + pad, 0.0, hi - pad}) {
        out << "<text x=\"" << num(mleft - 8) << "\" y=\"" << num(sy(v) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
            << "</text>\n";
    }
    for (const auto* t : terms) {
        const double x = sx(t->year);
        out << "<text x=\"" << num(x) << "\" y=\"" << num(mtop + ph + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << t->year << "</text>\n";
        if (!t->is_reference && t->se > 0.0) {
            const double y1 = sy(t->beta - opts.ci_z * t->se);
            const double y0 = sy(t->beta + opts.ci_z * t->se);
            out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x)
                << "\" y2=\"" << num(y1) << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
            out << "<line x1=\"" << num(x - 4) << "\" y1=\"" << num(y0) << "\" x2=\""
                << num(x + 4) << "\" y2=\"" << num(y0) << "\" stroke=\"steelblue\"/>\n";
            out << "<line x1=\"" << num(x - 4) << "\" y1=\"" << num(y1) << "\" x2=\""
                << num(x + 4) << "\" y2=\"" << num(y1) << "\" stroke=\"steelblue\"/>\n";
        }
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(sy(t->beta)) << "\" r=\"3\" fill=\""
            << (t->is_reference ? "gray" : "steelblue") << "\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace harbor::cli

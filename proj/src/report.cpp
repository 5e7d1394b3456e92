#include "epirelax/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include "epirelax/adatom.hpp"
#include "epirelax/elastic.hpp"

namespace epirelax {

std::uint64_t config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header_comment,
                     const std::vector<std::string>& columns)
    : path_(path), ncols_(columns.size()) {
    body_ += "# " + header_comment + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        body_ += columns[i];
        body_ += (i + 1 == columns.size()) ? "\n" : ",";
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        body_ += cells[i];
        body_ += (i + 1 == cells.size()) ? "\n" : ",";
    }
}

void CsvWriter::row_numbers(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    row(s);
}

CsvWriter::~CsvWriter() {
    std::ofstream out(path_, std::ios::binary);
    out << body_;
}

namespace {

double nice_tick(double span) {
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(std::max(raw, 1e-300))));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

}  // namespace

void write_projected_density_csv(const std::string& path, const std::string& header,
                                 const AdatomMeasure& mu, const GridSpec& grid) {
    struct Agg {
        KahanSum length;
        double density = 0.0;
    };
    std::map<std::array<long, 3>, Agg> cells;
    const auto& segs = mu.graph().segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        Point mid{0.5 * (segs[i].pts.front().x + segs[i].pts.back().x),
                  0.5 * (segs[i].pts.front().y + segs[i].pts.back().y)};
        std::array<long, 3> key{grid.cell_x(mid.x), grid.cell_y(mid.y),
                                segs[i].kind == SegmentKind::Cut ? 1L : 0L};
        Agg& a = cells[key];
        a.length.add(segs[i].length);
        a.density = mu.density()[i];
    }
    CsvWriter csv(path, header, {"cell_i", "cell_j", "part", "length", "density"});
    for (const auto& [key, agg] : cells)
        csv.row({std::to_string(key[0]), std::to_string(key[1]),
                 key[2] ? "cut" : "tilde", format_double(agg.length.value()),
                 format_double(agg.density)});
}

void write_mesh_csv(const std::string& node_path, const std::string& tri_path,
                    const std::string& header, const FilmMesh& mesh) {
    CsvWriter nodes(node_path, header, {"id", "x", "y", "flag"});
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        nodes.row({std::to_string(i), format_double(mesh.nodes[i].x),
                   format_double(mesh.nodes[i].y), std::to_string(mesh.flags[i])});
    CsvWriter tris(tri_path, header, {"id", "n0", "n1", "n2"});
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
        tris.row({std::to_string(i), std::to_string(mesh.triangles[i][0]),
                  std::to_string(mesh.triangles[i][1]), std::to_string(mesh.triangles[i][2])});
}

void write_displacement_csv(const std::string& path, const std::string& header,
                            const std::vector<std::array<double, 2>>& v) {
    CsvWriter csv(path, header, {"id", "vx", "vy"});
    for (std::size_t i = 0; i < v.size(); ++i)
        csv.row({std::to_string(i), format_double(v[i][0]), format_double(v[i][1])});
}

void write_svg_plot(const std::string& path, const std::string& header,
                    const std::string& title, const std::vector<SvgSeries>& series,
                    bool log_x) {
    const double W = 720, H = 440, L = 70, R = 20, T = 40, B = 50;
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const SvgSeries& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            double x = log_x ? std::log10(std::max(s.xs[i], 1e-12)) : s.xs[i];
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, s.ys[i]);
            ymax = std::max(ymax, s.ys[i]);
        }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) {
        double v = log_x ? std::log10(std::max(x, 1e-12)) : x;
        return L + (v - xmin) / (xmax - xmin) * (W - L - R);
    };
    auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string out;
    out += "<!-- " + header + " -->\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
           "viewBox=\"0 0 720 440\">\n";
    out += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
    out += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";

    double tick = nice_tick(ymax - ymin);
    for (double y = std::ceil(ymin / tick) * tick; y <= ymax + 1e-12; y += tick) {
        out += "<line x1=\"" + format_double(L) + "\" y1=\"" + format_double(sy(y)) + "\" x2=\"" +
               format_double(W - R) + "\" y2=\"" + format_double(sy(y)) +
               "\" stroke=\"#ddd\"/>\n";
        out += "<text x=\"" + format_double(L - 6) + "\" y=\"" + format_double(sy(y) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               format_double(y) + "</text>\n";
    }
    double xtick = nice_tick(xmax - xmin);
    for (double x = std::ceil(xmin / xtick) * xtick; x <= xmax + 1e-12; x += xtick) {
        double px = L + (x - xmin) / (xmax - xmin) * (W - L - R);
        double label = log_x ? std::pow(10.0, x) : x;
        out += "<line x1=\"" + format_double(px) + "\" y1=\"" + format_double(T) + "\" x2=\"" +
               format_double(px) + "\" y2=\"" + format_double(H - B) + "\" stroke=\"#eee\"/>\n";
        out += "<text x=\"" + format_double(px) + "\" y=\"" + format_double(H - B + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               format_double(label) + "</text>\n";
    }
    out += "<rect x=\"" + format_double(L) + "\" y=\"" + format_double(T) + "\" width=\"" +
           format_double(W - L - R) + "\" height=\"" + format_double(H - T - B) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const SvgSeries& sr = series[s];
        std::string pts;
        for (std::size_t i = 0; i < sr.xs.size(); ++i)
            pts += format_double(sx(sr.xs[i])) + "," + format_double(sy(sr.ys[i])) + " ";
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               colors[s % 6] + "\" stroke-width=\"1.5\"/>\n";
        double ly = T + 16 + 16 * static_cast<double>(s);
        out += "<line x1=\"" + format_double(W - R - 150) + "\" y1=\"" + format_double(ly - 4) +
               "\" x2=\"" + format_double(W - R - 130) + "\" y2=\"" + format_double(ly - 4) +
               "\" stroke=\"" + colors[s % 6] + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + format_double(W - R - 124) + "\" y=\"" + format_double(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + sr.label + "</text>\n";
    }
    out += "</svg>\n";
    std::ofstream file(path, std::ios::binary);
    file << out;
}

}  // namespace epirelax

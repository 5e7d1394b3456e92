#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "epirelax/common.hpp"

namespace epirelax {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// FNV-1a of the raw config bytes; stamped into every output header.
std::uint64_t config_hash(const std::string& text);

/// Deterministic shortest-faithful double formatting ("%.17g" fallback).
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header_comment,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row_numbers(const std::vector<double>& cells);
    ~CsvWriter();

private:
    std::string path_;
    std::string body_;
    std::size_t ncols_;
};

struct SvgSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

class AdatomMeasure;
struct GridSpec;
struct FilmMesh;

/// Projected densities per cell and graph part:
/// cell_i,cell_j,part,length,density.
void write_projected_density_csv(const std::string& path, const std::string& header,
                                 const AdatomMeasure& mu, const GridSpec& grid);

/// Mesh node/triangle lists and a displacement field:
/// nodes id,x,y,flag; triangles id,n0,n1,n2; displacement id,vx,vy.
void write_mesh_csv(const std::string& node_path, const std::string& tri_path,
                    const std::string& header, const FilmMesh& mesh);
void write_displacement_csv(const std::string& path, const std::string& header,
                            const std::vector<std::array<double, 2>>& v);

/// Bare polyline chart: axes, ticks, legend. No external plotting dependency
/// so runs stay hermetic.
void write_svg_plot(const std::string& path, const std::string& header,
                    const std::string& title, const std::vector<SvgSeries>& series,
                    bool log_x = false);

}  // namespace epirelax

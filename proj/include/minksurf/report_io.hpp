#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "minksurf/pipeline.hpp"

namespace minksurf {

using nlohmann::json;

/// File-backed run description. Parsing is strict: unknown keys are
/// rejected, and every applied default is echoed back by `echo()`.
struct RunConfig {
    int grid_level = 3;
    std::shared_ptr<const PunctureSet> punctures;  // null: kappa = 1 control
    int n = 0;                                     // solve mode
    std::vector<int> n_values;                     // sweep mode
    SolveOptions solver;
    std::map<std::string, double> tolerances;
    std::string out_dir = "out";
    bool export_mesh = true;
    unsigned seed = 0;

    json echo() const;
};

RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

/// Points file for the weights command: { "points": [[x,y,z], ...] }.
std::vector<UnitVector> load_points(const std::string& path);

json body_to_json(const ConvexPolytope& P);
ConvexPolytope body_from_json(const json& j);

/// ASCII OBJ with 17-significant-digit coordinates, lexicographically sorted
/// vertices, and one CCW polygon per non-empty facet.
void export_obj(const ConvexPolytope& P, const std::string& path);

/// Reads back an OBJ written by export_obj (vertices + polygonal faces);
/// facet planes and areas are recomputed from the loops.
ConvexPolytope import_obj(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& content);

}  // namespace minksurf

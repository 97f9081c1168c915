#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfmix/phase_grid.hpp"

namespace selfmix::driver {

/// %.17g, enough digits to round-trip a double.
std::string format_double(double v);

/// "rho_t<step>.csv"
std::string snapshot_name(std::size_t step);

/// Header: cell coordinates (x[,y]) then one column per node, a(αx[;αy]).
/// One row per cell.
void write_snapshot(const std::filesystem::path& path, const AlphaField& field, const SpatialGrid& space,
                    const VelocityGrid& velocity);

/// Reads a snapshot written by write_snapshot for the same grids. Throws
/// std::runtime_error on a shape mismatch or malformed file.
AlphaField read_snapshot(const std::filesystem::path& path, const SpatialGrid& space,
                         const VelocityGrid& velocity);

/// Snapshot files of a run directory as (step, path), ordered by step.
std::vector<std::pair<std::size_t, std::filesystem::path>> list_snapshots(const std::filesystem::path& dir);

struct PgmScale {
    double min = 0.0;
    double max = 0.0;
};

/// Binary greymap (P5, maxval 255) of a cell field, min-max scaled. Row 0 of
/// the image is the top row of the domain.
PgmScale write_pgm(const std::filesystem::path& path, const CellField& values, const SpatialGrid& space);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// Rows of a CSV file split on commas; the header is returned as row 0.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace selfmix::driver

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rfimg/channel.hpp"
#include "rfimg/cloud.hpp"
#include "rfimg/pathgen.hpp"
#include "rfimg/scene.hpp"

namespace rfimg::io {

// Any malformed input file: bad JSON, schema violations, bad CSV rows.
// Messages carry enough context (key, row number) to locate the problem.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Scene JSON, strict: unknown keys anywhere are rejected, material kinds
// constrain which fields may appear, triangles must be non-degenerate and
// reference a declared material.
pathgen::Scene load_scene(const std::string& path);

struct DropGeometry {
  Vec3 tx;
  Vec3 rx;
};

// Drops CSV: one row of tx_x,tx_y,tx_z,rx_x,rx_y,rx_z per drop. An optional
// header row and #-comments are skipped. tx == rx is rejected with the row
// number.
std::vector<DropGeometry> load_drops(const std::string& path);

struct TracedPath {
  int drop_id = 0;
  int path_id = 0;
  pathgen::PathComponent path;
};

// Paths CSV with 17-significant-digit reals. Drops are written in order;
// path ids are the per-drop row positions. The ground-truth columns are
// empty for line-of-sight rows.
void write_paths_csv(const std::string& path,
                     const std::vector<pathgen::Drop>& drops);
std::vector<TracedPath> read_paths_csv(const std::string& path);

// ASCII PLY point cloud with x, y, z, gain_db, residual as doubles and
// drop_id, path_id as ints. read_ply requires exactly this layout.
void write_ply(const std::string& path, const cloud::PointCloud& cloud);
cloud::PointCloud read_ply(const std::string& path);

void write_tradeoff_csv(const std::string& path,
                        const std::vector<cloud::TradeoffRow>& rows);

// Flat dump of CIR taps: one row per matrix entry.
void write_cir_csv(const std::string& path, int drop_id,
                   const std::vector<channel::CirTap>& taps, bool append);

// %.17g rendering used by every writer, so outputs are reproducible
// byte for byte.
std::string format_real(double value);

} // namespace rfimg::io

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfimg/channel.hpp"
#include "rfimg/cloud.hpp"
#include "rfimg/erp.hpp"
#include "rfimg/io.hpp"
#include "rfimg/pathgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string scene_path;
  std::string drops_path;
  std::string out_path;
  double carrier_hz = 6.75e9;
  double tx_power_dbm = 0.0;
  double cutoff_dbm = -160.0;
  double gamma_m = 10.0;
  int max_bounces = 2;
  std::string diffuse = "16";
  std::uint64_t seed = 0;
};

int parse_diffuse(const std::string& value) {
  if (value == "off") return 0;
  std::size_t consumed = 0;
  int n = 0;
  try {
    n = std::stoi(value, &consumed);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--diffuse", "expected a sample count or 'off'");
  }
  if (consumed != value.size() || n < 0)
    throw CLI::ValidationError("--diffuse", "expected a sample count or 'off'");
  return n;
}

// Rows grouped into drops keyed by drop id, preserving row order and the
// file's path ids.
std::map<int, rfimg::pathgen::Drop> group_paths(
    const std::vector<rfimg::io::TracedPath>& rows) {
  std::map<int, rfimg::pathgen::Drop> drops;
  for (const rfimg::io::TracedPath& row : rows) {
    rfimg::pathgen::Drop& drop = drops[row.drop_id];
    drop.drop_id = row.drop_id;
    drop.paths.push_back(row.path);
  }
  return drops;
}

int cmd_trace(const CommonOptions& opt) {
  const rfimg::pathgen::Scene scene = rfimg::io::load_scene(opt.scene_path);
  const auto geoms = rfimg::io::load_drops(opt.drops_path);

  rfimg::pathgen::TraceConfig cfg;
  cfg.carrier_hz = opt.carrier_hz;
  cfg.tx_power_dbm = opt.tx_power_dbm;
  cfg.cutoff_dbm = opt.cutoff_dbm;
  cfg.max_bounces = opt.max_bounces;
  cfg.diffuse_samples = parse_diffuse(opt.diffuse);
  cfg.seed = opt.seed;

  std::vector<rfimg::pathgen::Drop> drops;
  drops.reserve(geoms.size());
  for (std::size_t i = 0; i < geoms.size(); ++i)
    drops.push_back(rfimg::pathgen::trace_drop(scene, geoms[i].tx, geoms[i].rx,
                                               cfg, static_cast<int>(i) + 1));
  rfimg::io::write_paths_csv(opt.out_path, drops);
  if (drops.empty())
    std::cerr << "warning: no drops in " << opt.drops_path
              << "; wrote an empty paths file\n";
  return kExitOk;
}

int cmd_image(const CommonOptions& opt, const std::string& paths_file) {
  if (!(opt.gamma_m > 0.0))
    throw CLI::ValidationError("--gamma", "must be positive");
  const auto rows = rfimg::io::read_paths_csv(paths_file);
  const auto geoms = rfimg::io::load_drops(opt.drops_path);
  auto grouped = group_paths(rows);

  rfimg::erp::DropSolveStats totals;
  std::vector<std::vector<rfimg::erp::ErpSolution>> per_drop;
  for (auto& [drop_id, drop] : grouped) {
    if (drop_id < 1 || static_cast<std::size_t>(drop_id) > geoms.size())
      throw rfimg::io::ParseError("paths file references drop " +
                                  std::to_string(drop_id) +
                                  " beyond the drops file");
    drop.tx = geoms[static_cast<std::size_t>(drop_id) - 1].tx;
    drop.rx = geoms[static_cast<std::size_t>(drop_id) - 1].rx;
    rfimg::erp::DropSolveStats stats;
    per_drop.push_back(rfimg::erp::solve_drop(drop, &stats));
    totals.paths_in += stats.paths_in;
    totals.los_skipped += stats.los_skipped;
    totals.degenerate_skipped += stats.degenerate_skipped;
    totals.solved += stats.solved;
  }

  rfimg::cloud::FusionConfig fusion;
  fusion.gamma_m = opt.gamma_m;
  const rfimg::cloud::PointCloud fused =
      rfimg::cloud::filter_and_fuse(per_drop, fusion);
  rfimg::io::write_ply(opt.out_path, fused);

  const long long rejected =
      totals.solved - static_cast<long long>(fused.size());
  std::ostringstream report;
  report << "paths_in " << totals.paths_in << '\n'
         << "los_skipped " << totals.los_skipped << '\n'
         << "degenerate_skipped " << totals.degenerate_skipped << '\n'
         << "rejected_by_gamma " << rejected << '\n'
         << "kept " << fused.size() << '\n';
  std::cout << report.str();
  std::ofstream report_file(opt.out_path + ".report.txt");
  report_file << report.str();
  return kExitOk;
}

int cmd_eval(const CommonOptions& opt, const std::string& cloud_file,
             const std::vector<int>& pairs, std::size_t reference_points) {
  if (!(opt.gamma_m > 0.0))
    throw CLI::ValidationError("--gamma", "must be positive");
  if (pairs.empty())
    throw CLI::ValidationError("--pairs", "need at least one pair count");
  const auto cloud = rfimg::io::read_ply(cloud_file);
  const auto scene = rfimg::io::load_scene(opt.scene_path);
  const auto geoms = rfimg::io::load_drops(opt.drops_path);
  for (const int k : pairs)
    if (k < 1 || static_cast<std::size_t>(k) > geoms.size())
      throw CLI::ValidationError("--pairs",
                                 "pair count " + std::to_string(k) +
                                     " exceeds the " +
                                     std::to_string(geoms.size()) + " drops");

  // Rebuild per-drop solution stubs from the stored cloud; positions and
  // residuals are all fusion needs.
  std::vector<std::vector<rfimg::erp::ErpSolution>> per_drop(geoms.size());
  for (const rfimg::cloud::CloudPoint& p : cloud.points) {
    if (p.drop_id < 1 || static_cast<std::size_t>(p.drop_id) > geoms.size())
      throw rfimg::io::ParseError("cloud references drop " +
                                  std::to_string(p.drop_id) +
                                  " beyond the drops file");
    rfimg::erp::ErpSolution sol;
    sol.erp = p.position;
    sol.segments.a_end = p.position;
    sol.segments.b_end = p.position;
    sol.residual = p.residual;
    sol.gain_db = p.gain_db;
    sol.drop_id = p.drop_id;
    sol.path_id = p.path_id;
    per_drop[static_cast<std::size_t>(p.drop_id) - 1].push_back(sol);
  }

  const auto reference =
      rfimg::cloud::sample_reference(scene, reference_points, opt.seed);
  rfimg::cloud::FusionConfig fusion;
  fusion.gamma_m = opt.gamma_m;
  const auto rows =
      rfimg::cloud::tradeoff_curve(per_drop, reference, fusion, pairs);
  for (const auto& row : rows)
    if (std::isnan(row.chamfer_m))
      std::cerr << "warning: no points kept at " << row.num_pairs
                << " pairs; recorded nan\n";
  rfimg::io::write_tradeoff_csv(opt.out_path, rows);
  std::cout << "chamfer_m " << rfimg::io::format_real(rows.back().chamfer_m)
            << '\n';
  return kExitOk;
}

int cmd_cir(const CommonOptions& opt, const std::string& paths_file, int m_x,
            int m_y, double d_x_m, double d_y_m) {
  const double lambda = rfimg::kSpeedOfLight / opt.carrier_hz;
  rfimg::channel::ArrayGeometry geom;
  geom.m_x = m_x;
  geom.m_y = m_y;
  geom.d_x = d_x_m > 0.0 ? d_x_m : lambda / 2.0;
  geom.d_y = d_y_m > 0.0 ? d_y_m : lambda / 2.0;
  geom.lambda = lambda;
  if (geom.m_x < 1 || geom.m_y < 1)
    throw CLI::ValidationError("--mx/--my", "antenna counts must be >= 1");

  const auto rows = rfimg::io::read_paths_csv(paths_file);
  const auto grouped = group_paths(rows);
  bool first = true;
  if (grouped.empty()) {
    std::cerr << "warning: no paths in " << paths_file
              << "; wrote an empty tap file\n";
    rfimg::io::write_cir_csv(opt.out_path, 0, {}, false);
    return kExitOk;
  }
  for (const auto& [drop_id, drop] : grouped) {
    const auto taps = rfimg::channel::synthesize_cir(drop, geom, geom);
    rfimg::io::write_cir_csv(opt.out_path, drop_id, taps, !first);
    first = false;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"RF imaging pipeline: multipath tracing, reflection-point "
               "imaging, and point-cloud evaluation"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string paths_file;
  std::string cloud_file;
  std::vector<int> pairs;
  std::size_t reference_points = 10000;
  int m_x = 2, m_y = 2;
  double d_x_m = -1.0, d_y_m = -1.0;

  CLI::App* trace = app.add_subcommand("trace", "Trace multipath components");
  trace->add_option("--scene", opt.scene_path, "Scene JSON")->required();
  trace->add_option("--drops", opt.drops_path, "Drops CSV")->required();
  trace->add_option("--out", opt.out_path, "Output paths CSV")->required();
  trace->add_option("--carrier-hz", opt.carrier_hz, "Carrier frequency (Hz)");
  trace->add_option("--tx-power-dbm", opt.tx_power_dbm, "Transmit power (dBm)");
  trace->add_option("--cutoff-dbm", opt.cutoff_dbm, "Path power cutoff (dBm)");
  trace->add_option("--max-bounces", opt.max_bounces,
                    "Specular bounce limit (0-2)")
      ->check(CLI::Range(0, 2));
  trace->add_option("--diffuse", opt.diffuse,
                    "Diffuse samples per scatter event, or 'off'");
  trace->add_option("--seed", opt.seed, "Random seed");

  CLI::App* image = app.add_subcommand("image", "Solve reflection points and fuse");
  image->add_option("paths", paths_file, "Paths CSV from trace")->required();
  image->add_option("--drops", opt.drops_path, "Drops CSV")->required();
  image->add_option("--out", opt.out_path, "Output PLY cloud")->required();
  image->add_option("--gamma", opt.gamma_m, "Residual filter threshold (m)");

  CLI::App* eval = app.add_subcommand("eval", "Chamfer-distance tradeoff curve");
  eval->add_option("cloud", cloud_file, "Fused PLY cloud")->required();
  eval->add_option("--scene", opt.scene_path, "Scene JSON")->required();
  eval->add_option("--drops", opt.drops_path, "Drops CSV")->required();
  eval->add_option("--out", opt.out_path, "Output tradeoff CSV")->required();
  eval->add_option("--pairs", pairs, "Pair counts to evaluate")
      ->required()
      ->delimiter(',');
  eval->add_option("--gamma", opt.gamma_m, "Residual filter threshold (m)");
  eval->add_option("--seed", opt.seed, "Reference sampling seed");
  eval->add_option("--reference-points", reference_points,
                   "Reference cloud size");

  CLI::App* cir = app.add_subcommand("cir", "Dump channel impulse response taps");
  cir->add_option("paths", paths_file, "Paths CSV from trace")->required();
  cir->add_option("--out", opt.out_path, "Output tap CSV")->required();
  cir->add_option("--carrier-hz", opt.carrier_hz, "Carrier frequency (Hz)");
  cir->add_option("--mx", m_x, "Antennas per x axis")->check(CLI::Range(1, 4096));
  cir->add_option("--my", m_y, "Antennas per y axis")->check(CLI::Range(1, 4096));
  cir->add_option("--dx-m", d_x_m, "Element spacing x (m), default lambda/2");
  cir->add_option("--dy-m", d_y_m, "Element spacing y (m), default lambda/2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (trace->parsed()) return cmd_trace(opt);
    if (image->parsed()) return cmd_image(opt, paths_file);
    if (eval->parsed())
      return cmd_eval(opt, cloud_file, pairs, reference_points);
    if (cir->parsed()) return cmd_cir(opt, paths_file, m_x, m_y, d_x_m, d_y_m);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rfimg::io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

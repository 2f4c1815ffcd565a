// Command-line driver. Results go to stdout as JSON; failures print a JSON
// error document on stderr and exit nonzero.

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msc/constraints/masks.hpp"
#include "msc/core/errors.hpp"
#include "msc/kinematics/ik.hpp"
#include "msc/morph/outline.hpp"
#include "msc/morph/ppm.hpp"
#include "msc/pipeline/oracle.hpp"
#include "msc/pipeline/reconstruct.hpp"
#include "msc/pipeline/report.hpp"
#include "msc/visual/edge_map_io.hpp"
#include "msc/visual/families.hpp"

using namespace msc;
using nlohmann::ordered_json;

namespace {

Voxel parse_voxel(const std::string& text) {
  std::stringstream ss(text);
  Voxel v;
  char c1 = 0, c2 = 0;
  if (!(ss >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',' || !ss.eof())
    throw ConfigError("expected x,y,z but got '" + text + "'");
  return v;
}

// "az,el;az,el;..."
std::vector<morph::ViewAngles> parse_views(const std::string& text) {
  std::vector<morph::ViewAngles> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    std::stringstream ss(item);
    morph::ViewAngles v;
    char comma = 0;
    if (!(ss >> v.azimuth_deg >> comma >> v.elevation_deg) || comma != ',' || !ss.eof())
      throw ConfigError("expected az,el in --views but got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--views needs at least one az,el pair");
  return out;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

int demo_visual(const std::string& input_path, const std::string& template_path,
                const std::optional<std::string>& families_path, double rate) {
  const auto input = visual::load_edge_map(input_path);
  const auto pattern = visual::load_edge_map(template_path);
  if (input.space() != pattern.space())
    throw ConfigError("input is " + input.space().describe() + " but the template is " +
                      pattern.space().describe());
  visual::VisualFamilySpec spec;
  if (families_path) {
    spec = visual::family_spec_from_json(nlohmann::json::parse(visual::read_file(*families_path)));
  } else {
    spec.shifts = visual::shift_window(-3, 3, -3, 3);
    spec.rotations_deg = visual::uniform_angles(45.0, 3, 4);
  }
  const auto families = visual::VisualFamilies::build(input.space(), spec);
  Circuit circuit(visual::make_visual_stages(families, rate), input, pattern);
  circuit.run();
  const auto leaders = circuit.leaders();
  ordered_json j;
  j["schema"] = pipeline::report_schema;
  const auto pick = [&](std::size_t stage) { return leaders[stage][0]; };
  if (pick(0) >= 0 && pick(1) >= 0 && pick(2) >= 0) {
    const auto& shift = spec.shifts[std::size_t(pick(0))];
    j["shift"] = {{"index", pick(0)}, {"dx", shift.dx}, {"dy", shift.dy}};
    j["scale"] = {{"index", pick(1)}, {"factor", spec.scales[std::size_t(pick(1))]}};
    j["rot2d"] = {{"index", pick(2)}, {"degrees", spec.rotations_deg[std::size_t(pick(2))]}};
  } else {
    j["shift"] = j["scale"] = j["rot2d"] = nullptr;
  }
  j["iterations"] = circuit.iterations();
  j["status"] = to_string(circuit.status());
  print(j);
  return 0;
}

int solve_ik(const std::string& skeleton_path, const std::string& chain_name, const std::string& target,
             const std::optional<std::string>& from, const std::optional<std::string>& obstacles_path,
             double rate, int max_iterations) {
  const auto model = kinematics::load_skeleton(skeleton_path);
  const auto& grid = model.grid();
  const int chain = model.chain_index(chain_name);
  const Voxel goal = parse_voxel(target);
  if (!grid.contains(goal)) throw ConfigError("target lies outside the skeleton grid");

  // Downstream chains start where their upstream chain ends in the canonical pose.
  Voxel start = model.root();
  if (from) {
    start = parse_voxel(*from);
  } else if (const int up = model.chain(std::size_t(chain)).upstream; up >= 0) {
    const auto pose = kinematics::forward_kinematics(model, kinematics::canonical_indices(model));
    start = pose.distal[std::size_t(model.chain(std::size_t(up)).segments.back())];
  }
  if (!grid.contains(start)) throw ConfigError("start lies outside the skeleton grid");

  std::vector<std::optional<MaskField>> masks;
  if (obstacles_path) {
    const auto mask = constraints::obstacle_mask(grid, constraints::load_obstacles(*obstacles_path));
    masks.assign(model.chain(std::size_t(chain)).segments.size(), mask);
  }
  CircuitParams params;
  params.max_iterations = max_iterations;
  params.record_history = false;
  const auto result = kinematics::solve_ik(model, chain, Field::impulse(grid, grid.key(start)),
                                           Field::impulse(grid, grid.key(goal)), masks, params, rate);
  print(pipeline::ik_json(model, chain, result));
  return 0;
}

// Panel 0: the input in grey under the re-rendered solution in red. Then one
// panel per requested view of the recovered skeleton.
std::string render_views(const pipeline::VisualSearch& search, const Field& input,
                         const pipeline::ReconstructionResult& result,
                         const std::vector<morph::ViewAngles>& views) {
  const auto& image = search.image();
  morph::PpmCanvas canvas(image.nx(), image.ny(), 4);
  canvas.paint(input, {110, 110, 110});
  const bool complete = result.joints && result.solution.variants.size() == result.solution.pose.size();
  if (complete) canvas.paint(pipeline::render_direct(search, result.solution), {230, 40, 40});
  std::vector<double> widths;
  for (std::size_t s = 0; complete && s < result.solution.pose.size(); ++s)
    widths.push_back(search.model().segment(s).base_width *
                     search.widths()[s].at(std::size_t(result.solution.variants[s])));
  for (const auto& view : views) {
    const int panel = canvas.add_panel();
    if (!complete) continue;
    const auto rotation = morph::make_view_rotation(search.model().grid(), view);
    std::vector<Voxel> a, b;
    std::vector<double> w;
    for (std::size_t s = 0; s < widths.size(); ++s) {
      const Voxel p = rotation.map_cell(result.joints->proximal[s]);
      const Voxel d = rotation.map_cell(result.joints->distal[s]);
      if (!search.model().grid().contains(p) || !search.model().grid().contains(d)) continue;
      a.push_back(p);
      b.push_back(d);
      w.push_back(widths[s]);
    }
    canvas.paint(morph::render_figure(image, a, b, w), {40, 200, 90}, panel);
  }
  return canvas.encode();
}

int reconstruct(const std::string& input_path, const std::string& config_path,
                const std::optional<std::string>& render_path, const std::optional<std::string>& views) {
  const auto config = pipeline::load_config(config_path);
  const pipeline::VisualSearch search(config);
  const auto input = visual::load_edge_map(input_path, {},
                                           visual::GridSize{search.image().nx(), search.image().ny()});
  const auto render_angles = views ? parse_views(*views) : search.views();
  const auto result = pipeline::reconstruct(input, config);
  if (render_path) visual::write_file(*render_path, render_views(search, input, result, render_angles));
  print(pipeline::result_json(search, result));
  return 0;
}

int oracle(const std::string& config_path, const std::string& input_path, std::optional<double> budget) {
  const auto config = pipeline::load_config(config_path);
  const pipeline::VisualSearch search(config);
  const auto input = visual::load_edge_map(input_path, {},
                                           visual::GridSize{search.image().nx(), search.image().ny()});
  print(pipeline::oracle_json(search,
                              pipeline::brute_force_oracle(search, input, budget.value_or(config.oracle_budget))));
  return 0;
}

int plant(const std::string& config_path, const std::optional<std::string>& indices,
          std::optional<std::uint64_t> seed, const std::string& out_path) {
  const auto config = pipeline::load_config(config_path);
  const pipeline::VisualSearch search(config);
  pipeline::PlantSpec spec;
  if (indices) {
    spec = pipeline::parse_plant_indices(search, *indices);
  } else {
    std::mt19937_64 rng(seed.value_or(config.seed));
    spec = pipeline::random_plant(search, rng);
  }
  visual::save_edge_map(out_path, pipeline::render_direct(search, spec));
  print(pipeline::plant_json(search, spec));
  return 0;
}

int fail(const std::exception& e, int code) {
  std::cerr << pipeline::error_json(e).dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map-seeking circuit solver"};
  app.require_subcommand(1);

  std::string input, pattern, config, skeleton, chain, target, out;
  std::optional<std::string> families, from, obstacles, render, views, indices;
  std::optional<double> budget;
  std::optional<std::uint64_t> seed;
  double rate = 0.1;
  int max_iterations = 200;

  auto* demo = app.add_subcommand("demo-visual", "Find the shift, scale and rotation taking a map onto a template");
  demo->add_option("--input", input, "Edge map (.pgm or .csv)")->required();
  demo->add_option("--template", pattern, "Template edge map")->required();
  demo->add_option("--families", families, "Visual family spec (JSON)");
  demo->add_option("--rate", rate, "Gain competition rate");

  auto* ik = app.add_subcommand("solve-ik", "Place a chain's end effector on a target voxel");
  ik->add_option("--skeleton", skeleton, "Skeleton file (JSON)")->required();
  ik->add_option("--chain", chain, "Chain name")->required();
  ik->add_option("--target", target, "Target voxel x,y,z")->required();
  ik->add_option("--from", from, "Start voxel x,y,z (default: the chain's canonical start)");
  ik->add_option("--obstacles", obstacles, "Obstacle boxes (JSON)");
  ik->add_option("--rate", rate, "Gain competition rate");
  ik->add_option("--max-iterations", max_iterations, "Iteration limit");

  auto* rec = app.add_subcommand("reconstruct", "Recover a posed figure from an edge map");
  rec->add_option("--input", input, "Edge map")->required();
  rec->add_option("--config", config, "Pipeline config (JSON)")->required();
  rec->add_option("--render", render, "Write a multi-view PPM of the solution");
  rec->add_option("--views", views, "Render views as az,el;az,el;...");

  auto* orc = app.add_subcommand("oracle", "Exhaustive argmax over the whole search space");
  orc->add_option("--config", config, "Pipeline config (JSON)")->required();
  orc->add_option("--input", input, "Edge map")->required();
  orc->add_option("--budget", budget, "Largest search product to enumerate");

  auto* pl = app.add_subcommand("plant", "Render a figure with known parameters");
  pl->add_option("--config", config, "Pipeline config (JSON)")->required();
  auto* idx = pl->add_option("--indices", indices, "shift,scale,rotation,view;variants...;orientations...");
  pl->add_option("--seed", seed, "Random plant seed (default: the config seed)")->excludes(idx);
  pl->add_option("--out", out, "Output edge map (.pgm or .csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ordered_json j;
    j["schema"] = pipeline::report_schema;
    j["error"] = {{"kind", "usage"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 2;
  }

  try {
    if (*demo) return demo_visual(input, pattern, families, rate);
    if (*ik) return solve_ik(skeleton, chain, target, from, obstacles, rate, max_iterations);
    if (*rec) return reconstruct(input, config, render, views);
    if (*orc) return oracle(config, input, budget);
    if (*pl) return plant(config, indices, seed, out);
  } catch (const std::exception& e) {
    return fail(e, 1);
  }
  return 1;
}

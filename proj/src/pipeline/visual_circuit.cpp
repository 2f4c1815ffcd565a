#include "msc/pipeline/visual_circuit.hpp"

#include "msc/core/errors.hpp"
#include "msc/morph/outline.hpp"
#include "msc/visual/plant.hpp"

namespace msc::pipeline {

VisualSearch::VisualSearch(const PipelineConfig& config)
    : config_(&config),
      model_(config.skeleton.get()),
      image_(config.image_space()),
      pairs_(Space::segment_pairs(config.model().grid().nx(), config.model().grid().ny(),
                                  config.model().grid().nz(),
                                  static_cast<int>(config.model().segments().size()))),
      planar_(visual::VisualFamilies::build(image_, config.visual)),
      widths_(config.morph.resolve(config.model())) {
  morph_ = morph::build_morph_family(*model_, image_, pairs_, widths_);
  view_ = morph::make_pair_view_family(pairs_, config.views);
  views_ = config.views.views();
  std::size_t offset = 0;
  for (const auto& w : widths_) {
    morph_offset_.push_back(offset);
    offset += w.size();
  }
}

std::size_t VisualSearch::morph_member(int segment, int variant) const {
  const auto s = static_cast<std::size_t>(segment);
  if (variant < 0 || static_cast<std::size_t>(variant) >= widths_.at(s).size())
    throw ContractError("morph variant out of range");
  return morph_offset_[s] + static_cast<std::size_t>(variant);
}

int VisualSearch::variant_of(std::size_t member) const {
  const auto s = static_cast<std::size_t>(morph_.group(member));
  return static_cast<int>(member - morph_offset_[s]);
}

std::vector<Stage> VisualSearch::stages() const {
  const auto& r = config_->msc.rates;
  std::vector<Stage> out;
  out.emplace_back(planar_.shift, r.shift);
  out.emplace_back(planar_.scale, r.scale);
  out.emplace_back(planar_.rotation, r.rotation);
  out.emplace_back(morph_, r.morph);
  out.emplace_back(view_, r.view);
  return out;
}

Circuit VisualSearch::circuit(Field input, Field top) const {
  return Circuit(stages(), std::move(input), std::move(top), config_->msc.circuit_params());
}

std::vector<std::size_t> VisualSearch::family_sizes() const {
  return {planar_.shift.size(), planar_.scale.size(), planar_.rotation.size(), morph_.size(),
          view_.size()};
}

Composition VisualSearch::composition_of(const PlantSpec& plant) const {
  Composition c(5);
  c[shift_stage] = {static_cast<int>(plant.visual.shift)};
  c[scale_stage] = {static_cast<int>(plant.visual.scale)};
  c[rotation_stage] = {static_cast<int>(plant.visual.rotation)};
  for (std::size_t s = 0; s < widths_.size(); ++s)
    c[morph_stage].push_back(
        static_cast<int>(morph_member(static_cast<int>(s), plant.variants.at(s))));
  c[view_stage] = {static_cast<int>(plant.view)};
  return c;
}

PlantSpec VisualSearch::plant_of(const Composition& c) const {
  PlantSpec p;
  auto pick = [](int v) {
    if (v < 0) throw ContractError("composition has an unresolved group");
    return static_cast<std::size_t>(v);
  };
  p.visual = {pick(c.at(shift_stage).at(0)), pick(c.at(scale_stage).at(0)),
              pick(c.at(rotation_stage).at(0))};
  p.view = pick(c.at(view_stage).at(0));
  for (int m : c.at(morph_stage)) p.variants.push_back(variant_of(pick(m)));
  return p;
}

Field pose_keys(const Space& pairs, const kinematics::PoseSolution& pose) {
  std::vector<Entry> e;
  for (std::size_t s = 0; s < pose.proximal.size(); ++s)
    e.push_back({pairs.pair_key(static_cast<int>(s), pose.proximal[s], pose.distal[s]), 1.0});
  return Field::from_entries(pairs, std::move(e));
}

Field render_plant(const VisualSearch& search, const PlantSpec& plant) {
  const auto pose = kinematics::forward_kinematics(search.model(), plant.pose);
  Field f = pose_keys(search.pairs(), pose);
  f = search.view()[plant.view].adjoint(f);
  FieldBuilder image(search.image());
  for (std::size_t s = 0; s < plant.variants.size(); ++s)
    image.add_field(
        search.morph()[search.morph_member(static_cast<int>(s), plant.variants[s])].adjoint(f));
  return visual::plant_visual_instance(image.build(), search.planar(), plant.visual);
}

Field render_direct(const VisualSearch& search, const PlantSpec& plant) {
  const auto& model = search.model();
  const auto pose = kinematics::forward_kinematics(model, plant.pose);
  const auto rotation = morph::make_view_rotation(model.grid(), search.views().at(plant.view));
  FieldBuilder image(search.image());
  for (std::size_t s = 0; s < pose.proximal.size(); ++s) {
    const Voxel a = rotation.map_cell(pose.proximal[s]);
    const Voxel b = rotation.map_cell(pose.distal[s]);
    if (!model.grid().contains(a) || !model.grid().contains(b)) continue;
    const double h = search.widths()[s].at(static_cast<std::size_t>(plant.variants.at(s))) *
                     model.segment(s).base_width;
    image.add_field(morph::morph_project_segment(search.image(), a, b, h));
  }
  return visual::plant_visual_instance(image.build(), search.planar(), plant.visual);
}

PlantSpec random_plant(const VisualSearch& search, std::mt19937_64& rng) {
  const auto& model = search.model();
  auto pick = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    PlantSpec p;
    p.visual = {pick(search.planar().shift.size()), pick(search.planar().scale.size()),
                pick(search.planar().rotation.size())};
    p.view = pick(search.views().size());
    for (const auto& w : search.widths()) p.variants.push_back(static_cast<int>(pick(w.size())));
    for (const auto& seg : model.segments())
      p.pose.push_back(static_cast<int>(pick(seg.orientations.size())));
    try {
      const auto pose = kinematics::forward_kinematics(model, p.pose);
      bool inside = true;
      for (const auto& v : search.views()) {
        const auto r = morph::make_view_rotation(model.grid(), v);
        for (std::size_t s = 0; s < pose.proximal.size() && inside; ++s)
          inside = model.grid().contains(r.map_cell(pose.proximal[s])) &&
                   model.grid().contains(r.map_cell(pose.distal[s]));
      }
      if (inside) return p;
    } catch (const OutOfBoundsError&) {
    }
  }
  throw ConfigError("could not place a random pose inside the grid");
}

}  // namespace msc::pipeline

#include "test_util.hpp"

#include "scalesift/scoring.hpp"

using namespace scalesift;

const DefaultSetup& default_setup() {
  static const DefaultSetup setup = [] {
    DefaultSetup s;
    s.world = std::make_shared<const World>(generate_world(WorldSpec::default_spec()));
    s.split = split_locations(*s.world, {0.5, 0.2, 0.3}, 7);
    TrainConfig cfg;
    cfg.seed = 7;
    for (const auto& c : s.world->spec.concepts) {
      cfg.seen_mask.push_back(c.seen);
      s.all_concepts.push_back(c.id);
    }
    s.seen = s.world->spec.seen_concepts();
    s.trained = train_kd(*s.world, ScoreProvider::synthetic_hr(s.world), s.split, cfg);
    s.model = std::make_shared<const KDModel>(s.trained.model);
    s.providers.lr = ScoreProvider::synthetic_lr(s.world);
    s.providers.hr = ScoreProvider::synthetic_hr(s.world);
    s.providers.kd = ScoreProvider::kd_model(s.model, s.world);
    return s;
  }();
  return setup;
}

#include "scalesift/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "scalesift/error.hpp"
#include "scalesift/rng.hpp"

namespace scalesift {
namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ValidationError("invalid world spec: " + field + " " + rule);
}

std::string location_name(std::size_t i, std::size_t n) {
  int width = 4;
  for (std::size_t m = n > 0 ? n - 1 : 0; m >= 10000; m /= 10) ++width;
  std::string digits = std::to_string(i);
  if (digits.size() < static_cast<std::size_t>(width))
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return "L" + digits;
}

// P(y=1 | host present) and P(y=1 | host absent) such that the marginal
// stays at the concept's prevalence.
std::pair<double, double> hosted_rates(double p, double p_host, double coupling) {
  double present = p + coupling * (1.0 - p);
  present = std::min(present, p / p_host);
  double absent = (p - p_host * present) / (1.0 - p_host);
  return {present, std::max(absent, 0.0)};
}

}  // namespace

void WorldSpec::validate() const {
  require(num_locations >= 1, "num_locations", "must be >= 1");
  require(tiles_per_location >= 1, "tiles_per_location", "must be >= 1");
  require(feature_dim >= 1, "feature_dim", "must be >= 1");
  require(lr_noise_fine >= 0.0 && std::isfinite(lr_noise_fine), "lr_noise_fine", "must be >= 0");
  require(hr_noise_coarse >= 0.0 && std::isfinite(hr_noise_coarse), "hr_noise_coarse",
          "must be >= 0");
  require(scale_threshold > 0.0 && scale_threshold <= 1.0, "scale_threshold", "must be in (0,1]");
  require(context_coupling >= 0.0 && context_coupling <= 1.0, "context_coupling",
          "must be in [0,1]");
  std::vector<std::string> ids;
  bool any_seen = false, any_unseen = false;
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    const auto& cs = concepts[c];
    std::string where = "concepts[" + std::to_string(c) + "]";
    require(!cs.id.empty(), where + ".id", "must be nonempty");
    require(cs.id.find_first_of(",\n\r\"") == std::string::npos, where + ".id",
            "must not contain commas, quotes or newlines");
    require(cs.scale > 0.0 && cs.scale <= 1.0, where + ".scale", "must be in (0,1]");
    require(cs.prevalence > 0.0 && cs.prevalence < 1.0, where + ".prevalence",
            "must be in (0,1)");
    require(std::find(ids.begin(), ids.end(), cs.id) == ids.end(), where + ".id",
            "duplicates '" + cs.id + "'");
    ids.push_back(cs.id);
    any_seen |= cs.seen;
    any_unseen |= !cs.seen;
  }
  if (concepts.size() >= 2) {
    require(any_seen && any_unseen, "concepts",
            "must contain at least one seen and one unseen concept");
  }
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    const auto& cs = concepts[c];
    if (!cs.host) continue;
    std::string where = "concepts[" + std::to_string(c) + "].host";
    auto it = std::find(ids.begin(), ids.end(), *cs.host);
    require(it != ids.end(), where, "names unknown concept '" + *cs.host + "'");
    require(*cs.host != cs.id, where, "must not be the concept itself");
    const auto& host = concepts[static_cast<std::size_t>(it - ids.begin())];
    require(!host.host, where, "must name a concept without a host");
  }
}

int WorldSpec::positive_tiles(std::size_t concept_index) const {
  double exact = concepts[concept_index].scale * tiles_per_location;
  // Guard against 0.5 * 4 landing at 2.0000000000000004.
  int n = static_cast<int>(std::ceil(exact - 1e-9));
  return std::clamp(n, 1, tiles_per_location);
}

std::vector<std::string> WorldSpec::concept_ids() const {
  std::vector<std::string> out;
  for (const auto& c : concepts) out.push_back(c.id);
  return out;
}

std::vector<std::string> WorldSpec::seen_concepts() const {
  std::vector<std::string> out;
  for (const auto& c : concepts)
    if (c.seen) out.push_back(c.id);
  return out;
}

std::vector<std::string> WorldSpec::unseen_concepts() const {
  std::vector<std::string> out;
  for (const auto& c : concepts)
    if (!c.seen) out.push_back(c.id);
  return out;
}

WorldSpec WorldSpec::default_spec() {
  WorldSpec spec;
  // Small facilities sit inside residential areas and parks; those two
  // context concepts are held out, so the distilled model has to learn the
  // co-occurrence from LR features alone.
  const char* fine[] = {"tennis", "swimming", "skate", "garage", "soccer", "roundabout"};
  const char* fine_host[] = {"park", "residential", "park", "residential", "park", "residential"};
  const char* coarse[] = {"forest", "farmland", "lake", "wetland", "residential", "park"};
  for (int i = 0; i < 6; ++i) {
    spec.concepts.push_back({fine[i], 0.06, 0.3, i < 4, std::string(fine_host[i])});
  }
  for (int i = 0; i < 6; ++i) {
    spec.concepts.push_back({coarse[i], 0.9, 0.3, i < 4, std::nullopt});
  }
  return spec;
}

std::size_t World::location_index(const std::string& id) const { return location_index_.require(id); }
std::size_t World::concept_index(const std::string& id) const { return concept_index_.require(id); }

void World::build_indices() {
  location_index_ = IdIndex(location_ids, "location");
  concept_index_ = IdIndex(spec.concept_ids(), "concept");
}

LabelTable World::label_table(const std::vector<std::string>& concepts,
                              const std::vector<std::string>& locations) const {
  std::vector<std::size_t> cs, ls;
  for (const auto& c : concepts) cs.push_back(concept_index(c));
  for (const auto& l : locations) ls.push_back(location_index(l));
  std::vector<std::uint8_t> values;
  values.reserve(cs.size() * ls.size());
  for (auto c : cs)
    for (auto l : ls) values.push_back(label(l, c) ? 1 : 0);
  return LabelTable(concepts, locations, std::move(values));
}

Eigen::MatrixXd World::feature_matrix(const std::vector<std::string>& locations) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(locations.size()),
                    static_cast<Eigen::Index>(feature_dim()));
  for (std::size_t r = 0; r < locations.size(); ++r) {
    auto f = features(location_index(locations[r]));
    for (std::size_t k = 0; k < f.size(); ++k) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = f[k];
  }
  return x;
}

bool World::operator==(const World& other) const {
  return to_json(spec) == to_json(other.spec) && location_ids == other.location_ids &&
         labels == other.labels && tile_truths == other.tile_truths &&
         lr_features == other.lr_features && aux_weights == other.aux_weights;
}

Eigen::MatrixXd mixing_matrix(const WorldSpec& spec) {
  auto d = static_cast<Eigen::Index>(spec.feature_dim);
  auto m = static_cast<Eigen::Index>(spec.concepts.size());
  Eigen::MatrixXd a(d, m);
  Engine eng = stream_engine(spec.seed, "mixing");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < m; ++c) a(r, c) = normal(eng);
  return a;
}

World generate_world(const WorldSpec& spec) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(spec.num_locations);
  const std::size_t m = spec.concepts.size();
  const std::size_t k = static_cast<std::size_t>(spec.tiles_per_location);
  const std::size_t d = static_cast<std::size_t>(spec.feature_dim);

  World w;
  w.spec = spec;
  w.location_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.location_ids.push_back(location_name(i, n));
  w.labels.assign(n * m, 0);
  w.tile_truths.assign(n * m * k, 0);
  w.lr_features.assign(n * d, 0.0);
  w.aux_weights.assign(n, 0.0);
  w.build_indices();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // (1) labels: independent concepts first, then hosted ones conditioned on
  // their host. Each concept owns its own stream.
  auto draw_labels = [&](std::size_t c) {
    const auto& cs = spec.concepts[c];
    Engine eng = stream_engine(spec.seed, "labels", c);
    if (!cs.host) {
      for (std::size_t i = 0; i < n; ++i) w.labels[i * m + c] = unit(eng) < cs.prevalence;
      return;
    }
    std::size_t h = w.concept_index(*cs.host);
    auto [present, absent] =
        hosted_rates(cs.prevalence, spec.concepts[h].prevalence, spec.context_coupling);
    for (std::size_t i = 0; i < n; ++i) {
      double p = w.labels[i * m + h] ? present : absent;
      w.labels[i * m + c] = unit(eng) < p;
    }
  };
  for (std::size_t c = 0; c < m; ++c)
    if (!spec.concepts[c].host) draw_labels(c);
  for (std::size_t c = 0; c < m; ++c)
    if (spec.concepts[c].host) draw_labels(c);

  // (2) tiles: ceil(scale*K) distinct tiles per positive (concept, location).
  std::vector<std::size_t> slots(k);
  for (std::size_t c = 0; c < m; ++c) {
    Engine eng = stream_engine(spec.seed, "tiles", c);
    std::size_t npos = static_cast<std::size_t>(spec.positive_tiles(c));
    for (std::size_t i = 0; i < n; ++i) {
      if (!w.labels[i * m + c]) continue;
      std::iota(slots.begin(), slots.end(), std::size_t{0});
      for (std::size_t s = 0; s < npos; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, k - 1);
        std::swap(slots[s], slots[pick(eng)]);
        w.tile_truths[(i * m + c) * k + slots[s]] = 1;
      }
    }
  }

  // (3) LR features x = A * y_masked + noise. Fine concepts lose half their
  // LR evidence through an independent Bernoulli(0.5) mask.
  Eigen::MatrixXd a = mixing_matrix(spec);
  Eigen::MatrixXd masked(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < m; ++c) {
    bool fine = spec.is_fine(c);
    Engine eng = stream_engine(spec.seed, "mask", c);
    std::bernoulli_distribution keep(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      double y = w.labels[i * m + c];
      if (fine && !keep(eng)) y = 0.0;
      masked(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = y;
    }
  }
  Eigen::MatrixXd x = a * masked;  // d x N
  Engine noise_eng = stream_engine(spec.seed, "lr-noise");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < d; ++r)
      w.lr_features[i * d + r] = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) +
                                 spec.lr_noise_fine * normal(noise_eng);

  // (4) auxiliary (night-lights style) weights.
  Engine aux_eng = stream_engine(spec.seed, "aux");
  for (std::size_t i = 0; i < n; ++i) {
    double count = 0.0;
    for (std::size_t c = 0; c < m; ++c) count += w.labels[i * m + c];
    w.aux_weights[i] = count + std::abs(normal(aux_eng));
  }
  return w;
}

Split split_locations(const World& world, std::array<double, 3> fractions, std::uint64_t seed) {
  const char* names[] = {"train", "val", "test"};
  double sum = 0.0;
  for (int s = 0; s < 3; ++s) {
    if (!(fractions[s] > 0.0))
      throw ValidationError(std::string("split fraction '") + names[s] + "' must be > 0");
    sum += fractions[s];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split fractions must sum to 1");

  const auto n = static_cast<long>(world.num_locations());
  long n_val = std::lround(fractions[1] * static_cast<double>(n));
  long n_test = std::lround(fractions[2] * static_cast<double>(n));
  long n_train = n - n_val - n_test;
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw ValidationError("split leaves an empty partition for " + std::to_string(n) +
                          " locations");

  std::vector<std::string> ids = world.location_ids;
  Engine eng = stream_engine(seed, "split");
  std::shuffle(ids.begin(), ids.end(), eng);
  Split out;
  out.train.assign(ids.begin(), ids.begin() + n_train);
  out.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  out.test.assign(ids.begin() + n_train + n_val, ids.end());
  return out;
}

Json to_json(const ConceptSpec& c) {
  Json j{{"id", c.id}, {"scale", c.scale}, {"prevalence", c.prevalence}, {"seen", c.seen}};
  if (c.host) j["host"] = *c.host;
  return j;
}

Json to_json(const WorldSpec& spec) {
  Json concepts = Json::array();
  for (const auto& c : spec.concepts) concepts.push_back(to_json(c));
  return Json{{"num_locations", spec.num_locations},
              {"tiles_per_location", spec.tiles_per_location},
              {"concepts", concepts},
              {"feature_dim", spec.feature_dim},
              {"lr_noise_fine", spec.lr_noise_fine},
              {"hr_noise_coarse", spec.hr_noise_coarse},
              {"scale_threshold", spec.scale_threshold},
              {"context_coupling", spec.context_coupling},
              {"seed", spec.seed}};
}

Json to_json(const World& world) {
  const std::size_t n = world.num_locations(), m = world.num_concepts(), k = world.num_tiles(),
                    d = world.feature_dim();
  Json labels = Json::array(), tiles = Json::array(), feats = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json lrow = Json::array(), trow = Json::array(), frow = Json::array();
    for (std::size_t c = 0; c < m; ++c) {
      lrow.push_back(world.label(i, c) ? 1 : 0);
      Json t = Json::array();
      for (std::size_t j = 0; j < k; ++j) t.push_back(world.tile(i, c, j) ? 1 : 0);
      trow.push_back(std::move(t));
    }
    for (std::size_t r = 0; r < d; ++r) frow.push_back(world.lr_features[i * d + r]);
    labels.push_back(std::move(lrow));
    tiles.push_back(std::move(trow));
    feats.push_back(std::move(frow));
  }
  Json aux = Json::array();
  for (double v : world.aux_weights) aux.push_back(v);
  return Json{{"spec", to_json(world.spec)},   {"location_ids", world.location_ids},
              {"labels", labels},              {"tile_truths", tiles},
              {"lr_features", feats},          {"aux_weights", aux}};
}

Json to_json(const Split& split) {
  return Json{{"train", split.train}, {"val", split.val}, {"test", split.test}};
}

ConceptSpec concept_spec_from_json(const Json& doc, const std::string& path) {
  JsonObjectReader r(doc, path);
  ConceptSpec c;
  c.id = r.get<std::string>("id");
  c.scale = r.get<double>("scale");
  c.prevalence = r.get<double>("prevalence");
  c.seen = r.get_or<bool>("seen", true);
  if (const Json* h = r.optional("host"); h && !h->is_null())
    c.host = JsonObjectReader::convert<std::string>(*h, r.path_of("host"));
  r.finish();
  return c;
}

namespace {

WorldSpec world_spec_from_reader(JsonObjectReader& r) {
  WorldSpec spec;
  spec.concepts.clear();
  spec.num_locations = r.get_or<int>("num_locations", spec.num_locations);
  spec.tiles_per_location = r.get_or<int>("tiles_per_location", spec.tiles_per_location);
  spec.feature_dim = r.get_or<int>("feature_dim", spec.feature_dim);
  spec.lr_noise_fine = r.get_or<double>("lr_noise_fine", spec.lr_noise_fine);
  spec.hr_noise_coarse = r.get_or<double>("hr_noise_coarse", spec.hr_noise_coarse);
  spec.scale_threshold = r.get_or<double>("scale_threshold", spec.scale_threshold);
  spec.context_coupling = r.get_or<double>("context_coupling", spec.context_coupling);
  spec.seed = r.get_or<std::uint64_t>("seed", spec.seed);
  if (const Json* cs = r.optional("concepts")) {
    if (!cs->is_array()) throw_type_error(r.path_of("concepts"), "array");
    for (std::size_t i = 0; i < cs->size(); ++i) {
      std::string path = r.path_of("concepts") + "[" + std::to_string(i) + "]";
      spec.concepts.push_back(concept_spec_from_json((*cs)[i], path));
    }
  } else {
    spec.concepts = WorldSpec::default_spec().concepts;
  }
  r.finish();
  return spec;
}

}  // namespace

WorldSpec world_spec_from_json(const Json& doc, const std::string& path) {
  JsonObjectReader r(doc, path);
  return world_spec_from_reader(r);
}

World world_from_json(const Json& doc) {
  JsonObjectReader r(doc, "$");
  World w;
  {
    JsonObjectReader sr(r.required("spec"), "$.spec");
    w.spec = world_spec_from_reader(sr);
  }
  w.spec.validate();
  const std::size_t m = w.spec.concepts.size(), k = w.num_tiles(), d = w.feature_dim();
  w.location_ids = r.required("location_ids").get<std::vector<std::string>>();
  const std::size_t n = w.location_ids.size();
  if (n != static_cast<std::size_t>(w.spec.num_locations))
    throw ValidationError("world: location_ids length does not match spec.num_locations");
  const Json& labels = r.required("labels");
  const Json& tiles = r.required("tile_truths");
  const Json& feats = r.required("lr_features");
  const Json& aux = r.required("aux_weights");
  r.finish();
  if (labels.size() != n || tiles.size() != n || feats.size() != n || aux.size() != n)
    throw ValidationError("world: per-location arrays must have num_locations rows");
  w.labels.assign(n * m, 0);
  w.tile_truths.assign(n * m * k, 0);
  w.lr_features.assign(n * d, 0.0);
  w.aux_weights.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i].size() != m || tiles[i].size() != m || feats[i].size() != d)
      throw ValidationError("world: row " + std::to_string(i) + " has the wrong width");
    for (std::size_t c = 0; c < m; ++c) {
      w.labels[i * m + c] = labels[i][c].get<int>() != 0;
      if (tiles[i][c].size() != k)
        throw ValidationError("world: tile_truths row has the wrong width");
      for (std::size_t j = 0; j < k; ++j)
        w.tile_truths[(i * m + c) * k + j] = tiles[i][c][j].get<int>() != 0;
    }
    for (std::size_t r2 = 0; r2 < d; ++r2) w.lr_features[i * d + r2] = feats[i][r2].get<double>();
    w.aux_weights[i] = aux[i].get<double>();
    if (w.aux_weights[i] < 0.0) throw ValidationError("world: aux_weights must be >= 0");
  }
  w.build_indices();
  return w;
}

}  // namespace scalesift

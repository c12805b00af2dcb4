#include "scalesift/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalesift/distill.hpp"
#include "scalesift/error.hpp"
#include "scalesift/json_io.hpp"
#include "scalesift/rng.hpp"

namespace scalesift {

const char* to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::SyntheticLR: return "synthetic-lr";
    case ProviderKind::SyntheticHR: return "synthetic-hr";
    case ProviderKind::Cached: return "cached";
    case ProviderKind::KDModel: return "kd-model";
  }
  return "?";
}

ProviderKind provider_kind_from_string(const std::string& name) {
  if (name == "synthetic-lr") return ProviderKind::SyntheticLR;
  if (name == "synthetic-hr") return ProviderKind::SyntheticHR;
  if (name == "cached") return ProviderKind::Cached;
  if (name == "kd-model") return ProviderKind::KDModel;
  throw ValidationError("unknown provider kind: " + name);
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void ScoreCache::insert(const std::string& location, const std::string& concept_id, double score,
                        std::size_t line) {
  if (!(score >= 0.0 && score <= 1.0)) {
    std::ostringstream msg;
    msg << "score " << format_real(score) << " for (" << location << ", " << concept_id
        << ") violates the [0,1] range";
    throw ParseError(msg.str(), line);
  }
  if (!cells_.emplace(std::make_pair(location, concept_id), score).second)
    throw ParseError("duplicate cell (" + location + ", " + concept_id + ")", line);
  if (seen_locations_.emplace(location, true).second) locations_.push_back(location);
  if (seen_concepts_.emplace(concept_id, true).second) concepts_.push_back(concept_id);
}

std::optional<double> ScoreCache::find(const std::string& location,
                                       const std::string& concept_id) const {
  auto it = cells_.find({location, concept_id});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

ScoreTable ScoreCache::to_table() const {
  std::vector<double> values;
  values.reserve(concepts_.size() * locations_.size());
  for (const auto& c : concepts_)
    for (const auto& l : locations_) {
      auto v = find(l, c);
      if (!v) throw NotFoundError("score cache has no cell for (" + l + ", " + c + ")");
      values.push_back(*v);
    }
  return ScoreTable(concepts_, locations_, std::move(values));
}

ScoreProvider ScoreProvider::synthetic_lr(std::shared_ptr<const World> world, double steepness) {
  if (!world) throw ValidationError("synthetic-lr provider needs a world");
  ScoreProvider p;
  p.kind_ = ProviderKind::SyntheticLR;
  p.steepness_ = steepness;
  Eigen::MatrixXd a = mixing_matrix(world->spec);
  p.pinv_ = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).pseudoInverse();
  p.world_ = std::move(world);
  return p;
}

ScoreProvider ScoreProvider::synthetic_hr(std::shared_ptr<const World> world, double steepness) {
  if (!world) throw ValidationError("synthetic-hr provider needs a world");
  ScoreProvider p;
  p.kind_ = ProviderKind::SyntheticHR;
  p.steepness_ = steepness;
  p.world_ = std::move(world);
  return p;
}

ScoreProvider ScoreProvider::cached(std::shared_ptr<const ScoreCache> cache) {
  if (!cache) throw ValidationError("cached provider needs a cache");
  ScoreProvider p;
  p.kind_ = ProviderKind::Cached;
  p.cache_ = std::move(cache);
  return p;
}

ScoreProvider ScoreProvider::cached(const std::filesystem::path& path) {
  return cached(std::make_shared<const ScoreCache>(read_score_cache(path)));
}

ScoreProvider ScoreProvider::kd_model(std::shared_ptr<const KDModel> model,
                                      std::shared_ptr<const World> world) {
  if (!model || !world) throw ValidationError("kd-model provider needs a model and a world");
  if (model->params.feature_dim() != static_cast<Eigen::Index>(world->feature_dim()))
    throw ValidationError("kd-model feature_dim does not match the world");
  ScoreProvider p;
  p.kind_ = ProviderKind::KDModel;
  p.model_ = std::move(model);
  p.world_ = std::move(world);
  return p;
}

namespace {

ScoreTable from_cache(const ScoreProvider& provider, const std::vector<std::string>& locations,
                      const std::vector<std::string>& concepts) {
  const ScoreCache& cache = *provider.cache();
  ScoreTable out(concepts, locations);
  for (std::size_t c = 0; c < concepts.size(); ++c)
    for (std::size_t l = 0; l < locations.size(); ++l) {
      auto v = cache.find(locations[l], concepts[c]);
      if (!v)
        throw NotFoundError("score cache has no cell for (" + locations[l] + ", " + concepts[c] +
                            ")");
      out.set(c, l, *v);
    }
  provider.count(locations.size());
  return out;
}

}  // namespace

ScoreTable score_lr(const ScoreProvider& provider, const std::vector<std::string>& locations,
                    const std::vector<std::string>& concepts) {
  switch (provider.kind()) {
    case ProviderKind::Cached:
      return from_cache(provider, locations, concepts);
    case ProviderKind::SyntheticLR: {
      const World& w = *provider.world();
      std::vector<std::size_t> cs;
      for (const auto& c : concepts) cs.push_back(w.concept_index(c));
      ScoreTable out(concepts, locations);
      const double beta = provider.steepness();
      for (std::size_t l = 0; l < locations.size(); ++l) {
        auto f = w.features(w.location_index(locations[l]));
        Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
        // Least-squares reconstruction of the (masked) label vector.
        Eigen::VectorXd u = provider.pseudo_inverse() * x;
        for (std::size_t c = 0; c < cs.size(); ++c) {
          double s = logistic(beta * (u(static_cast<Eigen::Index>(cs[c])) - 0.5));
          out.set(c, l, std::clamp(s, 0.0, 1.0));
        }
      }
      provider.count(locations.size());
      return out;
    }
    case ProviderKind::KDModel: {
      const World& w = *provider.world();
      const KDModel& model = *provider.model();
      ScoreTable full = kd_predict(model, w.feature_matrix(locations), locations);
      provider.count(locations.size());
      return full.select(concepts, locations);
    }
    case ProviderKind::SyntheticHR:
      break;
  }
  throw ValidationError("score_lr: provider kind synthetic-hr scores tiles, not locations");
}

TileScores score_hr_tiles(const ScoreProvider& provider, const std::string& location,
                          const std::vector<std::string>& concepts) {
  if (provider.kind() != ProviderKind::SyntheticHR)
    throw ValidationError(std::string("score_hr_tiles: provider kind ") + to_string(provider.kind()) +
                          " does not score tiles");
  const World& w = *provider.world();
  const std::size_t loc = w.location_index(location);
  std::vector<std::size_t> cs;
  for (const auto& c : concepts) cs.push_back(w.concept_index(c));
  const double beta = provider.steepness();
  const double sigma = w.spec.hr_noise_coarse;
  TileScores tiles(w.num_tiles(), std::vector<double>(cs.size()));
  for (std::size_t j = 0; j < w.num_tiles(); ++j) {
    for (std::size_t c = 0; c < cs.size(); ++c) {
      double t = w.tile(loc, cs[c], j) ? 1.0 : 0.0;
      double s = logistic(beta * (t - 0.5));
      if (!w.spec.is_fine(cs[c]) && sigma > 0.0) {
        // Coarse concepts lose context at HR. The noise stream is keyed by
        // (seed, concept, location, tile) so rescoring is order-independent.
        Engine eng = stream_engine(w.spec.seed, "hr-noise", cs[c], loc, j);
        std::normal_distribution<double> normal(0.0, sigma);
        s += normal(eng);
      }
      tiles[j][c] = std::clamp(s, 0.0, 1.0);
    }
  }
  return tiles;
}

std::vector<double> aggregate_hr(const TileScores& tiles) {
  if (tiles.empty()) throw ValidationError("aggregate_hr: a location needs at least one tile");
  std::vector<double> out = tiles.front();
  for (std::size_t j = 1; j < tiles.size(); ++j) {
    if (tiles[j].size() != out.size())
      throw ValidationError("aggregate_hr: tiles disagree on the number of concepts");
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(out[c], tiles[j][c]);
  }
  for (double v : out)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("aggregate_hr: tile score outside [0,1]");
  return out;
}

ScoreTable score_hr(const ScoreProvider& provider, const std::vector<std::string>& locations,
                    const std::vector<std::string>& concepts) {
  if (provider.kind() == ProviderKind::Cached) return from_cache(provider, locations, concepts);
  if (provider.kind() != ProviderKind::SyntheticHR)
    throw ValidationError(std::string("score_hr: provider kind ") + to_string(provider.kind()) +
                          " is not an HR provider");
  ScoreTable out(concepts, locations);
  for (std::size_t l = 0; l < locations.size(); ++l) {
    auto agg = aggregate_hr(score_hr_tiles(provider, locations[l], concepts));
    for (std::size_t c = 0; c < concepts.size(); ++c) out.set(c, l, agg[c]);
  }
  provider.count(locations.size());
  return out;
}

std::string score_cache_csv(const ScoreTable& table) {
  std::string out = "location_id,concept_id,score\n";
  for (std::size_t c = 0; c < table.num_concepts(); ++c)
    for (std::size_t l = 0; l < table.num_locations(); ++l) {
      out += table.locations()[l];
      out += ',';
      out += table.concepts()[c];
      out += ',';
      out += format_real(table.at(c, l));
      out += '\n';
    }
  return out;
}

void write_score_cache(const ScoreTable& table, const std::filesystem::path& path) {
  write_text_file(path, score_cache_csv(table));
}

ScoreCache parse_score_cache(const std::string& text) {
  ScoreCache cache;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') throw ParseError("CRLF line ending", line_no);
    if (header) {
      if (line != "location_id,concept_id,score")
        throw ParseError("expected header 'location_id,concept_id,score'", line_no);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty id", line_no);
    cache.insert(fields[0], fields[1], parse_real(fields[2], line_no), line_no);
  }
  if (header) throw ParseError("missing header", 1);
  return cache;
}

ScoreCache read_score_cache(const std::filesystem::path& path) {
  try {
    return parse_score_cache(read_text_file(path));
  } catch (const ParseError& e) {
    throw e.with_context(path.string());
  }
}

ScoreTable score_cache_roundtrip(const ScoreTable& table, const std::filesystem::path& path) {
  write_score_cache(table, path);
  return read_score_cache(path).to_table();
}

}  // namespace scalesift

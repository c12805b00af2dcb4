#include "scalesift/commands.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"
#include "scalesift/sweep.hpp"

#ifndef SCALESIFT_VERSION
#define SCALESIFT_VERSION "0.0.0"
#endif

namespace scalesift {
namespace {

ScoreProvider make_provider(const ProviderConfig& p, const std::shared_ptr<const World>& world) {
  switch (p.kind) {
    case ProviderKind::SyntheticLR: return ScoreProvider::synthetic_lr(world, p.steepness);
    case ProviderKind::SyntheticHR: return ScoreProvider::synthetic_hr(world, p.steepness);
    case ProviderKind::Cached: return ScoreProvider::cached(p.path);
    case ProviderKind::KDModel: break;
  }
  throw ConfigError("kd-model cannot be configured as an LR/HR provider");
}

}  // namespace

Experiment Experiment::prepare(const RunConfig& config) {
  Experiment e;
  e.config = config;
  if (config.world) {
    e.world = std::make_shared<const World>(generate_world(*config.world));
  } else {
    e.world = std::make_shared<const World>(world_from_json(parse_json_file(*config.world_file)));
  }
  e.split = split_locations(*e.world, config.split_fractions, config.split_seed);
  e.concepts = e.world->spec.concept_ids();
  e.seen = e.world->spec.seen_concepts();
  e.query = config.query_concepts.empty() ? e.concepts : config.query_concepts;
  for (const auto& q : e.query) e.world->concept_index(q);
  e.providers.lr = make_provider(config.lr, e.world);
  e.providers.hr = make_provider(config.hr, e.world);
  for (std::size_t i = 0; i < e.world->num_locations(); ++i)
    e.providers.aux_weights[e.world->location_ids[i]] = e.world->aux_weights[i];
  return e;
}

TrainConfig Experiment::train_config() const {
  TrainConfig t = config.train;
  t.seen_mask.clear();
  for (const auto& c : world->spec.concepts) t.seen_mask.push_back(c.seen);
  return t;
}

TrainResult Experiment::train() {
  TrainResult r = train_kd(*world, providers.hr, split, train_config());
  attach_kd(r.model);
  return r;
}

void Experiment::attach_kd(KDModel model) {
  if (model.params.feature_dim() != static_cast<Eigen::Index>(world->feature_dim()) ||
      model.concepts != concepts)
    throw ConfigError("kd model does not match the world (feature_dim or concepts differ); "
                      "rerun distill");
  kd = std::make_shared<const KDModel>(std::move(model));
  providers.kd = ScoreProvider::kd_model(kd, world);
}

ModalitySelector Experiment::selector(const LLMClient* llm) const {
  ModalitySelector s;
  s.strategy = config.modality;
  s.k = config.k;
  s.llm = llm;
  s.area_threshold_m2 = config.area_threshold_m2;
  for (const auto& c : world->spec.concepts)
    s.mean_area_m2[c.id] = c.scale * config.budget.area_per_location * 1.0e6;
  if (s.strategy == ModalityStrategy::Oracle || s.strategy == ModalityStrategy::LLM) {
    const auto& oracle_concepts = s.strategy == ModalityStrategy::Oracle ? query : seen;
    s.val_hr = score_hr(providers.hr, split.val, oracle_concepts);
    s.val_lr = score_lr(providers.lr, split.val, oracle_concepts);
    s.val_labels = world->label_table(oracle_concepts, split.val);
  }
  return s;
}

PlanRequest Experiment::plan_request(const ModalitySelector& selector) const {
  PlanRequest r;
  r.query = query;
  r.seen = seen;
  r.candidates = split.test;
  r.modality = selector;
  r.sampler = config.sampler;
  r.budget = config.budget;
  r.seed = config.seed;
  return r;
}

LabelTable Experiment::test_labels() const { return world->label_table(concepts, split.test); }

int Experiment::default_precision_k() const {
  return std::max(1, static_cast<int>(split.test.size() / 10));
}

LabelTable parse_label_csv(const std::string& text) {
  std::map<std::pair<std::string, std::string>, std::uint8_t> cells;
  std::vector<std::string> concepts, locations;
  std::set<std::string> seen_c, seen_l;
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (header) {
      if (line != "location_id,concept_id,label")
        throw ParseError("expected header 'location_id,concept_id,label'", line_no);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
    if (f[2] != "0" && f[2] != "1") throw ParseError("label must be 0 or 1", line_no);
    if (!cells.emplace(std::make_pair(f[0], f[1]), f[2] == "1").second)
      throw ParseError("duplicate cell (" + f[0] + ", " + f[1] + ")", line_no);
    if (seen_l.insert(f[0]).second) locations.push_back(f[0]);
    if (seen_c.insert(f[1]).second) concepts.push_back(f[1]);
  }
  if (header) throw ParseError("missing header", 1);
  std::vector<std::uint8_t> values;
  for (const auto& c : concepts)
    for (const auto& l : locations) {
      auto it = cells.find({l, c});
      if (it == cells.end()) throw NotFoundError("label file has no cell for (" + l + ", " + c + ")");
      values.push_back(it->second);
    }
  return LabelTable(concepts, locations, std::move(values));
}

namespace {

namespace fs = std::filesystem;

struct Stage {
  const RunConfig& config;
  fs::path out;
  std::vector<fs::path> written;

  void text(const fs::path& rel, const std::string& body) {
    write_text_file(out / rel, body);
    written.push_back(rel);
  }
  void json(const fs::path& rel, const Json& doc) { text(rel, dump_json(doc)); }
};

void load_kd(Experiment& e, const fs::path& out) {
  fs::path path = out / "kd_model.json";
  if (!fs::exists(path))
    throw MissingArtifactError("missing artifact " + path.string() + "; run 'distill' first",
                               path.string());
  e.attach_kd(kd_model_from_json(parse_json_file(path)));
}

bool needs_kd(const RunConfig& c) { return c.modality != ModalityStrategy::AlwaysLR; }

std::unique_ptr<LLMClient> make_llm(const RunConfig& c) {
  if (c.modality != ModalityStrategy::LLM) return nullptr;
  return std::make_unique<LLMClient>(*c.llm);
}

std::string loss_history_csv(const std::vector<double>& history) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out += std::to_string(i) + ',' + format_real(history[i]) + '\n';
  return out;
}

EvalReport evaluate(const ScoreTable& scores, const LabelTable& labels, const RunConfig& c,
                    int default_precision_k) {
  std::vector<int> cuts = c.precision_k.empty() ? std::vector<int>{default_precision_k} : c.precision_k;
  return map_at_k(scores, labels, c.k, cuts);
}

std::vector<long> default_sweep(std::size_t n) {
  std::vector<long> b;
  long step = std::max<long>(1, static_cast<long>(n) / 10);
  for (long v = 0; v < static_cast<long>(n); v += step) b.push_back(v);
  b.push_back(static_cast<long>(n));
  return b;
}

}  // namespace

std::vector<fs::path> run_command(const std::string& subcommand, const RunConfig& config,
                                  const CommandOptions& options) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
    throw ValidationError("unknown subcommand: " + subcommand);
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.started_at = utc_timestamp();
  manifest.version = SCALESIFT_VERSION;
  manifest.config = to_json(config);
  manifest.seeds = {{"run", config.seed},
                    {"world", config.world ? Json(config.world->seed) : Json(nullptr)},
                    {"split", config.split_seed},
                    {"train", config.train.seed}};

  Stage st{config, config.output_dir, {}};
  fs::create_directories(st.out);

  if (subcommand == "eval") {
    fs::path scores_path = options.scores ? *options.scores : st.out / "scores_final.csv";
    if (!fs::exists(scores_path))
      throw MissingArtifactError("missing artifact " + scores_path.string() + "; run 'run' first",
                                 scores_path.string());
    ScoreTable scores = read_score_cache(scores_path).to_table();
    LabelTable labels;
    int default_k = std::max(1, static_cast<int>(scores.num_locations() / 10));
    if (options.labels) {
      labels = parse_label_csv(read_text_file(*options.labels));
    } else {
      World w = config.world ? generate_world(*config.world)
                             : world_from_json(parse_json_file(*config.world_file));
      labels = w.label_table(w.spec.concept_ids(), w.location_ids);
    }
    EvalReport report = evaluate(scores, labels, config, default_k);
    st.json("eval_report.json", to_json(report));
  } else {
    Experiment e = Experiment::prepare(config);
    if (subcommand == "generate") {
      st.json("world.json", to_json(*e.world));
      st.json("split.json", to_json(e.split));
    } else if (subcommand == "score") {
      const auto& locs = e.world->location_ids;
      write_score_cache(score_lr(e.providers.lr, locs, e.concepts), st.out / "scores_lr.csv");
      st.written.push_back("scores_lr.csv");
      write_score_cache(score_hr(e.providers.hr, locs, e.concepts), st.out / "scores_hr.csv");
      st.written.push_back("scores_hr.csv");
    } else if (subcommand == "distill") {
      TrainResult r = e.train();
      st.json("kd_model.json", to_json(r.model));
      st.text("loss_history.csv", loss_history_csv(r.loss_history));
    } else if (subcommand == "select") {
      SelectionInputs in;
      in.candidates = e.split.test;
      switch (config.sampler) {
        case SamplerStrategy::Disagreement:
          load_kd(e, st.out);
          in.criterion = disagreement_proxy(score_lr(*e.providers.kd, in.candidates, e.seen),
                                            score_lr(e.providers.lr, in.candidates, e.seen), e.seen);
          break;
        case SamplerStrategy::Uncertainty:
          in.scores = score_lr(e.providers.lr, in.candidates, e.query);
          break;
        case SamplerStrategy::Weighted:
          for (const auto& l : in.candidates) in.weights.push_back(e.providers.aux_weights.at(l));
          break;
        case SamplerStrategy::Random:
          break;
      }
      SelectionResult sel = select_locations(config.sampler, in, config.budget, config.seed);
      st.text("selection.csv", selection_csv(sel));
    } else {
      if (needs_kd(config)) load_kd(e, st.out);
      auto llm = make_llm(config);
      ModalitySelector selector = e.selector(llm.get());
      PlanRequest request = e.plan_request(selector);
      if (subcommand == "sweep") {
        SweepRequest sw;
        sw.plan = request;
        sw.labels = e.test_labels();
        sw.budgets = config.sweep_budgets.empty() ? default_sweep(e.split.test.size())
                                                  : config.sweep_budgets;
        sw.k_precision = config.precision_k.empty() ? e.default_precision_k() : config.precision_k.front();
        sw.k_map = config.k;
        st.text("curve.csv", sweep_csv(budget_sweep(sw, e.providers)));
      } else {
        AcquisitionPlan plan = plan_run(request, e.providers);
        st.json("plan.json", to_json(plan));
        st.text("decisions.csv", decisions_csv(plan.decisions));
        if (subcommand == "run") {
          st.text("selection.csv", selection_csv(plan.hr_locations));
          ScoreTable final_scores = execute_plan(plan, e.providers, e.split.test);
          write_score_cache(final_scores, st.out / "scores_final.csv");
          st.written.push_back("scores_final.csv");
          Json cost = to_json(cost_report(plan, e.world->spec.tiles_per_location));
          st.json("cost_report.json", cost);
          EvalReport report = evaluate(final_scores, e.test_labels(), config, e.default_precision_k());
          report.cost = cost;
          st.json("eval_report.json", to_json(report));
        }
      }
    }
  }

  manifest.outputs = st.written;
  manifest.finished_at = utc_timestamp();
  fs::path manifest_rel = "manifest_" + subcommand + ".json";
  write_json_file(st.out / manifest_rel, manifest.to_json(st.out));
  st.written.push_back(manifest_rel);
  return st.written;
}

Json error_json(const std::exception& e) {
  Json err{{"kind", "internal"}, {"message", e.what()}};
  if (auto* se = dynamic_cast<const Error*>(&e)) err["kind"] = se->kind();
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) err["line"] = pe->line();
  if (auto* te = dynamic_cast<const TrainingError*>(&e)) err["epoch"] = te->epoch();
  if (auto* pr = dynamic_cast<const ProtocolError*>(&e)) err["raw_response"] = pr->raw_response();
  if (auto* tr = dynamic_cast<const TransportError*>(&e)) err["retries"] = tr->retries();
  if (auto* ma = dynamic_cast<const MissingArtifactError*>(&e)) err["path"] = ma->path();
  return Json{{"error", err}};
}

}  // namespace scalesift

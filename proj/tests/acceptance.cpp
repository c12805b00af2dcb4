// Acceptance suite: one PASS/FAIL line per criterion. Usage:
//   scalesift_acceptance <path-to-scalesift-cli> [criterion numbers...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scalesift/acquisition.hpp"
#include "scalesift/commands.hpp"
#include "scalesift/distill.hpp"
#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"
#include "scalesift/modality.hpp"
#include "scalesift/pipeline.hpp"
#include "scalesift/sweep.hpp"
#include "scalesift/world.hpp"

using namespace scalesift;
namespace fs = std::filesystem;

namespace {

std::string g_cli;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

RunConfig default_config(std::uint64_t seed, long budget) {
  RunConfig c;
  c.world = WorldSpec::default_spec();
  c.budget.max_locations = budget;
  c.set_seed(seed);
  return c;
}

Experiment trained(std::uint64_t seed, long budget = 12) {
  Experiment e = Experiment::prepare(default_config(seed, budget));
  e.train();
  return e;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::string> fine_of(const WorldSpec& spec, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids)
    for (std::size_t c = 0; c < spec.concepts.size(); ++c)
      if (spec.concepts[c].id == id && spec.is_fine(c)) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------- criterion 1

Outcome budget_compliance() {
  std::mt19937_64 rng(20240601);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const SamplerStrategy samplers[] = {SamplerStrategy::Disagreement, SamplerStrategy::Random,
                                      SamplerStrategy::Uncertainty, SamplerStrategy::Weighted};
  const ModalityStrategy modalities[] = {ModalityStrategy::Oracle, ModalityStrategy::AlwaysHR,
                                         ModalityStrategy::AlwaysLR,
                                         ModalityStrategy::AreaHeuristic};
  int runs = 0, violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    WorldSpec spec;
    spec.num_locations = uni(6, 60);
    spec.tiles_per_location = uni(1, 8);
    spec.feature_dim = uni(2, 8);
    spec.seed = rng();
    spec.context_coupling = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    int m = uni(2, 6);
    for (int c = 0; c < m; ++c) {
      ConceptSpec cs;
      cs.id = "c" + std::to_string(c);
      cs.scale = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      cs.prevalence = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
      cs.seen = c % 2 == 0;
      spec.concepts.push_back(cs);
    }
    RunConfig cfg;
    cfg.world = spec;
    cfg.set_seed(spec.seed);
    cfg.budget.max_locations = uni(0, spec.num_locations + 5);
    cfg.sampler = samplers[uni(0, 3)];
    cfg.modality = modalities[uni(0, 3)];
    cfg.area_threshold_m2 = std::uniform_real_distribution<double>(0.0, 5.0e6)(rng);
    cfg.k = uni(1, 10);
    cfg.train.hidden_dim = uni(1, 6);
    Experiment e = Experiment::prepare(cfg);
    TrainConfig tc = e.train_config();
    e.attach_kd(init_kd_model(static_cast<Eigen::Index>(spec.feature_dim), e.concepts, tc));
    AcquisitionPlan plan = plan_run(e.plan_request(e.selector()), e.providers);
    e.providers.hr.reset_counter();
    execute_plan(plan, e.providers, e.split.test);
    const std::size_t acquired = e.providers.hr.locations_scored();
    CostReport cost = cost_report(plan, spec.tiles_per_location);
    const auto b = static_cast<std::size_t>(cfg.budget.max_locations);
    const bool any_hr = !plan.concepts_with(Modality::HR).empty();
    const std::size_t expected = any_hr ? std::min(b, e.split.test.size()) : 0;
    ++runs;
    if (acquired > b || cost.hr_location_count > b || plan.hr_locations.selected.size() != expected)
      ++violations;
  }
  return {violations == 0, std::to_string(runs) + " random configs, " + std::to_string(violations) +
                               " budget violations"};
}

// ---------------------------------------------------------------- criterion 2
// Reference implementations written directly from the definitions.

std::vector<std::size_t> ref_ranking(const std::vector<double>& s, const std::vector<std::string>& ids) {
  std::vector<std::size_t> order;
  std::vector<bool> used(s.size(), false);
  for (std::size_t step = 0; step < s.size(); ++step) {
    std::size_t best = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (used[i]) continue;
      if (best == s.size() || s[i] > s[best] || (s[i] == s[best] && ids[i] < ids[best])) best = i;
    }
    used[best] = true;
    order.push_back(best);
  }
  return order;
}

std::optional<double> ref_ap(const std::vector<double>& s, const std::vector<std::uint8_t>& y,
                             const std::vector<std::string>& ids, int k) {
  int r = 0;
  for (auto v : y) r += v;
  if (r == 0) return std::nullopt;
  auto order = ref_ranking(s, ids);
  int n = static_cast<int>(s.size());
  double total = 0.0;
  for (int j = 1; j <= std::min(k, n); ++j) {
    if (!y[order[j - 1]]) continue;
    int hits = 0;
    for (int t = 1; t <= j; ++t) hits += y[order[t - 1]];
    total += static_cast<double>(hits) / j;
  }
  return total / std::min(k, r);
}

double ref_precision(const std::vector<double>& s, const std::vector<std::uint8_t>& y,
                     const std::vector<std::string>& ids, int k) {
  auto order = ref_ranking(s, ids);
  int cut = std::min<int>(k, static_cast<int>(s.size()));
  int hits = 0;
  for (int j = 0; j < cut; ++j) hits += y[order[j]];
  return cut == 0 ? 0.0 : static_cast<double>(hits) / cut;
}

std::optional<double> ref_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) ++less;
        if (w == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (a.size() < 2 || da == 0 || db == 0) return std::nullopt;
  return num / std::sqrt(da * db);
}

Outcome metric_oracles() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  int mismatches = 0;
  auto cmp = [&](std::optional<double> got, std::optional<double> want) {
    if (got.has_value() != want.has_value()) {
      ++mismatches;
      return;
    }
    if (got) worst = std::max(worst, std::abs(*got - *want));
  };
  for (int inst = 0; inst < 200; ++inst) {
    int n = std::uniform_int_distribution<int>(1, 50)(rng);
    int m = std::uniform_int_distribution<int>(1, 5)(rng);
    int k = std::uniform_int_distribution<int>(1, 60)(rng);
    bool coarse = inst % 3 == 0;  // quantized scores force ties
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("loc" + std::to_string((i * 37) % 101));
    std::set<std::string> uniq(ids.begin(), ids.end());
    if (uniq.size() != ids.size()) continue;
    std::vector<std::string> concepts;
    std::vector<double> values;
    std::vector<std::uint8_t> labels;
    for (int c = 0; c < m; ++c) {
      concepts.push_back("k" + std::to_string(c));
      double rate = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      for (int i = 0; i < n; ++i) {
        double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        values.push_back(coarse ? std::round(v * 4) / 4 : v);
        labels.push_back(std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate ? 1 : 0);
      }
    }
    ScoreTable table(concepts, ids, values);
    LabelTable truth(concepts, ids, labels);
    std::vector<double> ref_aps;
    for (int c = 0; c < m; ++c) {
      std::vector<double> s(values.begin() + c * n, values.begin() + (c + 1) * n);
      std::vector<std::uint8_t> y(labels.begin() + c * n, labels.begin() + (c + 1) * n);
      auto want = ref_ap(s, y, ids, k);
      cmp(ap_at_k(s, y, ids, k), want);
      if (want) ref_aps.push_back(*want);
      cmp(precision_at_k(s, y, ids, k), ref_precision(s, y, ids, k));
      std::vector<double> other(n);
      for (auto& v : other) v = std::round(std::uniform_real_distribution<double>(0, 1)(rng) * 5);
      cmp(spearman(s, other), ref_spearman(s, other));
    }
    std::optional<double> got_map;
    try {
      got_map = map_at_k(table, truth, k).map;
    } catch (const UndefinedMetricError&) {
    }
    std::optional<double> want_map;
    if (!ref_aps.empty()) want_map = mean(ref_aps);
    cmp(got_map, want_map);
  }
  return {mismatches == 0 && worst <= 1e-12,
          "200 instances, max abs diff " + std::to_string(worst) + ", undefined-signal mismatches " +
              std::to_string(mismatches)};
}

// ---------------------------------------------------------------- criterion 3

Outcome gradient_check() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto d = std::uniform_int_distribution<int>(1, 5)(rng);
    auto h = std::uniform_int_distribution<int>(1, 4)(rng);
    auto m = std::uniform_int_distribution<int>(1, 4)(rng);
    auto n = std::uniform_int_distribution<int>(1, 6)(rng);
    KDModel model{KDParams::zeros(d, h, m), {}};
    for (int c = 0; c < m; ++c) model.concepts.push_back("c" + std::to_string(c));
    auto fill = [&](auto& x) {
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
    };
    fill(model.params.w1);
    fill(model.params.b1);
    fill(model.params.w2);
    fill(model.params.b2);
    Eigen::MatrixXd x(n, d), t(n, m);
    fill(x);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = unit(rng);
    std::vector<bool> mask(m);
    for (int c = 0; c < m; ++c) mask[c] = unit(rng) < 0.7;
    mask[std::uniform_int_distribution<int>(0, m - 1)(rng)] = true;

    KDParams g = kd_gradient(model, x, t, mask);
    const double step = 1e-5;
    auto check = [&](auto member_w, auto member_g) {
      auto& w = model.params.*member_w;
      const auto& gw = g.*member_g;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        double orig = w.data()[i];
        w.data()[i] = orig + step;
        double up = kd_loss(model, x, t, mask);
        w.data()[i] = orig - step;
        double down = kd_loss(model, x, t, mask);
        w.data()[i] = orig;
        double fd = (up - down) / (2 * step);
        double an = gw.data()[i];
        double scale = std::max(std::abs(fd), std::abs(an));
        double rel = scale == 0.0 ? 0.0 : std::abs(fd - an) / scale;
        worst = std::max(worst, rel);
      }
    };
    check(&KDParams::w1, &KDParams::w1);
    check(&KDParams::b1, &KDParams::b1);
    check(&KDParams::w2, &KDParams::w2);
    check(&KDParams::b2, &KDParams::b2);
  }
  return {worst < 1e-4, "50 random models, worst relative error " + fmt(worst * 1e6, 3) + "e-6"};
}

// ---------------------------------------------------------------- criterion 4

Outcome kd_improvement() {
  std::vector<double> lr, kd, hr;
  for (std::uint64_t seed = 7; seed < 17; ++seed) {
    Experiment e = trained(seed);
    auto fine_seen = fine_of(e.world->spec, e.seen);
    LabelTable y = e.world->label_table(fine_seen, e.split.test);
    lr.push_back(map_at_k(score_lr(e.providers.lr, e.split.test, fine_seen), y, 40).map);
    kd.push_back(map_at_k(score_lr(*e.providers.kd, e.split.test, fine_seen), y, 40).map);
    hr.push_back(map_at_k(score_hr(e.providers.hr, e.split.test, fine_seen), y, 40).map);
  }
  double l = mean(lr), k = mean(kd), h = mean(hr);
  return {k - l >= 0.05 && k < h, "fine seen mAP@40 over 10 seeds: LR " + fmt(l) + ", KD " + fmt(k) +
                                      ", HR " + fmt(h) + " (KD-LR " + fmt(k - l) + ")"};
}

// ---------------------------------------------------------------- criterion 5

Outcome delta_agreement() {
  std::vector<double> rho;
  for (std::uint64_t seed = 7; seed < 17; ++seed) {
    Experiment e = trained(seed);
    const auto& t = e.split.test;
    ScoreTable lr = score_lr(e.providers.lr, t, e.seen);
    auto d_true = disagreement_true(score_hr(e.providers.hr, t, e.seen), lr, e.seen);
    auto d_proxy = disagreement_proxy(score_lr(*e.providers.kd, t, e.seen), lr, e.seen);
    rho.push_back(spearman(d_true, d_proxy).value_or(0.0));
  }
  double r = mean(rho);
  return {r >= 0.6, "mean Spearman rho over 10 seeds " + fmt(r) + " (min " +
                        fmt(*std::min_element(rho.begin(), rho.end())) + ")"};
}

// ---------------------------------------------------------------- criterion 6

Outcome sampling_dominance() {
  std::map<long, std::vector<double>> dis, rnd;
  long n = 0;
  for (std::uint64_t seed = 7; seed < 27; ++seed) {
    Experiment e = trained(seed);
    n = static_cast<long>(e.split.test.size());
    std::vector<long> budgets;
    for (long b = 0; b <= n; b += n / 10) budgets.push_back(b);
    for (long b : {n * 5 / 100, n * 10 / 100, n * 25 / 100}) budgets.push_back(b);
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

    SweepRequest sw;
    sw.plan = e.plan_request(e.selector());
    sw.plan.decisions = sw.plan.modality.decide(sw.plan.query, sw.plan.seen);
    for (const auto& [c, d] : *sw.plan.decisions)
      if (d.choice == Modality::HR) sw.eval_concepts.push_back(c);
    if (sw.eval_concepts.empty()) return {false, "seed " + std::to_string(seed) + ": no HR-routed concept"};
    sw.labels = e.test_labels();
    sw.budgets = budgets;
    sw.k_precision = static_cast<int>(n / 10);
    sw.k_map = 40;
    for (SamplerStrategy s : {SamplerStrategy::Disagreement, SamplerStrategy::Random}) {
      sw.plan.sampler = s;
      for (const auto& row : budget_sweep(sw, e.providers))
        (s == SamplerStrategy::Disagreement ? dis : rnd)[row.budget].push_back(row.precision_at_k);
    }
  }
  bool ok = true;
  std::string gaps;
  for (long b : {n * 5 / 100, n * 10 / 100, n * 25 / 100}) {
    double gap = mean(dis[b]) - mean(rnd[b]);
    gaps += " B=" + std::to_string(b) + ":" + fmt(gap);
    ok = ok && gap >= 0.03;
  }
  int dominated = 0;
  for (const auto& [b, v] : dis) dominated += mean(v) >= mean(rnd[b]) ? 1 : 0;
  ok = ok && dominated == static_cast<int>(dis.size());
  return {ok, "precision@" + std::to_string(n / 10) + " gap (dis-rnd)" + gaps + "; weakly dominant at " +
                  std::to_string(dominated) + "/" + std::to_string(dis.size()) + " budgets"};
}

// ---------------------------------------------------------------- criterion 7

Outcome full_system() {
  std::vector<double> full, lr, kd, hr, area_ratio;
  for (std::uint64_t seed = 7; seed < 27; ++seed) {
    RunConfig cfg = default_config(seed, 0);
    Experiment e = Experiment::prepare(cfg);
    e.config.budget.max_locations = static_cast<long>(e.split.test.size() / 10);
    e.config.query_concepts = e.seen;
    e.query = e.seen;
    e.train();
    const auto& t = e.split.test;
    LabelTable y = e.world->label_table(e.seen, t);
    AcquisitionPlan plan = plan_run(e.plan_request(e.selector()), e.providers);
    full.push_back(map_at_k(execute_plan(plan, e.providers, t), y, 40).map);
    lr.push_back(map_at_k(score_lr(e.providers.lr, t, e.seen), y, 40).map);
    kd.push_back(map_at_k(score_lr(*e.providers.kd, t, e.seen), y, 40).map);
    hr.push_back(map_at_k(score_hr(e.providers.hr, t, e.seen), y, 40).map);
    double hr_only_area = static_cast<double>(t.size()) * e.config.budget.area_per_location;
    area_ratio.push_back(cost_report(plan, e.world->spec.tiles_per_location).hr_area_km2 / hr_only_area);
  }
  double f = mean(full), l = mean(lr), k = mean(kd), h = mean(hr);
  double worst_area = *std::max_element(area_ratio.begin(), area_ratio.end());
  bool ok = f >= l + 0.02 && f >= k + 0.02 && f >= h - 0.01 && worst_area <= 0.10 + 1e-12;
  return {ok, "mAP@40 over 20 seeds: full " + fmt(f) + ", LR " + fmt(l) + ", KD " + fmt(k) + ", HR " +
                  fmt(h) + "; HR area " + fmt(100 * worst_area, 1) + "% of HR-only"};
}

// ---------------------------------------------------------------- criterion 8

Outcome selector_arithmetic() {
  fs::path dir = fs::temp_directory_path() / "scalesift_acceptance_c8";
  fs::create_directories(dir);
  auto scripted = [&](const DecisionMap& truth, const std::string& name) {
    std::string body = "concept,answer\n";
    for (const auto& [c, d] : truth) body += c + "," + to_string(d.choice) + "\n";
    write_text_file(dir / name, body);
    LLMClientConfig cfg;
    cfg.mode = LLMClientConfig::Mode::Scripted;
    cfg.scripted_path = dir / name;
    return std::make_unique<LLMClient>(cfg);
  };
  auto run = [&](ModalityStrategy s, const DecisionMap& truth, const DecisionMap& seen,
                 const LLMClient* llm) {
    ModalityContext ctx;
    ctx.llm = llm;
    ctx.seen_decisions = seen;
    std::vector<std::string> ids;
    for (const auto& [c, d] : truth) ids.push_back(c);
    return evaluate_selector(decide_modalities(s, ids, ctx), truth);
  };

  // Ten held-out concepts, exactly one of which favors LR.
  const char* held_out[] = {"dam",    "bridge", "pool",     "solar_panel", "helipad",
                            "silo",   "pier",   "wind_turbine", "water_tower", "desert"};
  DecisionMap truth;
  for (const char* c : held_out)
    truth[c] = {c, std::string(c) == "desert" ? Modality::LR : Modality::HR, "truth", false};
  DecisionMap seen{{"forest", {"forest", Modality::LR, "oracle", false}},
                   {"tennis", {"tennis", Modality::HR, "oracle", false}}};
  auto llm = scripted(truth, "fixture.csv");
  double llm_acc = run(ModalityStrategy::LLM, truth, seen, llm.get());
  double lr_acc = run(ModalityStrategy::AlwaysLR, truth, seen, nullptr);

  // Default world: ground truth for the unseen concepts from the validation oracle.
  Experiment e = Experiment::prepare(default_config(7, 12));
  auto unseen = e.world->spec.unseen_concepts();
  auto val_truth = validation_modality_oracle(
      score_hr(e.providers.hr, e.split.val, unseen), score_lr(e.providers.lr, e.split.val, unseen),
      e.world->label_table(unseen, e.split.val), unseen, 40);
  auto seen_dec = validation_modality_oracle(
      score_hr(e.providers.hr, e.split.val, e.seen), score_lr(e.providers.lr, e.split.val, e.seen),
      e.world->label_table(e.seen, e.split.val), e.seen, 40);
  auto world_llm = scripted(val_truth, "world.csv");
  double w_llm = run(ModalityStrategy::LLM, val_truth, seen_dec, world_llm.get());
  double w_lr = run(ModalityStrategy::AlwaysLR, val_truth, seen_dec, nullptr);
  double lr_fraction = 0.0;
  for (const auto& [c, d] : val_truth) lr_fraction += d.choice == Modality::LR ? 1.0 : 0.0;
  lr_fraction /= static_cast<double>(val_truth.size());
  fs::remove_all(dir);

  bool ok = llm_acc == 1.0 && lr_acc == 0.1 && w_llm == 1.0 && w_lr == lr_fraction &&
            w_llm - w_lr >= 0.25;
  return {ok, "fixture: LLM " + fmt(llm_acc, 2) + ", always-LR " + fmt(lr_acc, 2) +
                  "; default world unseen: LLM " + fmt(w_llm, 2) + ", always-LR " + fmt(w_lr, 2)};
}

// ---------------------------------------------------------------- criterion 9

Outcome consistency_envelope() {
  Experiment e = trained(7);
  const auto& t = e.split.test;
  auto plan_with = [&](ModalityStrategy m, long budget) {
    ModalitySelector sel = e.selector();
    sel.strategy = m;
    PlanRequest r = e.plan_request(sel);
    r.budget.max_locations = budget;
    return plan_run(r, e.providers);
  };
  ScoreTable kd_only = kd_predict(*e.kd, e.world->feature_matrix(t), t);
  ScoreTable hr_only = score_hr(e.providers.hr, t, e.concepts);
  ScoreTable lr_only = score_lr(e.providers.lr, t, e.concepts);

  bool zero = execute_plan(plan_with(ModalityStrategy::AlwaysHR, 0), e.providers, t) == kd_only;
  bool full = execute_plan(plan_with(ModalityStrategy::AlwaysHR, static_cast<long>(t.size())),
                           e.providers, t) == hr_only;
  bool lr_rows = execute_plan(plan_with(ModalityStrategy::AlwaysLR, 12), e.providers, t) == lr_only;
  AcquisitionPlan mixed = plan_with(ModalityStrategy::Oracle, 12);
  ScoreTable out = execute_plan(mixed, e.providers, t);
  auto lr_concepts = mixed.concepts_with(Modality::LR);
  bool mixed_lr = out.select(lr_concepts, t) == lr_only.select(lr_concepts, t);
  bool ok = zero && full && lr_rows && mixed_lr && !lr_concepts.empty();
  return {ok, std::string("B=0 vs KD-only ") + (zero ? "identical" : "DIFFERENT") + ", B=N vs HR-only " +
                  (full ? "identical" : "DIFFERENT") + ", LR-routed rows " +
                  (lr_rows && mixed_lr ? "identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------- criterion 10

int sh(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

Outcome determinism() {
  fs::path dir = fs::temp_directory_path() / "scalesift_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_text_file(dir / "config.json",
                  R"({"world": {}, "providers": {"lr": {"kind": "synthetic-lr"}, "hr": {"kind": "synthetic-hr"}}, "budget": 12, "output_dir": "out"})");
  const std::string base = "\"" + g_cli + "\" ";
  const std::string cfg = " --config \"" + (dir / "config.json").string() + "\"";
  if (sh(base + "distill" + cfg) != 0) return {false, "distill failed"};
  const char* files[] = {"selection.csv", "plan.json", "scores_final.csv", "cost_report.json",
                         "eval_report.json"};
  std::map<std::string, std::string> first;
  if (sh(base + "run" + cfg) != 0) return {false, "first run failed"};
  for (const char* f : files) first[f] = read_text_file(dir / "out" / f);
  if (sh(base + "run" + cfg) != 0) return {false, "second run failed"};
  int same = 0;
  for (const char* f : files) same += read_text_file(dir / "out" / f) == first[f] ? 1 : 0;
  fs::remove_all(dir);
  return {same == 5, std::to_string(same) + "/5 run outputs byte-identical across invocations"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: scalesift_acceptance <scalesift-cli> [criterion...]\n";
    return 2;
  }
  g_cli = fs::absolute(argv[1]).string();
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "budget compliance", 30, budget_compliance},
      {2, "metric oracle equivalence", 10, metric_oracles},
      {3, "gradient correctness", 10, gradient_check},
      {4, "KD improvement", 120, kd_improvement},
      {5, "delta/proxy agreement", 60, delta_agreement},
      {6, "sampling dominance", 180, sampling_dominance},
      {7, "full-system dominance", 180, full_system},
      {8, "modality-selector arithmetic", 5, selector_arithmetic},
      {9, "consistency envelope", 30, consistency_envelope},
      {10, "determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_s;
    bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s (%.2fs, limit %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

#include "holovar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

#include "holovar/errors.hpp"
#include "holovar/rng.hpp"

namespace holovar {

namespace {

// Worker pool over trial indices; results are merged in trial order so the
// report body is independent of scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : workers) t.join();
}

struct TrialContext {
  const ExperimentConfig& config;
  GroupId group;
  CenterTable table;
  SurfacePresentation surface;
  GroupElement twist;
};

TrialContext make_context(const ExperimentConfig& config) {
  if (!config.group) throw Error(config.command + ": missing --group");
  if (!config.surface) throw Error(config.command + ": missing --surface");
  const GroupId group = *config.group;
  CenterTable table = center_table(group);
  if (config.twist_index < 0 || config.twist_index >= table.size()) {
    throw Error("twist index " + std::to_string(config.twist_index) + " out of range for " +
                group.label());
  }
  GroupElement twist = table.elements[config.twist_index];
  return TrialContext{config, group, std::move(table), *config.surface, std::move(twist)};
}

SampleOptions sample_options(const ExperimentConfig& config) {
  SampleOptions opts;
  opts.tol = config.tol;
  return opts;
}

AlignOptions align_options(const ExperimentConfig& config) {
  AlignOptions opts;
  opts.tol = config.tol;
  return opts;
}

using TrialFn = std::function<Json(const TrialContext&, int, std::uint64_t)>;

Json run_trials(const TrialContext& ctx, const TrialFn& fn, int& failures) {
  const int trials = ctx.config.trials;
  std::vector<Json> records(trials);
  std::atomic<int> failed{0};
  parallel_for(trials, ctx.config.jobs, [&](int i) {
    const std::uint64_t trial_seed = derive_seed(ctx.config.seed, i);
    Json rec{{"trial", i}, {"seed", trial_seed}};
    try {
      Json body = fn(ctx, i, trial_seed);
      rec["status"] = "ok";
      rec.update(body);
    } catch (const std::exception& e) {
      rec["status"] = "error";
      rec["error"] = e.what();
      failed.fetch_add(1);
    }
    records[i] = std::move(rec);
  });
  failures = failed.load();
  Json out = Json::array();
  for (Json& r : records) out.push_back(std::move(r));
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

Json residual_summary(const Json& trials, const char* key) {
  std::vector<double> values;
  for (const Json& t : trials) {
    if (t.contains(key)) values.push_back(t[key].get<double>());
  }
  if (values.empty()) return Json::object();
  return Json{{"min", quantile(values, 0.0)},
              {"median", quantile(values, 0.5)},
              {"max", quantile(values, 1.0)}};
}

// --- command bodies -------------------------------------------------------

Json sample_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  const NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                                sample_options(ctx.config));
  return Json{{"residual", relation_residual(x)},
              {"generic", is_generic(x, ctx.config.tol.sigma_tol)}};
}

Json involution_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  const NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                                sample_options(ctx.config));
  const DoubledTuple big = diagonal_embed(x, ctx.config.tol);
  const double tau_sq = tuple_distance(tau_point(tau_point(big)), big);
  const GaugePair k = haar_gauge_pair(ctx.group, derive_seed(seed, 1));
  const double equivariance =
      tuple_distance(tau_point(apply_action(k, big)),
                     apply_action(tau_gauge(k), tau_point(big)));
  WitnessOptions wopts;
  wopts.tol = ctx.config.tol;
  wopts.align = align_options(ctx.config);
  const auto witness = find_fixed_witness(big, ctx.table, derive_seed(seed, 2), wopts);
  Json out{{"tau_square_defect", tau_sq},
           {"equivariance_defect", equivariance},
           {"witness_found", witness.has_value()}};
  if (witness) {
    out["witness_residual"] = witness->residual;
    out["twist_index_observed"] = witness->twist_index;
    out["twist_matches"] = witness->twist_index == ctx.config.twist_index;
  }
  return out;
}

Json fiber_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                          sample_options(ctx.config));
  const double res = relation_residual(x);
  const bool generic = is_generic(x, ctx.config.tol.sigma_tol);
  Json out{{"residual", res}, {"generic", generic}};
  if (!generic || !(res < ctx.config.tol.eps_rel)) {
    out["countable"] = false;
    return out;
  }
  FiberOptions fopts;
  fopts.tol = ctx.config.tol;
  fopts.align = align_options(ctx.config);
  const FiberReport fiber = fiber_of_I(x, ctx.table, derive_seed(seed, 3), fopts);
  out["countable"] = fiber.countable;
  out["degree"] = fiber.degree;
  out["fiber"] = to_json(fiber);
  return out;
}

Json surjectivity_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  const NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                                sample_options(ctx.config));
  const DoubledTuple big = diagonal_embed(x, ctx.config.tol);
  WitnessOptions wopts;
  wopts.tol = ctx.config.tol;
  wopts.align = align_options(ctx.config);
  const auto witness = find_fixed_witness(big, ctx.table, derive_seed(seed, 1), wopts);
  if (!witness) {
    throw Error("no fixed-class witness found for a sampled N_r point");
  }
  const int expected_class = ctx.table.class_of[ctx.config.twist_index];
  const CenterQuotientClass cls = twist_class(ctx.table, witness->twist);
  bool stable = true;
  int checked = 0;
  for (int p = 0; p < ctx.config.perturbations; ++p) {
    const GaugePair k = haar_gauge_pair(ctx.group, derive_seed(seed, 100 + p));
    const DoubledTuple moved = apply_action(k, big);
    const auto w2 = find_fixed_witness(moved, ctx.table, derive_seed(seed, 200 + p), wopts);
    if (!w2 || ctx.table.class_of[w2->twist_index] != expected_class) {
      stable = false;
      break;
    }
    ++checked;
  }
  return Json{{"witness_residual", witness->residual},
              {"twist_index_observed", witness->twist_index},
              {"class_observed", cls.class_index},
              {"class_expected", expected_class},
              {"class_matches", cls.class_index == expected_class},
              {"stable_under_gauge", stable},
              {"perturbations_checked", checked}};
}

Json phi_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  const NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                                sample_options(ctx.config));
  const DoubledTuple big = diagonal_embed(x, ctx.config.tol);
  const NTuple image = phi_map(big, ctx.config.tol);
  const double image_residual = relation_residual(image);
  const GaugePair k = haar_gauge_pair(ctx.group, derive_seed(seed, 1));
  const NTuple moved_image = phi_map(apply_action(k, big), ctx.config.tol);
  const AlignmentResult round_trip =
      align_conjugation(image, moved_image, derive_seed(seed, 2), align_options(ctx.config));
  return Json{{"image_residual", image_residual},
              {"equivariant", round_trip.found},
              {"equivariance_residual", round_trip.residual},
              {"equivariance_starts", round_trip.starts_used}};
}

Json lift_trial(const TrialContext& ctx, int, std::uint64_t seed) {
  const NTuple x = sample_point(ctx.surface, ctx.group, ctx.twist, seed,
                                sample_options(ctx.config));
  const bool identity_ok = verify_lift_commutator_identity(x, ctx.config.tol.eps_rel);
  const CosetTuple h = project_center(x, ctx.table);
  const Obstruction ob = lift_and_obstruct(h, ctx.surface, ctx.table, ctx.config.tol);
  return Json{{"lift_identity", identity_ok},
              {"obstruction_class", ob.quotient_class.class_index},
              {"obstruction_index", ob.center_index},
              {"class_expected", ctx.table.class_of[ctx.config.twist_index]},
              {"class_matches",
               ob.quotient_class.class_index == ctx.table.class_of[ctx.config.twist_index]}};
}

int modal_degree(const Json& trials, long* countable_out = nullptr,
                 std::map<int, long>* hist_out = nullptr) {
  std::map<int, long> hist;
  long countable = 0;
  for (const Json& t : trials) {
    if (t.value("status", "") != "ok" || !t.value("countable", false)) continue;
    ++countable;
    hist[t["degree"].get<int>()] += 1;
  }
  if (countable_out != nullptr) *countable_out = countable;
  if (hist_out != nullptr) *hist_out = hist;
  int best = -1;
  long best_count = -1;
  for (const auto& [deg, count] : hist) {
    if (count > best_count) {
      best = deg;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

Json to_json(const ExperimentConfig& c) {
  Json out{{"command", c.command}};
  if (c.group) out["group"] = to_json(*c.group);
  if (c.finite_group) out["finite_group"] = builtin_group_name(*c.finite_group);
  if (c.surface) out["surface"] = to_json(*c.surface);
  out["twist_index"] = c.twist_index;
  out["trials"] = c.trials;
  out["seed"] = c.seed;
  out["perturbations"] = c.perturbations;
  out["failure_ceiling"] = c.failure_ceiling;
  out["tolerances"] = to_json(c.tol);
  return out;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.command = j.at("command").get<std::string>();
  if (j.contains("group")) c.group = group_id_from_json(j["group"]);
  if (j.contains("finite_group")) {
    c.finite_group = parse_builtin_group(j["finite_group"].get<std::string>());
  }
  if (j.contains("surface")) c.surface = surface_from_json(j["surface"]);
  c.twist_index = j.value("twist_index", 0);
  c.trials = j.value("trials", 1);
  c.seed = j.value("seed", std::uint64_t{0});
  c.perturbations = j.value("perturbations", 10);
  c.failure_ceiling = j.value("failure_ceiling", 0.25);
  if (j.contains("tolerances")) c.tol = tolerances_from_json(j["tolerances"]);
  return c;
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trials < 1) throw Error("trials must be >= 1");

  Json report{{"schema", kReportSchema},
              {"version", kVersion},
              {"command", config.command},
              {"config", to_json(config)}};
  int failures = 0;
  Json summary;

  if (config.command == "oracle") {
    if (!config.finite_group) throw Error("oracle: missing finite group name");
    if (!config.surface) throw Error("oracle: missing --surface");
    const FiniteGroup g = builtin_group(*config.finite_group);
    const ExactFiberReport exact = exact_fiber_degree(g, *config.surface);
    report["trials"] = Json::array();
    report["oracle"] = to_json(exact);
    const bool uniform = exact.fiber_histogram.size() <= 1;
    summary = Json{{"predicted_degree", exact.predicted_degree},
                   {"observed_degree", uniform && !exact.fiber_histogram.empty()
                                           ? exact.fiber_histogram.begin()->first
                                           : -1},
                   {"agreement", exact.degrees_match_prediction},
                   {"center_order", static_cast<int>(g.center.size())},
                   {"center_mod_squares",
                    static_cast<int>(g.center.size() / g.two_center.size())},
                   {"exact", true},
                   {"partition_disjoint", exact.partition_disjoint},
                   {"covered", exact.covered}};
  } else {
    const TrialContext ctx = make_context(config);
    TrialFn fn;
    if (config.command == "sample") {
      fn = sample_trial;
    } else if (config.command == "involution-check") {
      fn = involution_trial;
    } else if (config.command == "fiber-count") {
      fn = fiber_trial;
    } else if (config.command == "surjectivity-probe") {
      fn = surjectivity_trial;
    } else if (config.command == "phi-check") {
      fn = phi_trial;
    } else if (config.command == "lift-degree") {
      fn = lift_trial;
    } else {
      throw Error("unknown command: " + config.command);
    }
    Json trials = run_trials(ctx, fn, failures);
    summary = Json{{"trials", config.trials},
                   {"failures", failures},
                   {"success_rate",
                    static_cast<double>(config.trials - failures) / config.trials}};
    if (config.command == "fiber-count") {
      long countable = 0;
      std::map<int, long> hist;
      const int modal = modal_degree(trials, &countable, &hist);
      Json hist_json = Json::object();
      long modal_count = 0;
      for (const auto& [deg, count] : hist) {
        hist_json[std::to_string(deg)] = count;
        if (deg == modal) modal_count = count;
      }
      const int predicted = static_cast<int>(ctx.table.quotient_classes.size());
      summary["countable_trials"] = countable;
      summary["degree_histogram"] = std::move(hist_json);
      summary["observed_degree"] = modal;
      summary["predicted_degree"] = predicted;
      summary["modal_fraction"] =
          countable > 0 ? static_cast<double>(modal_count) / countable : 0.0;
      summary["agreement"] = modal == predicted;
      summary["center_order"] = ctx.table.size();
      summary["center_mod_squares"] = predicted;
    } else if (config.command == "surjectivity-probe") {
      long matched = 0, stable = 0, ok = 0;
      for (const Json& t : trials) {
        if (t.value("status", "") != "ok") continue;
        ++ok;
        if (t.value("class_matches", false)) ++matched;
        if (t.value("stable_under_gauge", false)) ++stable;
      }
      summary["class_match_count"] = matched;
      summary["stable_count"] = stable;
      summary["all_matched"] = ok == config.trials && matched == ok && stable == ok;
      summary["witness_residuals"] = residual_summary(trials, "witness_residual");
    } else if (config.command == "phi-check") {
      long equivariant = 0;
      for (const Json& t : trials) {
        if (t.value("status", "") == "ok" && t.value("equivariant", false)) ++equivariant;
      }
      summary["equivariant_count"] = equivariant;
      summary["image_residuals"] = residual_summary(trials, "image_residual");
    } else if (config.command == "lift-degree") {
      std::map<int, long> classes;
      long identity_ok = 0;
      for (const Json& t : trials) {
        if (t.value("status", "") != "ok") continue;
        if (t.value("lift_identity", false)) ++identity_ok;
        classes[t["obstruction_class"].get<int>()] += 1;
      }
      Json class_json = Json::object();
      for (const auto& [cls, count] : classes) class_json[std::to_string(cls)] = count;
      summary["lift_identity_count"] = identity_ok;
      summary["obstruction_classes"] = std::move(class_json);
      summary["distinct_classes"] = classes.size();
    } else if (config.command == "sample") {
      summary["residuals"] = residual_summary(trials, "residual");
      long generic = 0;
      for (const Json& t : trials) {
        if (t.value("status", "") == "ok" && t.value("generic", false)) ++generic;
      }
      summary["generic_count"] = generic;
    } else if (config.command == "involution-check") {
      long witnesses = 0, matched = 0;
      double max_equivariance = 0.0;
      for (const Json& t : trials) {
        if (t.value("status", "") != "ok") continue;
        if (t.value("witness_found", false)) ++witnesses;
        if (t.value("twist_matches", false)) ++matched;
        max_equivariance =
            std::max(max_equivariance, t.value("equivariance_defect", 0.0));
      }
      summary["witness_count"] = witnesses;
      summary["twist_match_count"] = matched;
      summary["max_equivariance_defect"] = max_equivariance;
    }
    report["trials"] = std::move(trials);
  }

  report["summary"] = std::move(summary);
  const auto end = std::chrono::steady_clock::now();
  report["timing"] = Json{
      {"wall_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count()}};

  RunOutcome outcome;
  const double failure_rate =
      config.trials > 0 ? static_cast<double>(failures) / config.trials : 0.0;
  outcome.exit_code = failure_rate > config.failure_ceiling ? 3 : 0;
  outcome.report = std::move(report);
  return outcome;
}

}  // namespace holovar

/*
 * Copyright 2026 The pregtte Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "commands.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pregtte/config_text.hpp"
#include "pregtte/dag.hpp"
#include "pregtte/design.hpp"
#include "pregtte/errors.hpp"
#include "pregtte/estimation.hpp"
#include "pregtte/manifest.hpp"
#include "pregtte/observation.hpp"
#include "pregtte/oracle.hpp"
#include "pregtte/protocol.hpp"
#include "pregtte/records_io.hpp"
#include "pregtte/report.hpp"
#include "pregtte/scm.hpp"
#include "pregtte/world_config.hpp"

namespace pregtte::cli {
namespace {

namespace fs = std::filesystem;
using Args = std::map<std::string, std::string>;

/// Output files of one run, in write order.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

std::string absolute(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

/// Writes every artifact plus the manifest into `o.out`. Existing files are
/// only replaced with `force`, and the check happens before anything is written.
RunManifest emit(const OutputOptions& o, RunManifest m, const Artifacts& a, std::ostream& out) {
  m.tool_version = tool_version();
  m.created_utc = o.timestamp.value_or(utc_timestamp_now());
  for (const auto& [name, content] : a.files) m.outputs[name] = digest_hex(content);
  if (o.out.empty()) return m;
  const fs::path dir(o.out);
  if (!o.force) {
    for (const auto& [name, content] : a.files)
      if (fs::exists(dir / name)) throw IoError("refusing to overwrite '" + (dir / name).string() + "' (use --force)");
    if (fs::exists(dir / kManifestFile))
      throw IoError("refusing to overwrite '" + (dir / kManifestFile).string() + "' (use --force)");
  }
  for (const auto& [name, content] : a.files) write_text_file(dir / name, content, true);
  write_text_file(dir / kManifestFile, manifest_json(m), true);
  out << "wrote " << a.files.size() + 1 << " files to " << dir.string() << '\n';
  return m;
}

std::optional<std::string> arg(const Args& args, const std::string& key) {
  const auto it = args.find(key);
  if (it == args.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint64_t> arg_u64(const Args& args, const std::string& key) {
  const auto v = arg(args, key);
  if (!v) return std::nullopt;
  return std::stoull(*v);
}

ExperimentConfig load_config(const std::string& config, const std::string& preset_name) {
  if (!config.empty() && !preset_name.empty()) throw UsageError("give either --config or --preset, not both");
  if (!config.empty()) return load_experiment(config);
  if (!preset_name.empty()) return experiment_from_preset(preset_name);
  throw UsageError("one of --config or --preset is required");
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::uint64_t> n) {
  if (seed) cfg.world.seed = *seed;
  if (n) cfg.world.n_persons = *n;
  validate(cfg.world);
}

// ---- simulate ---------------------------------------------------------------

Args to_args(const SimulateOptions& o) {
  Args a;
  if (!o.config.empty()) a["config"] = absolute(o.config);
  if (!o.preset.empty()) a["preset"] = o.preset;
  if (o.seed) a["seed"] = std::to_string(*o.seed);
  if (o.n_persons) a["n"] = std::to_string(*o.n_persons);
  return a;
}

SimulateOptions simulate_from_args(const Args& a) {
  SimulateOptions o;
  o.config = arg(a, "config").value_or("");
  o.preset = arg(a, "preset").value_or("");
  o.seed = arg_u64(a, "seed");
  o.n_persons = arg_u64(a, "n");
  return o;
}

RunManifest cmd_simulate(const SimulateOptions& opts, const OutputOptions& output, std::ostream& out) {
  if (output.out.empty()) throw UsageError("simulate requires --out");
  auto cfg = load_config(opts.config, opts.preset);
  apply_overrides(cfg, opts.seed, opts.n_persons);
  const auto trajectories = simulate_cohort(cfg.world);
  const auto observed = observed_cohort(trajectories, cfg.observation);
  const auto summary = summarize_dataset(trajectories, observed);

  Artifacts a;
  std::ostringstream buf;
  write_trajectories(buf, trajectories);
  a.add(kTrajectoriesFile, buf.str());
  buf.str("");
  write_encounters(buf, trajectories);
  a.add(kEncountersFile, buf.str());
  buf.str("");
  write_observed_records(buf, observed);
  a.add(kObservedRecordsFile, buf.str());
  buf.str("");
  write_observed_encounters(buf, observed);
  a.add(kObservedEncountersFile, buf.str());
  a.add(kWorldFile, canonical_text(cfg));
  a.add("summary.txt", format_dataset_summary(summary));

  out << format_dataset_summary(summary);
  RunManifest m;
  m.command = "simulate";
  m.arguments = to_args(opts);
  m.params_digest = params_digest(cfg.world, cfg.observation);
  m.master_seed = cfg.world.seed;
  return emit(output, m, a, out);
}

// ---- identify ---------------------------------------------------------------

Args to_args(const IdentifyOptions& o) {
  Args a;
  const bool catalog = o.target == "fig3a" || o.target == "fig3b" || o.target == "fig3c";
  a["target"] = catalog ? o.target : absolute(o.target);
  if (!o.measure.empty()) a["measure"] = join(o.measure);
  return a;
}

IdentifyOptions identify_from_args(const Args& a) {
  IdentifyOptions o;
  o.target = arg(a, "target").value_or("");
  if (auto m = arg(a, "measure")) o.measure = split(*m, ',');
  return o;
}

RunManifest cmd_identify(const IdentifyOptions& opts, const OutputOptions& output, std::ostream& out) {
  const bool catalog = opts.target == "fig3a" || opts.target == "fig3b" || opts.target == "fig3c";
  Dag dag = catalog ? catalog_graph(opts.target) : load_dag(opts.target);
  const std::string source_text = catalog ? opts.target : read_text_file(opts.target);
  const NodeSet extra(opts.measure.begin(), opts.measure.end());
  dag.require_nodes(extra);
  dag.measured.insert(extra.begin(), extra.end());

  std::string name = catalog ? opts.target : fs::path(opts.target).filename().string();
  if (!extra.empty()) name += " (measured +" + join(opts.measure) + ")";
  std::vector<IdentifiabilityVerdict> verdicts;
  for (Estimand e : {Estimand::Early, Estimand::Late, Estimand::Joint}) verdicts.push_back(check_identifiable(dag, e));

  const auto table = format_identify_table(name, verdicts);
  out << table;
  Artifacts a;
  a.add("verdicts.txt", table);
  a.add("verdicts.json", identify_json(name, verdicts));
  RunManifest m;
  m.command = "identify";
  m.arguments = to_args(opts);
  m.params_digest = digest_hex(source_text + "\n" + join(opts.measure));
  return emit(output, m, a, out);
}

// ---- emulate ----------------------------------------------------------------

Args to_args(const EmulateOptions& o) {
  return {{"data", absolute(o.data)},
          {"protocol", o.protocol == "stop_or_go" || o.protocol == "chap" ? o.protocol : absolute(o.protocol)},
          {"design", o.design},
          {"contrast", o.contrast},
          {"bootstrap", std::to_string(o.bootstrap)},
          {"seed", std::to_string(o.seed)},
          {"loss_or_outcome", o.loss_or_outcome ? "true" : "false"}};
}

EmulateOptions emulate_from_args(const Args& a) {
  EmulateOptions o;
  o.data = arg(a, "data").value_or("");
  o.protocol = arg(a, "protocol").value_or(o.protocol);
  o.design = arg(a, "design").value_or(o.design);
  o.contrast = arg(a, "contrast").value_or(o.contrast);
  o.bootstrap = std::stoi(arg(a, "bootstrap").value_or("500"));
  o.seed = arg_u64(a, "seed").value_or(1);
  o.loss_or_outcome = arg(a, "loss_or_outcome").value_or("false") == "true";
  return o;
}

std::optional<Contrast> contrast_option(const std::string& s) {
  if (s == "protocol") return std::nullopt;
  return parse_contrast(s);
}

RunManifest cmd_emulate(const EmulateOptions& opts, const OutputOptions& output, std::ostream& out) {
  if (opts.bootstrap < 0) throw UsageError("--bootstrap must be >= 0");
  const fs::path dir(opts.data);
  const auto protocol = resolve_protocol(opts.protocol);
  const Anchor anchor = parse_anchor(opts.design);
  const auto records = load_observed(dir);

  ObservationParams observation;
  std::string digest;
  if (fs::exists(dir / kWorldFile)) {
    const auto cfg = load_experiment((dir / kWorldFile).string());
    observation = cfg.observation;
    digest = params_digest(cfg.world, cfg.observation);
  } else {
    digest = digest_hex(read_text_file(dir / kObservedRecordsFile));
  }

  std::vector<Trajectory> truth;
  if (anchor == Anchor::LmpIdeal) {
    if (!has_trajectories(dir))
      throw PreconditionError("design 4A needs the ground-truth files " + std::string(kTrajectoriesFile) + " and " +
                              kEncountersFile + " in '" + dir.string() + "'");
    truth = load_trajectories(dir);
  }
  const auto cohort = build_cohort(records, design_spec(anchor, protocol), protocol, truth, observation);

  EstimationOptions eo;
  eo.contrast = contrast_option(opts.contrast);
  eo.bootstrap = opts.bootstrap;
  eo.seed = opts.seed;
  if (opts.loss_or_outcome) eo.outcome = OutcomeVariant::LossOrOutcome;
  std::vector<EffectResult> results;
  if (protocol.stratify_by_prior_use) {
    for (bool prior : {true, false}) {
      const auto part = stratum(cohort, prior);
      if (part.members.empty())
        throw NumericalError(std::string("stratum ") + (prior ? "prior_user" : "non_user") + " of " +
                             std::string(to_string(anchor)) + "/" + protocol.name + " has no members");
      auto r = estimate_effect(part, eo);
      r.label += prior ? "/prior_user" : "/non_user";
      results.push_back(std::move(r));
    }
  } else {
    results.push_back(estimate_effect(cohort, eo));
  }

  std::ostringstream head;
  head << "cohort: screened " << cohort.n_screened << ", enrolled " << cohort.members.size();
  for (const auto& [reason, n] : cohort.exclusions) head << ", " << reason << " " << n;
  head << '\n';
  const auto text = head.str() + format_estimates(results);
  out << text;

  std::ostringstream imm;
  imm << "# schema: immortal_time/1\nperson_id\tt0_week\timmortal_weeks\n";
  const auto it = immortal_time(cohort);
  for (const auto& mbr : cohort.members) imm << mbr.person_id << '\t' << mbr.t0_week << '\t' << mbr.immortal_weeks << '\n';
  imm << "# total\t" << it.total << '\n';

  Artifacts a;
  a.add("estimates.txt", text);
  a.add("estimates.json", estimates_json(results));
  a.add("immortal_time.tsv", imm.str());
  RunManifest m;
  m.command = "emulate";
  m.arguments = to_args(opts);
  m.params_digest = digest;
  m.protocol_digest = digest_hex(serialize_protocol(protocol));
  m.designs = {std::string(to_string(anchor))};
  m.master_seed = opts.seed;
  return emit(output, m, a, out);
}

// ---- compare ----------------------------------------------------------------

Args to_args(const CompareOptions& o) {
  Args a;
  if (!o.config.empty()) a["config"] = absolute(o.config);
  if (!o.preset.empty()) a["preset"] = o.preset;
  if (!o.designs.empty()) a["designs"] = join(o.designs);
  if (o.repeats) a["repeats"] = std::to_string(*o.repeats);
  if (o.bootstrap) a["bootstrap"] = std::to_string(*o.bootstrap);
  if (o.seed) a["seed"] = std::to_string(*o.seed);
  if (o.n_persons) a["n"] = std::to_string(*o.n_persons);
  a["stratum"] = o.stratum;
  return a;
}

CompareOptions compare_from_args(const Args& a) {
  CompareOptions o;
  o.config = arg(a, "config").value_or("");
  o.preset = arg(a, "preset").value_or("");
  if (auto d = arg(a, "designs")) o.designs = split(*d, ',');
  if (auto r = arg(a, "repeats")) o.repeats = std::stoi(*r);
  if (auto b = arg(a, "bootstrap")) o.bootstrap = std::stoi(*b);
  o.seed = arg_u64(a, "seed");
  o.n_persons = arg_u64(a, "n");
  o.stratum = arg(a, "stratum").value_or("all");
  return o;
}

RunManifest cmd_compare(const CompareOptions& opts, const OutputOptions& output, std::ostream& out) {
  auto cfg = load_config(opts.config, opts.preset);
  apply_overrides(cfg, opts.seed, opts.n_persons);
  if (!opts.designs.empty()) cfg.designs = opts.designs;
  if (opts.repeats) cfg.repeats = *opts.repeats;
  if (opts.bootstrap) cfg.bootstrap = *opts.bootstrap;
  if (cfg.repeats <= 0) throw UsageError("repeats must be at least 1");
  if (cfg.bootstrap < 0) throw UsageError("bootstrap must be >= 0");
  if (cfg.designs.empty()) throw UsageError("no designs to compare");

  std::optional<bool> stratum_value;
  if (opts.stratum == "prior_user") stratum_value = true;
  else if (opts.stratum == "non_user") stratum_value = false;
  else if (opts.stratum != "all") throw UsageError("--stratum must be all, prior_user or non_user");

  const auto protocol = resolve_protocol(cfg.protocol);
  std::vector<Anchor> anchors;
  for (const auto& d : cfg.designs) anchors.push_back(parse_anchor(d));

  OracleEstimand est;
  est.kind = parse_oracle_kind(cfg.estimand);
  est.population = parse_target_population(cfg.population);
  est.mc_draws = cfg.oracle_draws;
  est.protocol = protocol;
  est.observation = cfg.observation;
  est.prior_user_stratum = stratum_value;

  BiasOptions bo;
  bo.repeats = cfg.repeats;
  bo.bootstrap = cfg.bootstrap;
  bo.contrast = contrast_option(cfg.contrast);
  bo.stratum = stratum_value;
  const auto table = bias_table(cfg.world, anchors, protocol, est, bo);

  const auto text = format_bias_table(table);
  out << text;
  Artifacts a;
  a.add("bias.txt", text);
  a.add("bias.json", bias_json(table));
  a.add("bias_long.tsv", bias_long_tsv(table));
  RunManifest m;
  m.command = "compare";
  m.arguments = to_args(opts);
  m.params_digest = params_digest(cfg.world, cfg.observation);
  m.protocol_digest = digest_hex(serialize_protocol(protocol));
  m.designs = cfg.designs;
  m.master_seed = cfg.world.seed;
  return emit(output, m, a, out);
}

// ---- rerun ------------------------------------------------------------------

/// Replays a manifest with its recorded arguments and timestamp, then checks
/// every output digest against the record.
int cmd_rerun(const std::string& manifest_path, const OutputOptions& output, std::ostream& out, std::ostream& err) {
  if (output.out.empty()) throw UsageError("rerun requires --out");
  const auto recorded = parse_manifest(read_text_file(manifest_path), manifest_path);
  if (recorded.tool_version != tool_version())
    err << "warning: manifest written by version " << recorded.tool_version << ", running " << tool_version() << '\n';
  OutputOptions o = output;
  o.timestamp = recorded.created_utc;
  std::ostringstream sink;
  RunManifest produced;
  if (recorded.command == "simulate") produced = cmd_simulate(simulate_from_args(recorded.arguments), o, sink);
  else if (recorded.command == "identify") produced = cmd_identify(identify_from_args(recorded.arguments), o, sink);
  else if (recorded.command == "emulate") produced = cmd_emulate(emulate_from_args(recorded.arguments), o, sink);
  else if (recorded.command == "compare") produced = cmd_compare(compare_from_args(recorded.arguments), o, sink);
  else throw SchemaError(manifest_path, 0, "command", "cannot rerun '" + recorded.command + "'");

  int mismatches = 0;
  for (const auto& [name, digest] : recorded.outputs) {
    const auto it = produced.outputs.find(name);
    if (it == produced.outputs.end() || it->second != digest) {
      err << "mismatch: " << name << '\n';
      ++mismatches;
    }
  }
  if (produced.outputs.size() != recorded.outputs.size()) {
    err << "mismatch: output file sets differ\n";
    ++mismatches;
  }
  if (mismatches > 0) {
    err << "rerun differs from the manifest in " << mismatches << " place(s)\n";
    return 1;
  }
  out << "reproduced " << recorded.outputs.size() << " output files byte-identically in " << output.out << '\n';
  return kExitOk;
}

// ---- regenerate-goldens -------------------------------------------------------

std::string compute_goldens(const std::string& demo_dir) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json identify;
  auto verdict_row = [](const Dag& dag) {
    nlohmann::ordered_json row;
    for (Estimand e : {Estimand::Early, Estimand::Late, Estimand::Joint})
      row[std::string(to_string(e))] = check_identifiable(dag, e).identifiable;
    return row;
  };
  for (const char* g : {"fig3a", "fig3b", "fig3c"}) identify[g] = verdict_row(catalog_graph(g));
  Dag with_u = catalog_graph("fig3c");
  with_u.measured.insert("U");
  identify["fig3c_measured_U"] = verdict_row(with_u);
  j["identify"] = identify;

  auto null_world = preset("null");
  null_world.n_persons = 20000;
  const auto traj = simulate_cohort(null_world);
  const auto obs = observed_cohort(traj, ObservationParams{});
  j["null_summary_n20000_seed1"] = nlohmann::ordered_json::parse(dataset_summary_json(summarize_dataset(traj, obs)));

  const auto protocol = shipped_protocol("stop_or_go");
  const auto records = load_observed(demo_dir);
  const auto cohort = build_cohort(records, design_spec(Anchor::FirstPrenatalVisit, protocol), protocol);
  EstimationOptions eo;
  eo.bootstrap = 200;
  eo.seed = 1;
  j["demo_emulate_stop_or_go_4D"] = nlohmann::ordered_json::parse(estimates_json({estimate_effect(cohort, eo)}))[0];
  return j.dump(2) + "\n";
}

int cmd_regenerate_goldens(const std::string& path, const std::string& demo_dir, bool check, std::ostream& out) {
  const auto fresh = compute_goldens(demo_dir);
  const std::string old = fs::exists(path) ? read_text_file(path) : std::string();
  if (old == fresh) {
    out << "goldens unchanged: " << path << '\n';
    return kExitOk;
  }
  // Line diff; the JSON layout is fixed, so positional comparison suffices.
  const auto a = split(old, '\n');
  const auto b = split(fresh, '\n');
  out << "--- " << path << "\n+++ regenerated\n";
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const std::string* x = i < a.size() ? &a[i] : nullptr;
    const std::string* y = i < b.size() ? &b[i] : nullptr;
    if (x && y && *x == *y) continue;
    if (x) out << "- " << *x << '\n';
    if (y) out << "+ " << *y << '\n';
  }
  if (check) return 1;
  write_text_file(path, fresh, true);
  out << "updated " << path << '\n';
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Target trial emulation for pregnancy exposures: simulate, identify, emulate, compare."};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  OutputOptions output;
  auto add_output = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--out", output.out, "Output directory");
    if (required) opt->required();
    sub->add_flag("--force", output.force, "Overwrite existing output files");
  };

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate a world and write ground-truth and observed datasets");
  s->add_option("--config", sim.config, "Experiment config file");
  s->add_option("--preset", sim.preset, "Named preset instead of a config file (null, fig3a, fig3b, fig3c, prevalent_user)");
  s->add_option("--seed", sim.seed, "Override the master seed");
  s->add_option("--n", sim.n_persons, "Override the number of pregnancies");
  add_output(s, true);

  IdentifyOptions idf;
  auto* i = app.add_subcommand("identify", "Identifiability verdicts for a catalog graph or a DAG file");
  i->add_option("target", idf.target, "fig3a, fig3b, fig3c or a path to a DAG file")->required();
  i->add_option("--measure", idf.measure, "Extra nodes to treat as measured (comma separated)")->delimiter(',');
  add_output(i, false);

  EmulateOptions emu;
  auto* e = app.add_subcommand("emulate", "Run one design and protocol on a dataset directory");
  e->add_option("--data", emu.data, "Dataset directory written by simulate")->required();
  e->add_option("--protocol", emu.protocol, "stop_or_go, chap or a protocol file")->capture_default_str();
  e->add_option("--design", emu.design, "4A, 4B, 4C, 4D or 4E")->capture_default_str();
  e->add_option("--contrast", emu.contrast, "ITT_ANALOG, PER_PROTOCOL or protocol")->capture_default_str();
  e->add_option("--bootstrap", emu.bootstrap, "Bootstrap resamples")->capture_default_str();
  e->add_option("--seed", emu.seed, "Bootstrap seed")->capture_default_str();
  e->add_flag("--loss-or-outcome", emu.loss_or_outcome, "Sensitivity analysis: count pregnancy loss as an outcome event");
  add_output(e, false);

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Bias table of several designs against the oracle truth");
  c->add_option("--config", cmp.config, "Experiment config file");
  c->add_option("--preset", cmp.preset, "Named preset instead of a config file");
  c->add_option("--designs", cmp.designs, "Designs to compare (comma separated)")->delimiter(',');
  c->add_option("--repeats", cmp.repeats, "Simulation repeats");
  c->add_option("--bootstrap", cmp.bootstrap, "Bootstrap resamples per estimate (0 disables CIs)");
  c->add_option("--seed", cmp.seed, "Override the master seed");
  c->add_option("--n", cmp.n_persons, "Override the number of pregnancies per repeat");
  c->add_option("--stratum", cmp.stratum, "all, prior_user or non_user")->capture_default_str();
  add_output(c, false);

  std::string golden_path = "tests/golden/goldens.json";
  std::string demo_dir = "data/demo";
  bool check = false;
  auto* g = app.add_subcommand("regenerate-goldens", "Recompute golden values, print the diff, then overwrite");
  g->add_option("--path", golden_path, "Golden file")->capture_default_str();
  g->add_option("--demo-data", demo_dir, "Shipped demo dataset")->capture_default_str();
  g->add_flag("--check", check, "Print the diff and fail instead of overwriting");

  std::string manifest_path;
  auto* r = app.add_subcommand("rerun", "Replay a manifest and verify its outputs byte for byte");
  r->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  add_output(r, true);

  std::vector<const char*> argv{"pregtte"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (s->parsed()) cmd_simulate(sim, output, out);
  else if (i->parsed()) cmd_identify(idf, output, out);
  else if (e->parsed()) cmd_emulate(emu, output, out);
  else if (c->parsed()) cmd_compare(cmp, output, out);
  else if (g->parsed()) return cmd_regenerate_goldens(golden_path, demo_dir, check, out);
  else if (r->parsed()) return cmd_rerun(manifest_path, output, out, err);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& ex) {
    err << "schema error: " << ex.what() << '\n';
    return kExitSchema;
  } catch (const StructuralError& ex) {
    err << "structural error: " << ex.what() << '\n';
    return kExitSchema;
  } catch (const ParameterError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace pregtte::cli

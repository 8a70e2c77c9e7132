// Copyright 2026 The swapkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front end.  A config file holds one task object or {"tasks": [...]};
// `run` executes the tasks and emits one JSON record per run, `validate`
// reports basis sizes and memory use without computing anything.
//
// Exit status: 0 success, 2 config/parse problems (including task arity and
// k = 0), 3 dimension/cutoff errors, 4 numerical diagnostics.
//
// Determinism: records depend only on (config, seed); reruns are bit
// identical.  Multi-run tasks derive their per-run seeds as documented in
// the README (sweep entry i uses seed+i, the three hs_distance runs use
// seed+3i..seed+3i+2, spectrum trace j uses seed+j-2).

#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include "swapkit/analysis.hpp"
#include "swapkit/estimator.hpp"
#include "swapkit/io.hpp"
#include "swapkit/swap_oracle.hpp"

using nlohmann::json;
using namespace swapkit;

namespace {

struct Options {
  bool with_oracle = false;
  bool parallel = false;
  std::optional<std::uint64_t> seed_override;
  std::string output_dir;
};

struct TaskOutput {
  std::vector<std::string> records;
  std::vector<std::pair<std::string, std::string>> files;  // path, content
};

std::string resolve_path(const std::string& path, const Options& opt) {
  if (opt.output_dir.empty() || path.empty() || path.front() == '/')
    return path;
  return opt.output_dir + "/" + path;
}

[[noreturn]] void config_fail(const std::string& task, const std::string& why) {
  throw parse_error("task '" + task + "': " + why);
}

int require_int(const json& cfg, const char* key, const std::string& task) {
  if (!cfg.contains(key) || !cfg[key].is_number_integer())
    config_fail(task, std::string("missing integer field '") + key + "'");
  return cfg[key].get<int>();
}

int parse_k(const json& cfg, const std::string& task) {
  if (!cfg.contains("k")) return 1;
  if (!cfg["k"].is_number_integer() || cfg["k"].get<int>() < 1)
    config_fail(task, "k must be an integer >= 1");
  return cfg["k"].get<int>();
}

void require_k_one(const json& cfg, const std::string& task) {
  if (parse_k(cfg, task) != 1)
    config_fail(task, "k is fixed to 1 for this task; use 'moments' for powers");
}

void require_two_registers(const json& cfg, const std::string& task) {
  if (cfg.contains("N") &&
      (!cfg["N"].is_number_integer() || cfg["N"].get<int>() != 2))
    config_fail(task, "operates on two registers; omit N or set it to 2");
}

std::uint64_t task_seed(const json& cfg, const Options& opt,
                        const std::string& task) {
  if (opt.seed_override) return *opt.seed_override;
  if (!cfg.contains("seed")) return 0;
  if (!cfg["seed"].is_number_integer() ||
      (cfg["seed"].is_number_integer() && !cfg["seed"].is_number_unsigned() &&
       cfg["seed"].get<long long>() < 0))
    config_fail(task, "seed must be a nonnegative integer");
  return cfg["seed"].get<std::uint64_t>();
}

struct ShotPlan {
  bool exact = true;
  bool sweep = false;
  std::vector<std::uint64_t> entries;
};

ShotPlan parse_shots(const json& cfg, const std::string& task) {
  ShotPlan plan;
  if (!cfg.contains("shots")) return plan;
  const json& s = cfg["shots"];
  auto one = [&](const json& v) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
      config_fail(task, "shot counts must be positive integers");
    plan.entries.push_back(v.get<std::uint64_t>());
  };
  if (s.is_string()) {
    if (s.get<std::string>() != "exact")
      config_fail(task, "shots must be \"exact\", an integer, or an array");
  } else if (s.is_number_integer()) {
    plan.exact = false;
    one(s);
  } else if (s.is_array() && !s.empty()) {
    plan.exact = false;
    plan.sweep = true;
    for (const auto& v : s) one(v);
  } else {
    config_fail(task, "shots must be \"exact\", an integer, or an array");
  }
  return plan;
}

std::string histogram_mode(const json& cfg, const std::string& task,
                           bool supported) {
  const std::string mode = cfg.value("histogram", "none");
  if (mode != "none" && mode != "marginal" && mode != "full")
    config_fail(task, "histogram must be none, marginal, or full");
  if (mode != "none" && !supported)
    config_fail(task, "histogram is not available for multi-run tasks");
  return mode;
}

MultiModeState load_state_entry(const json& entry) {
  if (entry.is_string()) return load_state_file(entry.get<std::string>());
  if (entry.is_object() && entry.contains("file")) {
    if (!entry["file"].is_string())
      throw parse_error("state file reference must be a string path");
    return load_state_file(entry["file"].get<std::string>());
  }
  return parse_state_spec(entry);
}

std::vector<json> state_entries(const json& cfg, const std::string& task) {
  std::vector<json> out;
  if (cfg.contains("state")) out.push_back(cfg["state"]);
  if (cfg.contains("states")) {
    if (!cfg["states"].is_array())
      config_fail(task, "'states' must be an array");
    for (const auto& e : cfg["states"]) out.push_back(e);
  }
  return out;
}

std::vector<json> require_states(const json& cfg, const std::string& task,
                                 std::size_t arity) {
  auto entries = state_entries(cfg, task);
  if (entries.size() != arity)
    config_fail(task, "needs exactly " + std::to_string(arity) +
                          " state(s), got " + std::to_string(entries.size()));
  return entries;
}

MultiModeState tensor_power(const MultiModeState& s, int copies) {
  MultiModeState joint = s;
  for (int c = 1; c < copies; ++c) joint = tensor(joint, s);
  return joint;
}

// ---------------------------------------------------------------------------
// Shared emitter for every task that is one pipeline run per shots entry.

struct PipelineSpec {
  std::string name;
  std::optional<MultiModeState> joint;
  int oscillators = 2;
  int k = 1;
  // Theory forces a real value when the input is an N-fold identical
  // product; sampled runs of such tasks get an imag_anomalous flag.
  bool imag_eligible = false;
  std::optional<Complex> oracle;
  std::function<void(RecordWriter&, const EstimateResult&)> extra;
};

TaskOutput emit_pipeline_task(const json& cfg, const Options& opt,
                              int task_index, PipelineSpec spec) {
  TaskOutput out;
  const MultiModeState& joint = *spec.joint;
  const ShotPlan plan = parse_shots(cfg, spec.name);
  const std::uint64_t seed = task_seed(cfg, opt, spec.name);
  const std::string hist = histogram_mode(cfg, spec.name, true);
  if (joint.mode_count() % spec.oscillators != 0)
    throw std::invalid_argument(
        "task '" + spec.name + "': joint state has " +
        std::to_string(joint.mode_count()) + " modes, not divisible into " +
        std::to_string(spec.oscillators) + " registers");
  const int slot_width = joint.mode_count() / spec.oscillators;

  PipelineOptions popts;
  popts.oscillators = spec.oscillators;
  popts.k = spec.k;
  popts.lift = std::make_shared<const FockLift>(
      slot_interferometer(spec.oscillators, slot_width), joint.basis_ptr());

  std::optional<Complex> reference;
  if (plan.sweep) {
    PipelineOptions exact = popts;
    reference = run_pipeline(joint, exact).estimate.value;
  }

  std::vector<std::array<double, 4>> sweep_rows;
  auto emit_one = [&](std::optional<std::uint64_t> shots,
                      std::uint64_t run_seed) {
    PipelineOptions ropts = popts;
    ropts.shots = shots;
    ropts.seed = run_seed;
    const PipelineRun run = run_pipeline(joint, ropts);
    const EstimateResult& est = run.estimate;

    RecordWriter rec;
    rec.add_string("task", spec.name);
    rec.add_int("N", spec.oscillators);
    rec.add_int("k", spec.k);
    rec.add_string("method", est.exact() ? "exact" : "sampled");
    rec.add_uint("shots", est.shots);
    rec.add_uint("seed", run_seed);
    rec.add_float("value_re", est.value.real());
    rec.add_float("value_im", est.value.imag());
    rec.add_float("stderr_re", est.std_error_re);
    rec.add_float("stderr_im", est.std_error_im);
    rec.add_float("truncation_error", est.truncation_error);
    if (spec.imag_eligible && !est.exact())
      rec.add_bool("imag_anomalous",
                   std::abs(est.value.imag()) > 5.0 * est.std_error_im);
    if (spec.extra) spec.extra(rec, est);
    if (opt.with_oracle && spec.oracle) {
      rec.add_float("oracle_re", spec.oracle->real());
      rec.add_float("oracle_im", spec.oracle->imag());
      rec.add_float("oracle_residual", std::abs(est.value - *spec.oracle));
    }
    if (hist != "none") {
      const JointDistribution& src =
          run.empirical ? *run.empirical : run.distribution;
      if (hist == "full") {
        rec.add_raw("histogram", render_histogram(src.outcomes));
      } else {
        std::vector<int> drop(static_cast<std::size_t>(slot_width));
        for (int m = 0; m < slot_width; ++m)
          drop[static_cast<std::size_t>(m)] = m;
        rec.add_raw("histogram",
                    render_histogram(marginalize(src, drop).outcomes));
      }
    }
    out.records.push_back(rec.line());
    if (plan.sweep && shots)
      sweep_rows.push_back({static_cast<double>(*shots),
                            std::abs(est.value - *reference),
                            est.std_error_re, est.std_error_im});
  };

  if (plan.exact) {
    emit_one(std::nullopt, seed);
  } else {
    for (std::size_t i = 0; i < plan.entries.size(); ++i)
      emit_one(plan.entries[i], seed + i);
  }

  if (plan.sweep) {
    std::string csv = "shots,abs_error,stderr_re,stderr_im\n";
    for (const auto& row : sweep_rows) {
      csv += format_float(row[0]);
      for (int c = 1; c < 4; ++c) csv += "," + format_float(row[c]);
      csv += "\n";
    }
    const std::string path = resolve_path(
        cfg.value("plot", "sweep_" + std::to_string(task_index) + ".csv"),
        opt);
    out.files.emplace_back(path, std::move(csv));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tasks.

TaskOutput run_overlap(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "overlap", 2);
  require_two_registers(cfg, "overlap");
  require_k_one(cfg, "overlap");
  const MultiModeState a = load_state_entry(entries[0]);
  const MultiModeState b = load_state_entry(entries[1]);
  PipelineSpec spec;
  spec.name = "overlap";
  spec.imag_eligible = (entries[0] == entries[1]);
  if (opt.with_oracle) spec.oracle = Complex(overlap(a, b), 0.0);
  spec.joint = tensor(a, b);
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_purity(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "purity", 1);
  require_two_registers(cfg, "purity");
  require_k_one(cfg, "purity");
  const MultiModeState s = load_state_entry(entries[0]);
  PipelineSpec spec;
  spec.name = "purity";
  spec.imag_eligible = true;
  if (opt.with_oracle) spec.oracle = Complex(purity(s), 0.0);
  spec.joint = tensor(s, s);
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_fidelity(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "fidelity", 2);
  require_two_registers(cfg, "fidelity");
  require_k_one(cfg, "fidelity");
  const MultiModeState alpha = load_state_entry(entries[0]);
  const MultiModeState rho = load_state_entry(entries[1]);
  if (!alpha.is_pure())
    throw std::invalid_argument(
        "task 'fidelity': the first (reference) state must be pure");
  PipelineSpec spec;
  spec.name = "fidelity";
  spec.imag_eligible = (entries[0] == entries[1]);
  if (opt.with_oracle) spec.oracle = Complex(fidelity_pure(alpha, rho), 0.0);
  spec.joint = tensor(alpha, rho);
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_witness(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "witness", 1);
  require_two_registers(cfg, "witness");
  require_k_one(cfg, "witness");
  const MultiModeState joint = load_state_entry(entries[0]);
  PipelineSpec spec;
  spec.name = "witness";
  if (opt.with_oracle)
    spec.oracle = Complex(witness_verdict(joint).value, 0.0);
  spec.extra = [](RecordWriter& rec, const EstimateResult& est) {
    const double tol = est.exact() ? 1e-9 : 3.0 * est.std_error_re;
    const WitnessResult wr = witness_verdict_value(est.value.real(), tol);
    rec.add_string("verdict",
                   wr.verdict == WitnessVerdict::WitnessedEntangled
                       ? "witnessed_entangled"
                       : "inconclusive");
    rec.add_float("tolerance", tol);
  };
  spec.joint = joint;
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_power_trace(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "power_trace", 1);
  require_k_one(cfg, "power_trace");
  const int n = require_int(cfg, "N", "power_trace");
  if (n < 2) config_fail("power_trace", "N must be >= 2");
  const MultiModeState s = load_state_entry(entries[0]);
  PipelineSpec spec;
  spec.name = "power_trace";
  spec.oscillators = n;
  spec.imag_eligible = true;
  if (opt.with_oracle) spec.oracle = Complex(power_trace(s, n), 0.0);
  spec.joint = tensor_power(s, n);
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_moments(const json& cfg, const Options& opt, int index) {
  const int n = cfg.contains("N") ? require_int(cfg, "N", "moments") : 2;
  if (n < 2) config_fail("moments", "N must be >= 2");
  const int k = parse_k(cfg, "moments");
  const auto entries = state_entries(cfg, "moments");
  PipelineSpec spec;
  spec.name = "moments";
  spec.oscillators = n;
  spec.k = k;
  if (entries.size() == 1) {
    spec.joint = load_state_entry(entries[0]);
  } else if (static_cast<int>(entries.size()) == n) {
    MultiModeState joint = load_state_entry(entries[0]);
    bool identical = true;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      identical = identical && (entries[i] == entries[0]);
      joint = tensor(joint, load_state_entry(entries[i]));
    }
    spec.imag_eligible = identical;
    spec.joint = std::move(joint);
  } else {
    config_fail("moments", "needs one joint state or exactly N register states");
  }
  if (opt.with_oracle) {
    if (spec.joint->mode_count() % n != 0)
      throw std::invalid_argument(
          "task 'moments': joint state has " +
          std::to_string(spec.joint->mode_count()) +
          " modes, not divisible into " + std::to_string(n) + " registers");
    const SwapOperator v =
        build_swap(spec.joint->cutoff(), n, spec.joint->mode_count() / n);
    spec.oracle = expect_swap_direct(*spec.joint, v.power(k));
  }
  return emit_pipeline_task(cfg, opt, index, std::move(spec));
}

TaskOutput run_hs_distance(const json& cfg, const Options& opt, int index) {
  const auto entries = require_states(cfg, "hs_distance", 2);
  require_two_registers(cfg, "hs_distance");
  require_k_one(cfg, "hs_distance");
  histogram_mode(cfg, "hs_distance", false);
  const ShotPlan plan = parse_shots(cfg, "hs_distance");
  const std::uint64_t seed = task_seed(cfg, opt, "hs_distance");
  const MultiModeState a = load_state_entry(entries[0]);
  const MultiModeState b = load_state_entry(entries[1]);
  if (!(a.cutoff() == b.cutoff()))
    throw std::invalid_argument(
        "task 'hs_distance': states live on different bases");

  const MultiModeState joints[3] = {tensor(a, a), tensor(b, b), tensor(a, b)};
  PipelineOptions base;
  base.lift = std::make_shared<const FockLift>(slot_interferometer(2, a.mode_count()),
                                               joints[0].basis_ptr());
  double truncation = 0.0;
  for (const auto& j : joints)
    truncation = std::max(truncation, j.truncation_error());

  auto measure = [&](std::optional<std::uint64_t> shots, std::uint64_t s0,
                     double& value, double& stderr_out) {
    double se_sq = 0.0;
    double parts[3];
    for (int r = 0; r < 3; ++r) {
      PipelineOptions ropts = base;
      ropts.shots = shots;
      ropts.seed = s0 + static_cast<std::uint64_t>(r);
      const EstimateResult est = run_pipeline(joints[r], ropts).estimate;
      parts[r] = est.value.real();
      const double scale = (r == 2) ? 2.0 : 1.0;
      se_sq += scale * scale * est.std_error_re * est.std_error_re;
    }
    value = parts[0] + parts[1] - 2.0 * parts[2];
    stderr_out = std::sqrt(se_sq);
  };

  TaskOutput out;
  std::optional<double> reference;
  if (plan.sweep) {
    double v, se;
    measure(std::nullopt, seed, v, se);
    reference = v;
  }
  std::vector<std::array<double, 4>> sweep_rows;
  auto emit_one = [&](std::optional<std::uint64_t> shots,
                      std::uint64_t run_seed) {
    double value, se;
    measure(shots, run_seed, value, se);
    RecordWriter rec;
    rec.add_string("task", "hs_distance");
    rec.add_int("N", 2);
    rec.add_int("k", 1);
    rec.add_string("method", shots ? "sampled" : "exact");
    rec.add_uint("shots", shots ? *shots : 0);
    rec.add_uint("seed", run_seed);
    rec.add_float("value_re", value);
    rec.add_float("value_im", 0.0);
    rec.add_float("stderr_re", se);
    rec.add_float("stderr_im", 0.0);
    rec.add_float("truncation_error", truncation);
    if (opt.with_oracle) {
      const double oracle = hs_distance(a, b);
      rec.add_float("oracle_re", oracle);
      rec.add_float("oracle_im", 0.0);
      rec.add_float("oracle_residual", std::abs(value - oracle));
    }
    out.records.push_back(rec.line());
    if (plan.sweep && shots)
      sweep_rows.push_back({static_cast<double>(*shots),
                            std::abs(value - *reference), se, 0.0});
  };

  if (plan.exact) {
    emit_one(std::nullopt, seed);
  } else {
    for (std::size_t i = 0; i < plan.entries.size(); ++i)
      emit_one(plan.entries[i], seed + 3 * i);
  }
  if (plan.sweep) {
    std::string csv = "shots,abs_error,stderr_re,stderr_im\n";
    for (const auto& row : sweep_rows) {
      csv += format_float(row[0]);
      for (int c = 1; c < 4; ++c) csv += "," + format_float(row[c]);
      csv += "\n";
    }
    out.files.emplace_back(
        resolve_path(
            cfg.value("plot", "sweep_" + std::to_string(index) + ".csv"), opt),
        std::move(csv));
  }
  return out;
}

TaskOutput run_spectrum(const json& cfg, const Options& opt, int index) {
  (void)index;
  const auto entries = require_states(cfg, "spectrum", 1);
  require_k_one(cfg, "spectrum");
  histogram_mode(cfg, "spectrum", false);
  const int d = require_int(cfg, "d", "spectrum");
  if (d < 2) config_fail("spectrum", "d must be >= 2");
  const ShotPlan plan = parse_shots(cfg, "spectrum");
  if (plan.sweep)
    config_fail("spectrum", "takes a single shot count, not a sweep");
  const std::uint64_t seed = task_seed(cfg, opt, "spectrum");
  const MultiModeState s = load_state_entry(entries[0]);

  std::vector<double> traces, sigmas;
  double truncation = 0.0;
  for (int j = 2; j <= d; ++j) {
    const MultiModeState joint = tensor_power(s, j);
    PipelineOptions popts;
    popts.oscillators = j;
    if (!plan.exact) {
      popts.shots = plan.entries.front();
      popts.seed = seed + static_cast<std::uint64_t>(j - 2);
    }
    const EstimateResult est = run_pipeline(joint, popts).estimate;
    traces.push_back(est.value.real());
    sigmas.push_back(est.std_error_re);
    truncation = std::max(truncation, est.truncation_error);
  }

  SpectrumOptions sopts;
  double sigma_sum = 0.0;
  for (double v : sigmas) sigma_sum += v;
  if (cfg.contains("imag_tol"))
    sopts.imag_tol = cfg["imag_tol"].get<double>();
  else if (!plan.exact)
    sopts.imag_tol += 3.0 * sigma_sum;
  if (cfg.contains("range_tol"))
    sopts.range_tol = cfg["range_tol"].get<double>();
  else if (!plan.exact)
    sopts.range_tol += 3.0 * sigma_sum;

  const Spectrum spectrum = spectrum_from_power_traces(traces, d, sopts);

  RecordWriter rec;
  rec.add_string("task", "spectrum");
  rec.add_int("d", d);
  rec.add_string("method", plan.exact ? "exact" : "sampled");
  rec.add_uint("shots", plan.exact ? 0 : plan.entries.front());
  rec.add_uint("seed", seed);
  rec.add_float_array("traces", traces);
  if (!plan.exact) rec.add_float_array("trace_stderr", sigmas);
  rec.add_float_array("eigenvalues", spectrum.eigenvalues);
  rec.add_float("residual", spectrum.residual);
  rec.add_float("clipped_mass", spectrum.clipped_mass);
  rec.add_float("truncation_error", truncation);
  if (opt.with_oracle) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(to_density(s).rho(),
                                                 Eigen::EigenvaluesOnly);
    std::vector<double> eigs(solver.eigenvalues().data(),
                             solver.eigenvalues().data() +
                                 solver.eigenvalues().size());
    std::sort(eigs.begin(), eigs.end(), std::greater<double>());
    eigs.resize(static_cast<std::size_t>(d), 0.0);
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
      worst = std::max(worst, std::abs(spectrum.eigenvalues[static_cast<
                                           std::size_t>(i)] -
                                       eigs[static_cast<std::size_t>(i)]));
    rec.add_float_array("oracle_eigenvalues", eigs);
    rec.add_float("oracle_residual", worst);
  }
  TaskOutput out;
  out.records.push_back(rec.line());
  return out;
}

Matrix parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw parse_error("compile: 'matrix' must be a nonempty array of rows");
  const int n = static_cast<int>(rows.size());
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!rows[static_cast<std::size_t>(r)].is_array() ||
        static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw parse_error("compile: matrix rows must all have the same length");
    for (int c = 0; c < n; ++c)
      m(r, c) = detail::parse_complex(
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
          "matrix entry");
  }
  return m;
}

TaskOutput run_compile(const json& cfg, const Options& opt, int index) {
  std::optional<ModeMatrix> u;
  if (cfg.contains("matrix")) {
    u.emplace(parse_matrix(cfg["matrix"]));
  } else {
    const int n = require_int(cfg, "N", "compile");
    if (n < 2) config_fail("compile", "N must be >= 2");
    u.emplace(dft_matrix(n));
  }
  const ReckPlan plan = reck_decompose(*u);
  const double residual =
      inf_norm(reck_reconstruct(plan).entries() - u->entries());
  const std::string path = resolve_path(
      cfg.value("circuit_file", "circuit_" + std::to_string(index) + ".txt"),
      opt);
  std::ostringstream body;
  write_circuit(body, plan);

  RecordWriter rec;
  rec.add_string("task", "compile");
  rec.add_int("dim", plan.dim);
  rec.add_int("rotations", plan.rotation_count());
  rec.add_string("circuit_file", path);
  rec.add_float("residual", residual);

  TaskOutput out;
  out.records.push_back(rec.line());
  out.files.emplace_back(path, body.str());
  return out;
}

TaskOutput dispatch_task(const json& cfg, const Options& opt, int index) {
  if (!cfg.is_object()) throw parse_error("each task must be a JSON object");
  if (!cfg.contains("task") || !cfg["task"].is_string())
    throw parse_error("task " + std::to_string(index) +
                      ": missing string field 'task'");
  const std::string task = cfg["task"].get<std::string>();
  if (task == "overlap") return run_overlap(cfg, opt, index);
  if (task == "purity") return run_purity(cfg, opt, index);
  if (task == "fidelity") return run_fidelity(cfg, opt, index);
  if (task == "witness") return run_witness(cfg, opt, index);
  if (task == "power_trace") return run_power_trace(cfg, opt, index);
  if (task == "moments") return run_moments(cfg, opt, index);
  if (task == "spectrum") return run_spectrum(cfg, opt, index);
  if (task == "hs_distance") return run_hs_distance(cfg, opt, index);
  if (task == "compile") return run_compile(cfg, opt, index);
  throw parse_error("unknown task '" + task + "'");
}

// ---------------------------------------------------------------------------
// validate: dimension and memory dry run, no state construction.

CutoffConfig entry_dims(const json& entry) {
  json spec = entry;
  if (entry.is_string()) spec = load_json_file(entry.get<std::string>());
  else if (entry.is_object() && entry.contains("file")) {
    if (!entry["file"].is_string())
      throw parse_error("state file reference must be a string path");
    spec = load_json_file(entry["file"].get<std::string>());
  }
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
    throw parse_error("state spec: missing string field 'kind'");
  const std::string kind = spec["kind"].get<std::string>();
  if (kind != "coherent" && kind != "fock" && kind != "pure" && kind != "mixed")
    throw parse_error("state spec: unknown kind '" + kind + "'");
  if (kind == "coherent") {
    if (!spec.contains("n_max") || !spec["n_max"].is_number_integer())
      throw parse_error("state spec: coherent state needs integer 'n_max'");
    return CutoffConfig{spec["n_max"].get<int>(), 1};
  }
  CutoffConfig c;
  c.max_total_photons = require_int(spec, "n_max", "state spec");
  c.mode_count = require_int(spec, "mode_count", "state spec");
  return c;
}

CutoffConfig joint_dims_for(const json& cfg, const std::string& task) {
  const auto entries = state_entries(cfg, task);
  auto sum_dims = [](const CutoffConfig& a, const CutoffConfig& b) {
    return CutoffConfig{a.max_total_photons + b.max_total_photons,
                        a.mode_count + b.mode_count};
  };
  auto power_dims = [](const CutoffConfig& c, int copies) {
    return CutoffConfig{c.max_total_photons * copies, c.mode_count * copies};
  };
  if (task == "overlap" || task == "fidelity" || task == "hs_distance") {
    if (entries.size() != 2) config_fail(task, "needs exactly 2 states");
    return sum_dims(entry_dims(entries[0]), entry_dims(entries[1]));
  }
  if (task == "purity") {
    if (entries.size() != 1) config_fail(task, "needs exactly 1 state");
    return power_dims(entry_dims(entries[0]), 2);
  }
  if (task == "witness") {
    if (entries.size() != 1) config_fail(task, "needs exactly 1 state");
    return entry_dims(entries[0]);
  }
  if (task == "power_trace") {
    if (entries.size() != 1) config_fail(task, "needs exactly 1 state");
    return power_dims(entry_dims(entries[0]),
                      require_int(cfg, "N", task));
  }
  if (task == "spectrum") {
    if (entries.size() != 1) config_fail(task, "needs exactly 1 state");
    return power_dims(entry_dims(entries[0]), require_int(cfg, "d", task));
  }
  if (task == "moments") {
    const int n = cfg.contains("N") ? require_int(cfg, "N", task) : 2;
    if (entries.size() == 1) return entry_dims(entries[0]);
    if (static_cast<int>(entries.size()) == n) {
      CutoffConfig c = entry_dims(entries[0]);
      for (std::size_t i = 1; i < entries.size(); ++i)
        c = sum_dims(c, entry_dims(entries[i]));
      return c;
    }
    config_fail(task, "needs one joint state or exactly N register states");
  }
  config_fail(task, "validate does not know this task");
}

void validate_task(const json& cfg, int index, std::ostream& out) {
  if (!cfg.is_object()) throw parse_error("each task must be a JSON object");
  if (!cfg.contains("task") || !cfg["task"].is_string())
    throw parse_error("task " + std::to_string(index) +
                      ": missing string field 'task'");
  const std::string task = cfg["task"].get<std::string>();
  parse_k(cfg, task);
  parse_shots(cfg, task);
  out << "task " << index << ": " << task << "\n";

  if (task == "compile") {
    const int n = cfg.contains("matrix")
                      ? static_cast<int>(cfg["matrix"].size())
                      : require_int(cfg, "N", task);
    out << "  mode matrix: " << n << "x" << n << "\n";
    out << "  rotation bound: " << n * (n - 1) / 2 << "\n";
    return;
  }

  const CutoffConfig joint = joint_dims_for(cfg, task);
  joint.validate();
  const BasisSet basis(joint);
  out << "  joint space: " << joint.mode_count << " modes, n_max "
      << joint.max_total_photons << "\n";
  long long lift_entries = 0;
  for (int s = 0; s < basis.sector_count(); ++s) {
    out << "  sector " << s << ": " << basis.sector_dim(s) << " states\n";
    lift_entries += static_cast<long long>(basis.sector_dim(s)) *
                    static_cast<long long>(basis.sector_dim(s));
  }
  const long long dim = basis.dim();
  out << "  total: " << dim << " states\n";
  out << "  amplitude vector: " << 16 * dim << " bytes; density matrix: "
      << 16 * dim * dim << " bytes; lift blocks: " << 16 * lift_entries
      << " bytes\n";
}

// ---------------------------------------------------------------------------

std::vector<json> config_tasks(const json& cfg) {
  if (!cfg.is_object()) throw parse_error("config root must be a JSON object");
  std::vector<json> tasks;
  if (cfg.contains("tasks")) {
    if (!cfg["tasks"].is_array() || cfg["tasks"].empty())
      throw parse_error("'tasks' must be a nonempty array");
    for (const auto& t : cfg["tasks"]) tasks.push_back(t);
  } else {
    tasks.push_back(cfg);
  }
  return tasks;
}

int run_command(const std::string& config_path, const Options& opt) {
  const json cfg = load_json_file(config_path);
  const std::vector<json> tasks = config_tasks(cfg);

  std::vector<TaskOutput> outputs(tasks.size());
  if (opt.parallel && tasks.size() > 1) {
    std::vector<std::future<TaskOutput>> futures;
    futures.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&tasks, &opt, i]() {
        return dispatch_task(tasks[i], opt, static_cast<int>(i));
      }));
    for (std::size_t i = 0; i < tasks.size(); ++i)
      outputs[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      outputs[i] = dispatch_task(tasks[i], opt, static_cast<int>(i));
  }

  for (const TaskOutput& o : outputs)
    for (const auto& [path, content] : o.files) {
      std::ofstream f(path);
      if (!f) throw parse_error("cannot open output file: " + path);
      f << content;
    }

  std::string results_path;
  if (cfg.contains("output")) {
    if (!cfg["output"].is_string())
      throw parse_error("'output' must be a string path");
    results_path = resolve_path(cfg["output"].get<std::string>(), opt);
  }
  if (results_path.empty()) {
    for (const TaskOutput& o : outputs)
      for (const std::string& r : o.records) std::cout << r << "\n";
  } else {
    std::ofstream f(results_path);
    if (!f) throw parse_error("cannot open results file: " + results_path);
    for (const TaskOutput& o : outputs)
      for (const std::string& r : o.records) f << r << "\n";
  }
  return 0;
}

int validate_command(const std::string& config_path) {
  const json cfg = load_json_file(config_path);
  const std::vector<json> tasks = config_tasks(cfg);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    validate_task(tasks[i], static_cast<int>(i), std::cout);
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interferometric estimator for cyclic-permutation expectation "
               "values and derived functionals"};
  app.require_subcommand(1);

  Options opt;
  std::string config_path;
  std::uint64_t seed_value = 0;

  CLI::App* run = app.add_subcommand("run", "execute the tasks in a config");
  run->add_option("config", config_path, "config file (JSON)")->required();
  run->add_flag("--with-oracle", opt.with_oracle,
                "also compute direct-evaluation oracle values and residuals");
  run->add_flag("--parallel", opt.parallel, "run batch tasks concurrently");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_value, "override every task seed");
  run->add_option("--output", opt.output_dir,
                  "directory for relative output paths");

  CLI::App* validate =
      app.add_subcommand("validate", "dimension/memory dry run, no computation");
  validate->add_option("config", config_path, "config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) opt.seed_override = seed_value;

  try {
    if (run->parsed()) return run_command(config_path, opt);
    return validate_command(config_path);
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

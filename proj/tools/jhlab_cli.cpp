// jhlab: batch front end for the JH / sigma / counterexample experiments.
//
// Exit status: 0 success, 1 self-check failure, 2 input error.

#include <CLI11.hpp>

#include <jhlab/io.hpp>
#include <jhlab/jhlab.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace jhlab;
using io::json;

constexpr int kOk = 0;
constexpr int kSelfCheckFailed = 1;
constexpr int kInputError = 2;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    io::write_atomic(out_path, content);
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::invalid_input, "malformed size list '" + text + "'");
    out.push_back(std::stoul(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

// ---------------------------------------------------------------- jh-norm

struct JhNormArgs {
  std::string input;
  bool floating = false;
  std::string out;
};

template <Scalar S>
int run_jh_norm(const JhNormArgs& a) {
  auto x = io::tree_vector_from_json<S>(io::parse_json(io::read_file(a.input)));
  emit(a.out, format_scalar(jh_norm(x)) + "\n");
  return kOk;
}

// ---------------------------------------------------------------- sigma

struct SigmaArgs {
  std::string input;
  bool heuristic = false;
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
  std::string transform = "none";
  bool also_E = false;
  bool floating = false;
  std::optional<std::size_t> check_lemma1;
  std::string out;
};

template <Scalar S>
int run_sigma(const SigmaArgs& a) {
  Matrix<S> m = io::matrix_from_csv<S>(io::read_file(a.input));
  if (a.transform == "E")
    m = transform_E(m);
  else if (a.transform == "eps")
    m = hadamard(kp_sign_pattern<S>(m.size()), m);
  else if (a.transform == "triangle")
    m = main_triangle_projection(m);
  else if (a.transform == "conjugate")
    m = conjugate_by_permutation(m, lemma1_permutation(m.size()));
  else if (a.transform != "none")
    throw Error(ErrorKind::invalid_input, "unknown transform '" + a.transform + "'");

  auto value = [&](const Matrix<S>& mat) {
    if (a.heuristic) return format_scalar(sigma_heuristic(mat, a.restarts, a.seed)) + " lower-bound";
    return format_scalar(sigma_exact(mat));
  };
  std::string out = value(m) + "\n";
  if (a.also_E) out += value(transform_E(m)) + "\n";
  emit(a.out, out);
  return kOk;
}

// ---------------------------------------------------------------- growth

struct GrowthArgs {
  std::string family = "hilbert";
  std::string sizes = "4,8,16";
  bool exact = false;
  bool heuristic = false;
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
  bool no_fit = false;
  bool floating = false;
  std::string out;
};

template <Scalar S>
int run_growth(const GrowthArgs& a) {
  const auto sizes = parse_size_list(a.sizes);
  const SweepMode mode = a.exact ? SweepMode::exact : a.heuristic ? SweepMode::heuristic : SweepMode::automatic;
  const bool want_fit = !a.no_fit && sizes.size() >= 2;
  if (want_fit) {
    const Exactness first = resolve_mode(mode, sizes.front());
    for (std::size_t n : sizes)
      if (resolve_mode(mode, n) != first)
        throw Error(ErrorKind::invalid_input, "sizes mix exact and heuristic evaluation in one slope fit; pass --no-fit or a single mode");
  }
  const HeuristicOptions h{a.restarts, a.seed};
  auto records = growth_sweep<S>(a.family, sizes, mode, h);

  std::vector<std::pair<std::string, std::string>> header{
      {"command", "growth"},
      {"family", a.family},
      {"sizes", join(sizes)},
      {"mode", a.exact ? "exact" : a.heuristic ? "heuristic" : "auto"},
      {"scalar", std::string(scalar_traits<S>::name)},
      {"restarts", std::to_string(a.restarts)},
      {"seed", std::to_string(a.seed)},
      {"log", "natural"},
  };
  std::vector<GrowthRecord<S>> fit_records;
  for (const auto& r : records)
    if (r.n >= 2) fit_records.push_back(r);
  if (want_fit && fit_records.size() >= 2)
    header.emplace_back("slope_vs_log_n", scalar_traits<double>::to_string(fit_log_slope<S>(fit_records)));
  emit(a.out, io::growth_csv(records, header));
  return kOk;
}

// ---------------------------------------------------------------- counterexample

struct CounterexampleArgs {
  std::string config;
  std::size_t k_max = 0;
  std::string weights = "uniform";
  std::string k_hypothesis;
  std::string r_list;
  std::string schedule = "random";
  std::string family = "hilbert";
  std::uint64_t seed = 1;
  bool corrupt_xi = false;
  std::string out;
};

struct ResolvedCounterexample {
  std::size_t k_max = 0;
  LevelRule rule = linear_levels();
  json n_rule = 2;
  std::vector<std::size_t> r_list;
  std::vector<std::size_t> cut_points;
  std::string weights;
  std::string schedule;
  std::string family;
  std::uint64_t seed = 1;
  std::optional<Rational> k_hypothesis;
};

ResolvedCounterexample resolve(const CounterexampleArgs& a, const CLI::App& cmd) {
  ResolvedCounterexample c;
  json cfg = json::object();
  if (!a.config.empty()) {
    cfg = io::parse_json(io::read_file(a.config));
    if (!cfg.is_object()) throw Error(ErrorKind::invalid_input, "counterexample config must be a JSON object");
  }
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  auto sizes_from = [](const json& v, const char* what) {
    if (!v.is_array()) throw Error(ErrorKind::invalid_input, std::string(what) + " must be an array of positive integers");
    std::vector<std::size_t> out;
    for (const json& e : v) {
      if (!e.is_number_unsigned()) throw Error(ErrorKind::invalid_input, std::string(what) + " must hold positive integers");
      out.push_back(e.get<std::size_t>());
    }
    return out;
  };

  c.weights = given("--weights") ? a.weights : cfg.value("weights", a.weights);
  c.schedule = given("--schedule") ? a.schedule : cfg.value("schedule", a.schedule);
  c.family = given("--family") ? a.family : cfg.value("family", a.family);
  c.seed = given("--seed") ? a.seed : cfg.value("seed", a.seed);

  if (cfg.contains("n_rule")) {
    c.n_rule = cfg["n_rule"];
    if (c.n_rule.is_number_unsigned())
      c.rule = linear_levels(c.n_rule.get<std::size_t>());
    else
      c.rule = explicit_levels(sizes_from(c.n_rule, "n_rule"));
  }

  if (given("--r-list"))
    c.r_list = parse_size_list(a.r_list);
  else if (cfg.contains("r_list"))
    c.r_list = sizes_from(cfg["r_list"], "r_list");
  for (std::size_t r : c.r_list)
    if (r == 0) throw Error(ErrorKind::invalid_input, "r values start at 1");

  if (cfg.contains("cut_points")) c.cut_points = sizes_from(cfg["cut_points"], "cut_points");

  std::size_t k_max = given("--k-max") ? a.k_max : cfg.value("k_max", std::size_t{0});
  if (c.r_list.empty()) {
    if (k_max == 0) k_max = 7;
    // Every r whose alternating sum fits below k_max.
    for (std::size_t r = 1;; ++r) {
      const std::size_t needed = 2 * r + 1;
      const std::size_t top = c.cut_points.empty() ? needed : (needed <= c.cut_points.size() ? c.cut_points[needed - 1] : k_max + 1);
      if (top > k_max) break;
      c.r_list.push_back(r);
    }
  } else if (k_max == 0) {
    const std::size_t needed = 2 * *std::max_element(c.r_list.begin(), c.r_list.end()) + 1;
    k_max = c.cut_points.empty() ? needed : c.cut_points.at(std::min(needed, c.cut_points.size()) - 1);
  }
  if (c.cut_points.empty()) c.cut_points = default_cut_points(k_max);
  c.k_max = k_max;

  std::string k_text = given("--K-hypothesis") ? a.k_hypothesis : "";
  if (k_text.empty() && cfg.contains("K_hypothesis") && !cfg["K_hypothesis"].is_null())
    k_text = cfg["K_hypothesis"].is_string() ? cfg["K_hypothesis"].get<std::string>() : cfg["K_hypothesis"].dump();
  if (!k_text.empty()) c.k_hypothesis = scalar_traits<Rational>::parse(k_text);
  return c;
}

int run_counterexample(const CounterexampleArgs& a, const CLI::App& cmd) {
  const ResolvedCounterexample c = resolve(a, cmd);
  if (c.r_list.empty()) throw Error(ErrorKind::invalid_input, "k_max = " + std::to_string(c.k_max) + " leaves no materializable r");

  const Scaffold sc = build_scaffold(c.k_max, c.rule);
  MatrixSchedule<Rational> sched = [&] {
    if (c.schedule == "random") return random_schedule<Rational>(c.k_max, c.seed);
    if (c.schedule == "divergent") {
      std::vector<std::size_t> r_seq = c.r_list;
      std::sort(r_seq.begin(), r_seq.end());
      r_seq.erase(std::unique(r_seq.begin(), r_seq.end()), r_seq.end());
      return divergent_schedule<Rational>(c.k_max, r_seq, lemma2_family<Rational>(c.family));
    }
    throw Error(ErrorKind::invalid_input, "unknown schedule '" + c.schedule + "' (random|divergent)");
  }();
  ConvexBlocking<Rational> blocking = [&] {
    if (c.weights == "uniform") return ConvexBlocking<Rational>::uniform(c.cut_points);
    if (c.weights == "vertex") return ConvexBlocking<Rational>::vertex(c.cut_points);
    throw Error(ErrorKind::invalid_input, "unknown weights '" + c.weights + "' (uniform|vertex)");
  }();

  const auto report = divergence_report(sc, sched, blocking, c.r_list, c.k_hypothesis,
                                        a.corrupt_xi ? XiRule::corrupted : XiRule::standard);

  json config = {{"k_max", c.k_max},
                 {"n_rule", c.n_rule},
                 {"weights", c.weights},
                 {"cut_points", c.cut_points},
                 {"schedule", c.schedule},
                 {"family", c.family},
                 {"seed", c.seed},
                 {"r_list", c.r_list},
                 {"K_hypothesis", c.k_hypothesis ? json(format_scalar(*c.k_hypothesis)) : json(nullptr)},
                 {"summed_sigma", format_scalar(sched.summed_sigma())}};
  if (a.corrupt_xi) config["corrupt_xi"] = true;

  std::vector<std::pair<std::string, std::string>> header{{"command", "counterexample"}};
  for (const auto& [k, v] : config.items()) header.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());

  const std::string json_text = io::to_json(report, config).dump(2) + "\n";
  const std::string csv_text = io::divergence_csv(report, header);
  if (a.out.empty()) {
    std::cout << json_text;
  } else {
    std::filesystem::path csv_path = a.out;
    if (csv_path.extension() == ".json")
      csv_path.replace_extension(".csv");
    else
      csv_path += ".csv";
    io::write_atomic(a.out, json_text);
    io::write_atomic(csv_path, csv_text);
  }
  if (!report.all_match()) {
    std::cerr << "pairing identity failed for at least one r\n";
    return kSelfCheckFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- wuc

struct WucArgs {
  std::string input;
  std::string mode = "exact";
  std::size_t samples = 256;
  std::uint64_t seed = 1;
  std::string out;
};

int run_wuc(const WucArgs& a) {
  const json doc = io::parse_json(io::read_file(a.input));
  WucMode mode;
  if (a.mode == "exact")
    mode = WucMode::exact_signs;
  else if (a.mode == "sampled")
    mode = WucMode::sampled;
  else
    throw Error(ErrorKind::invalid_input, "unknown wuc mode '" + a.mode + "' (exact|sampled)");

  json out = {{"mode", a.mode}, {"samples", a.samples}, {"seed", a.seed}};
  auto finish = [&](const WucEstimate<Rational>& est) {
    out["lower"] = format_scalar(est.lower);
    out["upper"] = est.upper ? json(format_scalar(*est.upper)) : json(nullptr);
    emit(a.out, out.dump(2) + "\n");
    return kOk;
  };
  if (doc.contains("vectors")) {
    std::vector<TreeVector<Rational>> series;
    for (const json& v : doc["vectors"]) series.push_back(io::tree_vector_from_json<Rational>(v));
    out["kind"] = "vectors";
    return finish(wuc_constant<Rational>(std::span<const TreeVector<Rational>>(series), mode, a.samples, a.seed));
  }
  if (doc.contains("tensors")) {
    std::vector<TensorElement<Rational>> series;
    for (const json& v : doc["tensors"]) series.push_back(io::tensor_from_json<Rational>(v));
    out["kind"] = "tensors";
    return finish(wuc_constant<Rational>(std::span<const TensorElement<Rational>>(series), mode, a.samples, a.seed));
  }
  throw Error(ErrorKind::invalid_input, "wuc input needs a 'vectors' or 'tensors' array");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"James-Hagler tree space, sigma-norm and property (u) experiments"};
  app.require_subcommand(1);

  JhNormArgs jh;
  auto* jh_cmd = app.add_subcommand("jh-norm", "Exact JH norm of a TreeVector JSON file");
  jh_cmd->add_option("input", jh.input, "TreeVector JSON")->required();
  jh_cmd->add_flag("--float", jh.floating, "Evaluate in double precision");
  jh_cmd->add_option("--out", jh.out, "Write result to PATH");

  SigmaArgs sg;
  auto* sg_cmd = app.add_subcommand("sigma", "l^inf -> l^1 norm of a CSV matrix");
  sg_cmd->add_option("input", sg.input, "Matrix CSV");
  auto* sg_exact = sg_cmd->add_flag("--exact", "Exact Gray-code enumeration (default)");
  auto* sg_heur = sg_cmd->add_flag("--heuristic", sg.heuristic, "Alternating-maximisation lower bound");
  sg_exact->excludes(sg_heur);
  sg_cmd->add_option("--restarts", sg.restarts, "Heuristic restarts")->capture_default_str();
  sg_cmd->add_option("--seed", sg.seed, "Heuristic seed")->capture_default_str();
  sg_cmd->add_option("--transform", sg.transform, "none|E|eps|triangle|conjugate, applied before sigma")->capture_default_str();
  sg_cmd->add_flag("--also-E", sg.also_E, "Also print sigma(E(M))");
  sg_cmd->add_flag("--float", sg.floating, "Evaluate in double precision");
  sg_cmd->add_option("--check-lemma1", sg.check_lemma1, "Check the permutation sign identity for 1..N");
  sg_cmd->add_option("--out", sg.out, "Write result to PATH");

  GrowthArgs gr;
  auto* gr_cmd = app.add_subcommand("growth", "sigma(E(M_n)) growth sweep, CSV output");
  gr_cmd->add_option("--family", gr.family, "hilbert|hankel")->capture_default_str();
  gr_cmd->add_option("--sizes", gr.sizes, "Ascending comma-separated sizes")->capture_default_str();
  auto* gr_exact = gr_cmd->add_flag("--exact", gr.exact, "Exact sigma at every size");
  auto* gr_heur = gr_cmd->add_flag("--heuristic", gr.heuristic, "Heuristic lower bounds at every size");
  gr_exact->excludes(gr_heur);
  gr_cmd->add_option("--restarts", gr.restarts, "Heuristic restarts")->capture_default_str();
  gr_cmd->add_option("--seed", gr.seed, "Heuristic seed")->capture_default_str();
  gr_cmd->add_flag("--no-fit", gr.no_fit, "Skip the slope fit against ln n");
  gr_cmd->add_flag("--float", gr.floating, "Evaluate in double precision");
  gr_cmd->add_option("--out", gr.out, "Write CSV to PATH");

  CounterexampleArgs ce;
  auto* ce_cmd = app.add_subcommand("counterexample", "Alternating-sum pairing report (JSON + CSV)");
  ce_cmd->add_option("--config", ce.config, "Config JSON {k_max, n_rule, weights, cut_points, schedule, K_hypothesis, r_list}");
  ce_cmd->add_option("--k-max", ce.k_max, "Number of scaffold blocks");
  ce_cmd->add_option("--weights", ce.weights, "uniform|vertex")->capture_default_str();
  ce_cmd->add_option("--K-hypothesis", ce.k_hypothesis, "Putative wuC constant to test against");
  ce_cmd->add_option("--r-list", ce.r_list, "Comma-separated r values");
  ce_cmd->add_option("--schedule", ce.schedule, "random|divergent")->capture_default_str();
  ce_cmd->add_option("--family", ce.family, "Candidate family for the divergent schedule")->capture_default_str();
  ce_cmd->add_option("--seed", ce.seed, "Seed for the random schedule")->capture_default_str();
  ce_cmd->add_flag("--corrupt-xi", ce.corrupt_xi, "Negative control: xi_i follows gamma_i")->group("");
  ce_cmd->add_option("--out", ce.out, "Write JSON to PATH and CSV next to it");

  WucArgs wc;
  auto* wc_cmd = app.add_subcommand("wuc", "wuC constant of a series of vectors or tensors");
  wc_cmd->add_option("input", wc.input, "JSON {\"vectors\":[...]} or {\"tensors\":[...]}")->required();
  wc_cmd->add_option("--mode", wc.mode, "exact|sampled")->capture_default_str();
  wc_cmd->add_option("--samples", wc.samples, "Sampled sign vectors")->capture_default_str();
  wc_cmd->add_option("--seed", wc.seed, "Sampling seed")->capture_default_str();
  wc_cmd->add_option("--out", wc.out, "Write result to PATH");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*jh_cmd) return jh.floating ? run_jh_norm<double>(jh) : run_jh_norm<Rational>(jh);
    if (*sg_cmd) {
      if (sg.check_lemma1) {
        if (*sg.check_lemma1 == 0) throw Error(ErrorKind::invalid_input, "--check-lemma1 needs N >= 1");
        for (std::size_t n = 1; n <= *sg.check_lemma1; ++n)
          if (!lemma1_identity_check(n)) {
            std::cout << "FAIL n=" << n << "\n";
            return kSelfCheckFailed;
          }
        std::cout << "OK\n";
        if (sg.input.empty()) return kOk;
      }
      if (sg.input.empty()) throw Error(ErrorKind::invalid_input, "sigma needs a matrix CSV file");
      return sg.floating ? run_sigma<double>(sg) : run_sigma<Rational>(sg);
    }
    if (*gr_cmd) return gr.floating ? run_growth<double>(gr) : run_growth<Rational>(gr);
    if (*ce_cmd) return run_counterexample(ce, *ce_cmd);
    if (*wc_cmd) return run_wuc(wc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::construction_bug ? kSelfCheckFailed : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

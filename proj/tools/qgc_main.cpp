// Copyright 2026 The QGC Authors.
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

// qgc: corpus ingestion, prompt encoding, controlled-test construction,
// generation, scoring and reporting for controllable question generation.
//
// Sample usage:
//   qgc ingest --in FairytaleQA_Dataset --format fairytaleqa-source --out corpus.jsonl
//   qgc build-controlled-test --corpus corpus.jsonl --split test --out ctest.jsonl
//   qgc encode --config F --ctest ctest.jsonl --out prompts.jsonl
//   qgc generate --prompts prompts.jsonl --backend-url http://localhost:8000
//       --out generations.jsonl
//   qgc eval-qg --generations generations.jsonl --ctest ctest.jsonl --out qg.json
//   qgc eval-qa --generations generations.jsonl --ctest ctest.jsonl
//       --qa-backend-url http://localhost:8001 --out qa.json
//   qgc report --in qg.json --format text-table
//   qgc run --corpus corpus.jsonl --config F --stub gen.jsonl --qa-stub qa.jsonl

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgc/qgc.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string config_file;
  bool verbose = false;
};

struct BackendFlags {
  std::optional<std::string> url;
  std::optional<std::string> stub;
  std::string stub_fallback = "error";
  std::string stub_fixed = "<QUESTION> ? <ANSWER> ?";
  int beam = 5;
  int max_input_tokens = 512;
  int max_new_tokens = 128;
  std::size_t batch_size = 16;
  std::size_t max_in_flight = 2;
  int retries = 3;
  std::optional<std::string> bearer_token;

  qgc::StubFallback fallback() const {
    if (stub_fallback == "error") return qgc::StubFallback::error();
    if (stub_fallback == "fixed-string") return qgc::StubFallback::fixed(stub_fixed);
    qgc::fail(qgc::ErrorKind::kValidation,
              "unknown stub fallback \"" + stub_fallback + "\"");
  }

  qgc::DecodingParams params() const { return {beam, max_input_tokens, max_new_tokens}; }

  qgc::ClientOptions client() const {
    qgc::ClientOptions c;
    c.batch_size = batch_size;
    c.max_in_flight = max_in_flight;
    c.http.retry.max_retries = retries;
    c.http.bearer_token = bearer_token;
    return c;
  }
};

struct EvalFlags {
  std::string aggregation = "max";
  std::string smoothing = "epsilon";
  std::string normalization = "default";
  std::optional<std::string> scorer_url;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& f, const std::string& prefix) {
  auto* url = cmd->add_option("--" + prefix + "backend-url", f.url,
                              "Generation service address");
  auto* stub = cmd->add_option("--" + prefix + "stub", f.stub,
                               "Stub lookup table (JSONL input_text/output_text)");
  url->excludes(stub);
  cmd->add_option("--" + prefix + "stub-fallback", f.stub_fallback,
                  "Stub behavior for unseen inputs")
      ->check(CLI::IsMember({"error", "fixed-string"}));
  cmd->add_option("--" + prefix + "stub-fixed", f.stub_fixed,
                  "Stub output for unseen inputs under fixed-string");
}

void add_decoding_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--beam", f.beam, "Beam width")->check(CLI::PositiveNumber);
  cmd->add_option("--max-input-tokens", f.max_input_tokens)->check(CLI::PositiveNumber);
  cmd->add_option("--max-new-tokens", f.max_new_tokens)->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", f.batch_size, "Inputs per request")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-in-flight", f.max_in_flight, "Concurrent requests")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--retries", f.retries, "Retries on transient failures")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--bearer-token", f.bearer_token, "Authorization bearer token");
}

void add_eval_flags(CLI::App* cmd, EvalFlags& f) {
  cmd->add_option("--normalization", f.normalization,
                  "default, none, or a comma list of lowercase,strip_punctuation,"
                  "collapse_whitespace,remove_articles");
  cmd->add_option("--smoothing", f.smoothing, "BLEU smoothing")
      ->check(CLI::IsMember({"none", "epsilon"}));
}

qgc::EvalOptions eval_options(const EvalFlags& f) {
  qgc::EvalOptions o;
  o.profile = qgc::parse_profile(f.normalization);
  o.smoothing = qgc::parse_smoothing(f.smoothing);
  o.aggregation = qgc::parse_aggregation(f.aggregation);
  o.scorer_endpoint = f.scorer_url;
  return o;
}

void apply_backend_env(BackendFlags& f) {
  if (f.url || f.stub) return;
  if (const char* env = std::getenv("QGC_BACKEND_URL"); env && *env) f.url = env;
}

fs::path resolve_out(const GlobalFlags& g, const std::string& out) {
  fs::path p(out);
  if (!g.out_dir.empty() && p.is_relative()) p = fs::path(g.out_dir) / p;
  return p;
}

void write_output(const std::string& content, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << content;
    return;
  }
  qgc::write_file_atomic(out, content);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

// Flat `key = value` file. Blank lines and '#' comments are ignored;
// '_' in keys reads as '-'.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(qgc::read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = qgc::detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      qgc::fail(qgc::ErrorKind::kValidation,
                path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = qgc::detail::trim(t.substr(0, eq));
    std::string value = qgc::detail::trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    out[key] = value;
  }
  return out;
}

std::optional<std::string> find_config_file_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config-file" && i + 1 < args.size()) return args[i + 1];
    if (args[i].starts_with("--config-file=")) return args[i].substr(14);
  }
  return std::nullopt;
}

// Inserts config-file entries right after the subcommand name so that
// explicit flags, which come later and use take-last, win.
std::vector<std::string> inject_config(CLI::App& app, std::vector<std::string> args) {
  const auto path = find_config_file_arg(args);
  if (!path) return args;
  const auto entries = read_config_file(*path);
  for (std::size_t i = 1; i < args.size(); ++i) {
    CLI::App* sub = nullptr;
    try {
      sub = app.get_subcommand(args[i]);
    } catch (const CLI::OptionNotFound&) {
      continue;
    }
    std::vector<std::string> injected;
    for (const auto& [key, value] : entries) {
      const std::string flag = "--" + key;
      if (key == "config-file") continue;
      const CLI::Option* opt = sub->get_option_no_throw(flag);
      if (!opt) opt = app.get_option_no_throw(flag);
      if (!opt) continue;
      if (opt->get_type_size() == 0) {
        if (value == "true" || value == "1" || value == "yes") injected.push_back(flag);
      } else {
        injected.push_back(flag);
        injected.push_back(value);
      }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(i) + 1, injected.begin(),
                injected.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controllable question generation: pipeline and evaluation harness"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Seed for seeded selection policies");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");
  app.add_option("--config-file", g.config_file, "Flat key = value configuration file");
  app.add_flag("--verbose", g.verbose, "Log stage progress to stderr");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert a corpus to canonical JSONL");
  std::string ingest_in, ingest_format = "fairytaleqa-source", ingest_out = "corpus.jsonl";
  ingest->add_option("--in", ingest_in, "Source file or directory")->required();
  ingest->add_option("--format", ingest_format)
      ->check(CLI::IsMember({"canonical-jsonl", "fairytaleqa-source"}));
  ingest->add_option("--out", ingest_out);

  // stats
  auto* stats = app.add_subcommand("stats", "Print corpus statistics as JSON");
  std::string stats_corpus, stats_format = "canonical-jsonl";
  bool stats_expect = false;
  stats->add_option("--corpus", stats_corpus)->required();
  stats->add_option("--format", stats_format)
      ->check(CLI::IsMember({"canonical-jsonl", "fairytaleqa-source"}));
  stats->add_flag("--expect-fairytaleqa", stats_expect,
                  "Compare split sizes with the published FairytaleQA splits");

  // encode
  auto* encode = app.add_subcommand("encode", "Materialize prompts for one model config");
  std::string encode_config, encode_corpus, encode_ctest, encode_split = "train",
                                                          encode_out = "prompts.jsonl";
  encode->add_option("--config", encode_config, "A..F")->required();
  auto* enc_corpus = encode->add_option("--corpus", encode_corpus, "Per-pair prompts");
  auto* enc_ctest = encode->add_option("--ctest", encode_ctest, "Per-example prompts");
  enc_corpus->excludes(enc_ctest);
  encode->add_option("--split", encode_split)->check(CLI::IsMember({"train", "val", "test"}));
  encode->add_option("--out", encode_out);

  // build-controlled-test
  auto* build = app.add_subcommand("build-controlled-test", "Build the controlled test set");
  std::string build_corpus, build_format = "canonical-jsonl", build_split = "test",
                            build_policy = "largest-group", build_out = "ctest.jsonl";
  build->add_option("--corpus", build_corpus)->required();
  build->add_option("--format", build_format)
      ->check(CLI::IsMember({"canonical-jsonl", "fairytaleqa-source"}));
  build->add_option("--split", build_split)->check(CLI::IsMember({"train", "val", "test"}));
  build->add_option("--policy", build_policy)
      ->check(CLI::IsMember({"largest-group", "seeded-uniform"}));
  build->add_option("--out", build_out);

  // generate
  auto* gen = app.add_subcommand("generate", "Run prompts through a generation backend");
  std::string gen_prompts, gen_out = "generations.jsonl";
  BackendFlags gen_backend;
  gen->add_option("--prompts", gen_prompts)->required();
  gen->add_option("--out", gen_out);
  add_backend_flags(gen, gen_backend, "");
  add_decoding_flags(gen, gen_backend);

  // eval-qg
  auto* eval_qg = app.add_subcommand("eval-qg", "Score generated questions against references");
  std::string qg_generations, qg_ctest, qg_out = "report_qg.json";
  EvalFlags qg_flags;
  eval_qg->add_option("--generations", qg_generations)->required();
  eval_qg->add_option("--ctest", qg_ctest)->required();
  eval_qg->add_option("--agg", qg_flags.aggregation, "Multi-reference aggregation")
      ->check(CLI::IsMember({"max", "mean", "max-over-references", "mean-over-references"}));
  eval_qg->add_option("--scorer-url", qg_flags.scorer_url, "External scorer service");
  eval_qg->add_option("--out", qg_out);
  add_eval_flags(eval_qg, qg_flags);

  // eval-qa
  auto* eval_qa = app.add_subcommand("eval-qa", "Round-trip QA controllability scoring");
  std::string qa_generations, qa_ctest, qa_out = "report_qa.json";
  EvalFlags qa_flags;
  BackendFlags qa_backend;
  eval_qa->add_option("--generations", qa_generations)->required();
  eval_qa->add_option("--ctest", qa_ctest)->required();
  eval_qa->add_option("--out", qa_out);
  add_backend_flags(eval_qa, qa_backend, "qa-");
  add_decoding_flags(eval_qa, qa_backend);
  add_eval_flags(eval_qa, qa_flags);

  // report
  auto* report = app.add_subcommand("report", "Render evaluation reports");
  std::string report_in, report_format = "text-table", report_out = "-";
  report->add_option("--in", report_in, "Comma-separated report files")->required();
  report->add_option("--format", report_format)
      ->check(CLI::IsMember({"text-table", "csv", "json"}));
  report->add_option("--out", report_out, "Output path, or - for stdout");

  // run
  auto* run = app.add_subcommand("run", "Run every stage end to end");
  std::string run_corpus, run_format = "canonical-jsonl", run_config = "F",
                          run_split = "test", run_policy = "largest-group";
  BackendFlags run_backend, run_qa;
  EvalFlags run_eval;
  bool run_resume = false;
  run->add_option("--corpus", run_corpus)->required();
  run->add_option("--format", run_format)
      ->check(CLI::IsMember({"canonical-jsonl", "fairytaleqa-source"}));
  run->add_option("--config", run_config, "C..F");
  run->add_option("--split", run_split)->check(CLI::IsMember({"train", "val", "test"}));
  run->add_option("--policy", run_policy)
      ->check(CLI::IsMember({"largest-group", "seeded-uniform"}));
  add_backend_flags(run, run_backend, "");
  add_backend_flags(run, run_qa, "qa-");
  add_decoding_flags(run, run_backend);
  add_eval_flags(run, run_eval);
  run->add_option("--agg", run_eval.aggregation)
      ->check(CLI::IsMember({"max", "mean", "max-over-references", "mean-over-references"}));
  run->add_option("--scorer-url", run_eval.scorer_url);
  run->add_flag("--resume", run_resume, "Skip stages whose artifacts are up to date");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = inject_config(app, std::move(args));
  } catch (const qgc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qgc::exit_code_for(e.kind());
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      const auto format = qgc::parse_corpus_format(ingest_format);
      const qgc::Corpus corpus = qgc::load_corpus(ingest_in, format);
      const auto st = qgc::corpus_stats(corpus);
      if (format == qgc::CorpusFormat::kFairytaleqaSource) {
        const auto check = qgc::check_fairytaleqa_split_sizes(st);
        for (const auto& w : check.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& w : check.mismatches) std::cerr << "warning: " << w << "\n";
      }
      write_output(qgc::export_canonical(corpus), resolve_out(g, ingest_out).string());
      if (g.verbose) std::cerr << qgc::stats_to_json(st).dump(2) << "\n";
    } else if (*stats) {
      const qgc::Corpus corpus =
          qgc::load_corpus(stats_corpus, qgc::parse_corpus_format(stats_format));
      const auto st = qgc::corpus_stats(corpus);
      std::cout << qgc::stats_to_json(st).dump(2) << "\n";
      if (stats_expect) {
        const auto check = qgc::check_fairytaleqa_split_sizes(st);
        for (const auto& w : check.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& w : check.mismatches) std::cerr << "mismatch: " << w << "\n";
        if (!check.mismatches.empty()) return 2;
      }
    } else if (*encode) {
      const auto config = qgc::parse_model_config(encode_config);
      qgc::PromptFile prompts;
      std::string digest;
      if (!encode_ctest.empty()) {
        const auto ctest =
            qgc::controlled_test_from_jsonl(qgc::read_jsonl(encode_ctest), encode_ctest);
        prompts = qgc::encode_controlled_prompts(ctest, config);
        digest = qgc::DigestBuilder()
                     .add("stage", "encode")
                     .add("ctest", qgc::content_digest(encode_ctest))
                     .add("config", std::string(1, qgc::config_letter(config)))
                     .hex();
      } else if (!encode_corpus.empty()) {
        const auto split = *qgc::parse_split(encode_split);
        const qgc::Corpus corpus =
            qgc::load_corpus(encode_corpus, qgc::CorpusFormat::kCanonicalJsonl);
        prompts = qgc::encode_corpus_prompts(corpus, config, split);
        digest = qgc::DigestBuilder()
                     .add("stage", "encode")
                     .add("corpus", qgc::content_digest(encode_corpus))
                     .add("split", encode_split)
                     .add("config", std::string(1, qgc::config_letter(config)))
                     .hex();
      } else {
        qgc::fail(qgc::ErrorKind::kValidation, "encode needs --corpus or --ctest");
      }
      write_output(qgc::serialize_prompts(prompts, digest),
                   resolve_out(g, encode_out).string());
    } else if (*build) {
      const auto policy = qgc::parse_selection_policy(build_policy);
      const auto split = *qgc::parse_split(build_split);
      const qgc::Corpus corpus =
          qgc::load_corpus(build_corpus, qgc::parse_corpus_format(build_format));
      const auto set = qgc::build_controlled_test(corpus, split, policy, g.seed);
      const std::string digest =
          qgc::DigestBuilder()
              .add("stage", "build-controlled-test")
              .add("corpus", qgc::content_digest(build_corpus))
              .add("format", build_format)
              .add("split", build_split)
              .add("policy", build_policy)
              .add("seed", g.seed ? std::to_string(*g.seed) : "none")
              .hex();
      write_output(qgc::serialize_controlled_test(set, {{"input_digest", digest}}),
                   resolve_out(g, build_out).string());
      if (g.verbose) {
        std::cerr << "sections kept " << set.summary.sections_kept << ", skipped "
                  << set.summary.sections_skipped << "\n";
      }
    } else if (*gen) {
      apply_backend_env(gen_backend);
      auto backend = qgc::make_backend(
          gen_backend.url, gen_backend.stub ? std::optional<fs::path>(*gen_backend.stub)
                                            : std::nullopt,
          gen_backend.fallback(), gen_backend.client());
      const auto prompts = qgc::read_prompts(gen_prompts);
      const auto params = gen_backend.params();
      const std::string digest =
          qgc::DigestBuilder()
              .add("stage", "generate")
              .add("prompts", qgc::content_digest(gen_prompts))
              .add("backend", backend->identity())
              .add("beam_width", std::to_string(params.beam_width))
              .add("max_input_tokens", std::to_string(params.max_input_tokens))
              .add("max_new_tokens", std::to_string(params.max_new_tokens))
              .hex();
      qgc::ArtifactWriter writer(resolve_out(g, gen_out));
      qgc::run_generation(prompts, *backend, params, writer, digest);
      writer.commit();
    } else if (*eval_qg) {
      const auto ctest = qgc::controlled_test_from_jsonl(qgc::read_jsonl(qg_ctest), qg_ctest);
      const auto gens = qgc::read_generations(qg_generations);
      const auto opts = eval_options(qg_flags);
      const auto rep = qgc::evaluate_qg(qgc::interpret_generations(gens.records), ctest, opts);
      const std::string digest =
          qgc::DigestBuilder()
              .add("stage", "eval-qg")
              .add("generations", qgc::content_digest(qg_generations))
              .add("ctest", qgc::content_digest(qg_ctest))
              .add("profile", qgc::profile_to_string(opts.profile))
              .add("smoothing", qgc::to_string(opts.smoothing))
              .add("aggregation", qgc::to_string(opts.aggregation))
              .add("scorer", opts.scorer_endpoint.value_or(""))
              .hex();
      write_output(qgc::report_file_content(rep, digest), resolve_out(g, qg_out).string());
    } else if (*eval_qa) {
      const auto ctest = qgc::controlled_test_from_jsonl(qgc::read_jsonl(qa_ctest), qa_ctest);
      const auto gens = qgc::read_generations(qa_generations);
      auto backend = qgc::make_backend(
          qa_backend.url,
          qa_backend.stub ? std::optional<fs::path>(*qa_backend.stub) : std::nullopt,
          qa_backend.fallback(), qa_backend.client());
      auto opts = eval_options(qa_flags);
      opts.qa_params = qa_backend.params();
      const auto rep = qgc::evaluate_qa_controllability(
          qgc::interpret_generations(gens.records), *backend, ctest, opts);
      const std::string digest =
          qgc::DigestBuilder()
              .add("stage", "eval-qa")
              .add("generations", qgc::content_digest(qa_generations))
              .add("ctest", qgc::content_digest(qa_ctest))
              .add("qa_backend", backend->identity())
              .add("profile", qgc::profile_to_string(opts.profile))
              .hex();
      write_output(qgc::report_file_content(rep, digest), resolve_out(g, qa_out).string());
    } else if (*report) {
      std::vector<qgc::EvaluationReport> reports;
      for (const auto& path : split_list(report_in)) {
        for (auto& r : qgc::parse_reports_json(qgc::read_file(path))) {
          reports.push_back(std::move(r));
        }
      }
      const std::string out =
          qgc::render_report(reports, qgc::parse_report_format(report_format));
      write_output(out, report_out == "-" ? report_out : resolve_out(g, report_out).string());
    } else if (*run) {
      apply_backend_env(run_backend);
      qgc::PipelineConfig cfg;
      cfg.corpus_path = run_corpus;
      cfg.corpus_format = qgc::parse_corpus_format(run_format);
      cfg.config = qgc::parse_model_config(run_config);
      cfg.backend_url = run_backend.url;
      if (run_backend.stub) cfg.stub_table = *run_backend.stub;
      cfg.stub_fallback = run_backend.fallback();
      cfg.qa_backend_url = run_qa.url;
      if (run_qa.stub) cfg.qa_stub_table = *run_qa.stub;
      cfg.qa_stub_fallback = run_qa.fallback();
      cfg.split = *qgc::parse_split(run_split);
      cfg.policy = qgc::parse_selection_policy(run_policy);
      cfg.seed = g.seed;
      const auto opts = eval_options(run_eval);
      cfg.profile = opts.profile;
      cfg.smoothing = opts.smoothing;
      cfg.aggregation = opts.aggregation;
      cfg.scorer_url = opts.scorer_endpoint;
      cfg.params = run_backend.params();
      cfg.client = run_backend.client();
      cfg.out_dir = g.out_dir.empty() ? fs::path("qgc-out") : fs::path(g.out_dir);
      cfg.resume = run_resume;
      const auto result = qgc::run_pipeline(cfg, &std::cerr);
      (void)result;
    }
  } catch (const qgc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qgc::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

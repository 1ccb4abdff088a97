#pragma once

// Pipeline commands behind the `oacite` executable. Each command takes a
// RunConfig, writes its files, reports on the given streams and returns an
// exit code: 0 ok, 2 configuration/input error, 3 unresolved statuses,
// 4 audit infeasible.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "oacite/converter.hpp"
#include "oacite/corpus.hpp"
#include "oacite/fetch.hpp"
#include "oacite/live.hpp"
#include "oacite/matcher.hpp"
#include "oacite/metrics.hpp"
#include "oacite/records.hpp"
#include "oacite/report.hpp"
#include "oacite/robot.hpp"
#include "oacite/stats.hpp"

namespace oacite::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kUnresolved = 3, kAuditInfeasible = 4 };

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("CONFIG", message) {}
};

struct RunConfig {
  // Inputs. `corpus` supplies defaults for records, ground_truth and mock_dir.
  std::string corpus;
  std::string records;
  std::string detections;
  std::string ground_truth;
  std::string spec;
  std::string out = "out";

  // Providers: a mock web directory or a live search URL template.
  std::string mock_dir;
  std::string search_url_template;
  std::string result_pattern;
  std::vector<std::string> blocklist;
  bool respect_robots = true;

  CrawlConfig crawl;
  int workers = 1;
  bool fetch_log = false;

  metrics::Weighting weighting = metrics::Weighting::Unweighted;
  std::size_t sample_size = 100;
  std::uint64_t seed = 1;
  bool seed_set = false;
  bool allow_unknown = false;

  std::string records_path() const {
    return !records.empty() || corpus.empty() ? records : corpus + "/records.jsonl";
  }
  std::string ground_truth_path() const {
    return !ground_truth.empty() || corpus.empty() ? ground_truth : corpus + "/ground_truth.jsonl";
  }
  std::string mock_dir_path() const {
    return !mock_dir.empty() || corpus.empty() ? mock_dir : corpus + "/mockweb";
  }
};

// --- configuration -------------------------------------------------------------------

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T x{};
  in >> x;
  if (in.fail() || !in.eof()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ','))
    if (auto t = text::collapse_whitespace(item); !t.empty()) out.push_back(t);
  return out;
}

}  // namespace detail

inline constexpr std::string_view kConfigKeys[] = {
    "corpus", "records", "detections", "ground_truth", "spec", "out", "mock_dir",
    "search_url_template", "result_pattern", "blocklist", "respect_robots", "max_depth",
    "per_host_rate", "max_in_flight", "fetch_timeout_ms", "max_links_followed_per_page",
    "title_similarity_threshold", "head_fraction", "tail_fraction", "workers", "fetch_log",
    "weighting", "sample_size", "seed", "allow_unknown"};

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
  using detail::parse_number;
  if (key == "corpus") c.corpus = v;
  else if (key == "records") c.records = v;
  else if (key == "detections") c.detections = v;
  else if (key == "ground_truth") c.ground_truth = v;
  else if (key == "spec") c.spec = v;
  else if (key == "out") c.out = v;
  else if (key == "mock_dir") c.mock_dir = v;
  else if (key == "search_url_template") c.search_url_template = v;
  else if (key == "result_pattern") c.result_pattern = v;
  else if (key == "blocklist") c.blocklist = detail::split_list(v);
  else if (key == "respect_robots") c.respect_robots = detail::parse_bool(key, v);
  else if (key == "max_depth") c.crawl.max_depth = parse_number<int>(key, v);
  else if (key == "per_host_rate") c.crawl.per_host_rate = parse_number<double>(key, v);
  else if (key == "max_in_flight") c.crawl.max_in_flight = parse_number<int>(key, v);
  else if (key == "fetch_timeout_ms")
    c.crawl.fetch_timeout = std::chrono::milliseconds(parse_number<long long>(key, v));
  else if (key == "max_links_followed_per_page")
    c.crawl.max_links_followed_per_page = parse_number<int>(key, v);
  else if (key == "title_similarity_threshold")
    c.crawl.title_similarity_threshold = parse_number<double>(key, v);
  else if (key == "head_fraction") c.crawl.head_fraction = parse_number<double>(key, v);
  else if (key == "tail_fraction") c.crawl.tail_fraction = parse_number<double>(key, v);
  else if (key == "workers") c.workers = parse_number<int>(key, v);
  else if (key == "fetch_log") c.fetch_log = detail::parse_bool(key, v);
  else if (key == "weighting") {
    try {
      c.weighting = metrics::parse_weighting(v);
    } catch (const Error& e) {
      throw ConfigError(std::string(e.what()));
    }
  } else if (key == "sample_size") c.sample_size = parse_number<std::size_t>(key, v);
  else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
    c.seed_set = true;
  } else if (key == "allow_unknown") c.allow_unknown = detail::parse_bool(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

// Flat `key = value` lines; blank lines and '#' comments ignored.
inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (text::collapse_whitespace(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
    std::string key = text::collapse_whitespace(line.substr(0, eq));
    std::string value = line.substr(eq + 1);
    const auto b = value.find_first_not_of(" \t\r");
    const auto e = value.find_last_not_of(" \t\r");
    value = b == std::string::npos ? std::string() : value.substr(b, e - b + 1);
    apply_setting(c, key, value);
  }
}

// --- shared helpers ---------------------------------------------------------------

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

inline std::vector<ArticleRecord> require_records(const RunConfig& c) {
  const std::string path = c.records_path();
  if (path.empty()) throw ConfigError("no records file given (records or corpus)");
  if (!std::filesystem::exists(path)) throw ConfigError("records file '" + path + "' not found");
  return load_records(path);
}

struct Resolved {
  std::vector<ArticleRecord> records;
  std::size_t dropped_unknown = 0;
};

// Status source: detections if given, else ground truth, else the records' own.
inline Resolved resolve_statuses(const RunConfig& c, std::ostream& err) {
  Resolved out;
  out.records = require_records(c);
  if (!c.detections.empty()) {
    if (!std::filesystem::exists(c.detections))
      throw ConfigError("detections file '" + c.detections + "' not found");
    std::unordered_map<std::string, OaStatus> status;
    for (const auto& d : load_detections(c.detections)) status[d.article_id] = d.verdict;
    for (auto& r : out.records) {
      auto it = status.find(r.id);
      r.oa_status = it == status.end() ? OaStatus::UNKNOWN : it->second;
    }
  } else if (!c.ground_truth_path().empty() && std::filesystem::exists(c.ground_truth_path())) {
    std::unordered_map<std::string, bool> truth;
    for (const auto& g : corpus::load_ground_truth(c.ground_truth_path())) truth[g.id] = g.oa;
    for (auto& r : out.records) {
      auto it = truth.find(r.id);
      r.oa_status = it == truth.end() ? OaStatus::UNKNOWN
                                      : (it->second ? OaStatus::OA : OaStatus::NOA);
    }
  }
  std::vector<ArticleRecord> kept;
  for (auto& r : out.records)
    if (r.oa_status == OaStatus::UNKNOWN) ++out.dropped_unknown;
    else kept.push_back(std::move(r));
  if (out.dropped_unknown)
    err << "warning: dropping " << out.dropped_unknown << " record(s) with UNKNOWN status\n";
  out.records = std::move(kept);
  return out;
}

struct UnresolvedError : Error {
  explicit UnresolvedError(std::size_t n)
      : Error("UNRESOLVED", std::to_string(n) +
                                " record(s) have UNKNOWN OA status; run detect first or pass "
                                "--allow-unknown") {}
};

inline Resolved resolved_or_throw(const RunConfig& c, std::ostream& err) {
  std::ostringstream quiet;
  Resolved r = resolve_statuses(c, c.allow_unknown ? err : quiet);
  if (r.dropped_unknown && !c.allow_unknown) throw UnresolvedError(r.dropped_unknown);
  return r;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UnresolvedError& e) {
    err << "error: " << e.what() << "\n";
    return kUnresolved;
  } catch (const corpus::AuditError& e) {
    err << "error: " << e.what() << "\n";
    return kAuditInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace detail

// --- synth ---------------------------------------------------------------------------

inline int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (c.spec.empty()) throw ConfigError("synth needs a spec file (--spec)");
    corpus::CorpusSpec spec = corpus::load_spec(c.spec);
    if (c.seed_set) spec.seed = c.seed;
    const corpus::Corpus corp = corpus::generate_corpus(spec);
    detail::ensure_dir(c.out);
    corpus::export_corpus(corp, c.out);
    std::size_t n_oa = 0, n_reachable = 0;
    for (const auto& g : corp.truth) n_oa += g.oa, n_reachable += g.reachable;
    out << "synth: " << corp.records.size() << " records, " << n_oa << " OA, " << n_reachable
        << " reachable, " << corp.web.pages.size() << " pages -> " << c.out << "\n";
    return kOk;
  });
}

// --- detect --------------------------------------------------------------------------

namespace detail {

struct JournalEntry {
  DetectionEvidence evidence;
  nlohmann::ordered_json fetch_log = nlohmann::ordered_json::array();
  std::size_t warnings = 0;
};

// Last entry per article wins; a torn final line is ignored.
inline std::unordered_map<std::string, JournalEntry> replay_journal(const std::string& path) {
  std::unordered_map<std::string, JournalEntry> out;
  std::ifstream in(path);
  if (!in) return out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::collapse_whitespace(lines[i]).empty()) continue;
    try {
      const auto j = nlohmann::ordered_json::parse(lines[i]);
      JournalEntry e;
      e.evidence = evidence_from_json(j.at("evidence"), i + 1);
      if (j.contains("fetch_log")) e.fetch_log = j.at("fetch_log");
      e.warnings = j.value("warnings", std::size_t{0});
      out[e.evidence.article_id] = std::move(e);
    } catch (const std::exception& ex) {
      if (i + 1 == lines.size()) break;
      throw ConfigError("journal '" + path + "' line " + std::to_string(i + 1) +
                        " is corrupt: " + ex.what());
    }
  }
  return out;
}

inline bool ends_with_newline(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in || in.tellg() == 0) return true;
  in.seekg(-1, std::ios::end);
  char c = 0;
  in.get(c);
  return c == '\n';
}

}  // namespace detail

inline int cmd_detect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    c.crawl.validate();
    if (c.workers < 1) throw ConfigError("workers must be >= 1");
    const auto records = detail::require_records(c);

    // Provider wiring.
    std::unique_ptr<corpus::MockWeb> web;
    std::vector<std::unique_ptr<SearchProvider>> providers;
    std::unique_ptr<Fetcher> fetcher;
    std::unique_ptr<Clock> clock;
    std::unique_ptr<HostRateLimiter> limiter;
    const std::string mock = c.mock_dir_path();
    if (!mock.empty()) {
      if (!std::filesystem::exists(std::filesystem::path(mock) / "index.json"))
        throw ConfigError("mock web '" + mock + "' has no index.json");
      web = std::make_unique<corpus::MockWeb>(corpus::load_mock_web(mock));
      if (web->providers.empty()) throw ConfigError("mock web '" + mock + "' has no providers");
      providers = corpus::make_mock_providers(*web);
      fetcher = std::make_unique<corpus::MockFetcher>(*web);
      // Offline runs use a logical clock at the epoch and no politeness delays.
      clock = std::make_unique<ManualClock>();
    } else if (!c.search_url_template.empty()) {
      live::LiveProviderConfig pc;
      pc.url_template = c.search_url_template;
      if (!c.result_pattern.empty()) pc.result_pattern = c.result_pattern;
      pc.blocklist = c.blocklist;
      pc.timeout = c.crawl.fetch_timeout;
      try {
        providers.push_back(std::make_unique<live::LiveSearchProvider>(pc));
      } catch (const std::regex_error& e) {
        throw ConfigError(std::string("result_pattern: ") + e.what());
      }
      fetcher = std::make_unique<live::LiveFetcher>(c.crawl.fetch_timeout, c.respect_robots);
      clock = std::make_unique<SystemClock>();
      limiter = std::make_unique<HostRateLimiter>(c.crawl.per_host_rate, *clock);
    } else {
      throw ConfigError("no provider configured (mock_dir, corpus or search_url_template)");
    }
    std::vector<const SearchProvider*> provider_ptrs;
    for (auto& p : providers) provider_ptrs.push_back(p.get());

    auto converter = ExternalConverter::from_environment();
    RobotContext ctx;
    ctx.converter = converter ? &*converter : nullptr;
    ctx.rate_limiter = limiter.get();
    ctx.clock = clock.get();

    detail::ensure_dir(c.out);
    const std::string journal_path = detail::out_path(c, "detections.journal.jsonl");
    auto done = detail::replay_journal(journal_path);

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (!done.count(records[i].id)) todo.push_back(i);

    const bool needs_newline = !detail::ends_with_newline(journal_path);
    std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
    if (!journal) throw ConfigError("cannot open journal '" + journal_path + "'");
    if (needs_newline) journal << '\n';

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) {
        const ArticleRecord& r = records[todo[k]];
        detail::JournalEntry e;
        try {
          DetectionOutcome o = detect_oa(r, provider_ptrs, *fetcher, c.crawl, ctx);
          e.evidence = std::move(o.evidence);
          for (const auto& f : o.fetch_log) e.fetch_log.push_back(to_json(f));
          e.warnings = o.warnings.size();
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          return;
        }
        nlohmann::ordered_json line;
        line["evidence"] = to_json(e.evidence);
        line["fetch_log"] = e.fetch_log;
        line["warnings"] = e.warnings;
        std::lock_guard lock(mu);
        journal << line.dump() << '\n';
        journal.flush();
        done[r.id] = std::move(e);
      }
    };
    const int n_threads = std::min<int>(c.workers, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
    }
    journal.close();
    if (failure) std::rethrow_exception(failure);

    std::vector<DetectionEvidence> evidence;
    std::string fetch_log;
    std::size_t n_oa = 0, n_noa = 0, n_unknown = 0, n_warnings = 0;
    for (const auto& r : records) {
      const auto& e = done.at(r.id);
      evidence.push_back(e.evidence);
      for (const auto& f : e.fetch_log) fetch_log += f.dump() + "\n";
      n_warnings += e.warnings;
      switch (e.evidence.verdict) {
        case OaStatus::OA: ++n_oa; break;
        case OaStatus::NOA: ++n_noa; break;
        case OaStatus::UNKNOWN: ++n_unknown; break;
      }
    }
    save_detections(evidence, detail::out_path(c, "detections.jsonl"));
    if (c.fetch_log) oacite::detail::write_text_file(detail::out_path(c, "fetch_log.jsonl"), fetch_log);
    out << "detect: " << records.size() << " records, OA " << n_oa << ", NOA " << n_noa
        << ", UNKNOWN " << n_unknown << ", warnings " << n_warnings << "\n";
    if (n_unknown) err << "warning: " << n_unknown << " record(s) left UNKNOWN\n";
    return kOk;
  });
}

// --- analyze / cohorts / correlate ---------------------------------------------------

inline int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto resolved = detail::resolved_or_throw(c, err);
    const auto ex = metrics::apply_exclusions(resolved.records);
    detail::ensure_dir(c.out);
    std::vector<report::SummaryRow> summary;
    for (metrics::Dimension d : metrics::kAllDimensions) {
      const std::string dim(to_string(d));
      const auto shares = metrics::percent_oa(ex.kept, d);
      const auto adv = metrics::aggregate_advantage(ex.kept, d, c.weighting);
      oacite::detail::write_text_file(detail::out_path(c, "oa_share_by_" + dim + ".csv"),
                                      report::render_oa_share(shares, d));
      oacite::detail::write_text_file(detail::out_path(c, "advantage_by_" + dim + ".csv"),
                                      report::render_advantage(adv, d));
      std::vector<double> pct, adv_pct;
      for (const auto& s : shares) pct.push_back(100.0 * s.percent_oa());
      for (const auto& a : adv)
        if (a.advantage) adv_pct.push_back(100.0 * *a.advantage);
      summary.push_back({"percent_oa_by_" + dim,
                         pct.empty() ? std::nullopt : std::optional(metrics::summary_stats(pct))});
      summary.push_back({"advantage_pct_by_" + dim,
                         adv_pct.empty() ? std::nullopt
                                         : std::optional(metrics::summary_stats(adv_pct))});
    }
    auto log = ex.log;
    for (auto& e : metrics::advantage_exclusions(ex.kept)) log.push_back(std::move(e));
    oacite::detail::write_text_file(detail::out_path(c, "exclusions.csv"),
                                    report::render_exclusions(log));
    oacite::detail::write_text_file(detail::out_path(c, "summary.csv"),
                                    report::render_summary(summary));
    const auto overall = metrics::overall_advantage(ex.kept, c.weighting);
    std::size_t n_oa = 0;
    for (const auto& r : ex.kept) n_oa += r.oa_status == OaStatus::OA;
    out << "analyze: " << ex.kept.size() << " records kept (" << ex.log.size()
        << " exclusions), OA " << report::pct(ex.kept.empty() ? 0.0 : double(n_oa) / double(ex.kept.size()))
        << "%, advantage " << (overall.advantage ? report::pct(*overall.advantage) + "%" : "n/a")
        << "\n";
    return kOk;
  });
}

inline int cmd_cohorts(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto resolved = detail::resolved_or_throw(c, err);
    detail::ensure_dir(c.out);
    const auto yearly = metrics::cohort_table(resolved.records, true);
    const auto pooled = metrics::cohort_table(resolved.records, false);
    oacite::detail::write_text_file(detail::out_path(c, "cohorts_yearly.csv"),
                                    report::render_cohorts(yearly));
    oacite::detail::write_text_file(detail::out_path(c, "cohorts_pooled.csv"),
                                    report::render_cohorts(pooled));
    out << "cohorts: " << resolved.records.size() << " records, " << yearly.rows.size()
        << " years\n";
    return kOk;
  });
}

inline int cmd_correlate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto resolved = detail::resolved_or_throw(c, err);
    const auto ex = metrics::apply_exclusions(resolved.records);
    detail::ensure_dir(c.out);
    const auto rows = report::correlations(ex.kept, c.weighting);
    oacite::detail::write_text_file(detail::out_path(c, "correlations.csv"),
                                    report::render_correlations(rows));
    out << "correlate: " << rows.size() << " pairs\n";
    return kOk;
  });
}

// --- audit -----------------------------------------------------------------------------

struct AuditSummary {
  stats::ConfusionMatrix matrix;
  stats::SdtResult sdt;
};

inline AuditSummary run_audit_files(const RunConfig& c) {
  if (c.detections.empty()) throw ConfigError("audit needs detections (--detections)");
  if (!std::filesystem::exists(c.detections))
    throw ConfigError("detections file '" + c.detections + "' not found");
  const std::string gt = c.ground_truth_path();
  if (gt.empty() || !std::filesystem::exists(gt))
    throw ConfigError("audit needs ground-truth labels (--ground-truth)");
  if (c.sample_size < 1) throw ConfigError("sample_size must be >= 1");
  AuditSummary s;
  s.matrix = corpus::run_audit(load_detections(c.detections), corpus::load_ground_truth(gt),
                               c.sample_size, c.seed);
  s.sdt = stats::sdt_analysis(s.matrix);
  return s;
}

inline int cmd_audit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const AuditSummary s = run_audit_files(c);
    detail::ensure_dir(c.out);
    oacite::detail::write_text_file(detail::out_path(c, "sdt.csv"), report::render_sdt(s.matrix, s.sdt));
    out << "audit: hits " << s.matrix.hits << ", misses " << s.matrix.misses << ", false alarms "
        << s.matrix.false_alarms << ", correct rejections " << s.matrix.correct_rejections
        << "; d' " << report::fixed(s.sdt.d_prime, 3) << ", beta " << report::fixed(s.sdt.beta, 3)
        << (s.sdt.correction_applied ? " (log-linear corrected)" : "") << "\n";
    return kOk;
  });
}

// --- evaluate ------------------------------------------------------------------------

// detect -> analyze -> cohorts -> correlate -> audit on a corpus directory.
inline int cmd_evaluate(const RunConfig& base, std::ostream& out, std::ostream& err) {
  RunConfig c = base;
  if (c.corpus.empty() && (c.records.empty() || c.mock_dir.empty()))
    return detail::guarded(err, []() -> int {
      throw ConfigError("evaluate needs a corpus directory (--corpus)");
    });
  std::ostringstream quiet;
  if (int rc = cmd_detect(c, quiet, err); rc != kOk) return rc;
  c.detections = detail::out_path(c, "detections.jsonl");
  for (auto* cmd : {&cmd_analyze, &cmd_cohorts, &cmd_correlate})
    if (int rc = (*cmd)(c, quiet, err); rc != kOk) return rc;

  return detail::guarded(err, [&] {
    const auto records = detail::require_records(c);
    const auto detections = load_detections(c.detections);
    std::unordered_map<std::string, bool> truth;
    const std::string gt = c.ground_truth_path();
    const bool have_truth = !gt.empty() && std::filesystem::exists(gt);
    if (have_truth)
      for (const auto& g : corpus::load_ground_truth(gt)) truth[g.id] = g.oa;

    std::size_t n_oa = 0, n_unknown = 0;
    stats::ConfusionMatrix full;
    for (const auto& d : detections) {
      n_oa += d.verdict == OaStatus::OA;
      n_unknown += d.verdict == OaStatus::UNKNOWN;
      if (!have_truth || d.verdict == OaStatus::UNKNOWN) continue;
      const bool t = truth.at(d.article_id);
      const bool called = d.verdict == OaStatus::OA;
      (t ? (called ? full.hits : full.misses) : (called ? full.false_alarms : full.correct_rejections))++;
    }
    RunConfig rc = c;
    rc.allow_unknown = true;
    std::ostringstream sink;
    const auto resolved = detail::resolve_statuses(rc, sink);
    const auto ex = metrics::apply_exclusions(resolved.records);
    const auto overall = metrics::overall_advantage(ex.kept, c.weighting);

    out << "evaluate: " << c.out << "\n";
    out << "  records              " << records.size() << "\n";
    out << "  detected OA          " << n_oa << " ("
        << report::pct(records.empty() ? 0.0 : double(n_oa) / double(records.size())) << "%)\n";
    out << "  UNKNOWN              " << n_unknown << "\n";
    out << "  citation advantage   "
        << (overall.advantage ? report::pct(*overall.advantage) + "%" : "n/a") << "\n";
    if (have_truth) {
      out << "  vs ground truth      hits " << full.hits << ", misses " << full.misses
          << ", false alarms " << full.false_alarms << ", correct rejections "
          << full.correct_rejections << "\n";
      try {
        const AuditSummary a = run_audit_files(c);
        oacite::detail::write_text_file(detail::out_path(c, "sdt.csv"),
                                        report::render_sdt(a.matrix, a.sdt));
        out << "  audit (" << c.sample_size << "+" << c.sample_size << ")        d' "
            << report::fixed(a.sdt.d_prime, 3) << ", beta " << report::fixed(a.sdt.beta, 3)
            << "\n";
      } catch (const corpus::AuditError& e) {
        out << "  audit                infeasible: " << e.what() << "\n";
        return static_cast<int>(kAuditInfeasible);
      }
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace oacite::cli

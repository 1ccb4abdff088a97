#pragma once

// The full-text robot: query construction, search fan-out, link filtering,
// canonical dedup, pdf/ps-first ordering, fetch/extract/match, and
// breadth-first candidate-link following to a bounded depth.

#include <algorithm>
#include <future>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "oacite/expected.hpp"
#include "oacite/extract.hpp"
#include "oacite/fetch.hpp"
#include "oacite/matcher.hpp"
#include "oacite/records.hpp"
#include "oacite/text.hpp"
#include "oacite/url.hpp"

namespace oacite {

class ProviderError : public Error {
 public:
  using Error::Error;
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  virtual std::string name() const = 0;
  // Ordered result URLs; may be empty. Throws ProviderError on failure.
  virtual std::vector<std::string> query(std::string_view author,
                                         std::string_view title) const = 0;
  // Host patterns of the provider's own ad/redirect/internal links.
  virtual std::vector<std::string> blocklist() const { return {}; }
};

// Surname bare, title as a quoted phrase, all on one line.
inline std::string build_query(std::string_view surname, std::string_view title) {
  std::string q = text::collapse_whitespace(surname);
  q += " \"";
  for (char c : text::collapse_whitespace(title)) {
    if (c == '"' || c == '\\') q.push_back('\\');
    q.push_back(c);
  }
  q += '"';
  return q;
}

inline std::string build_query(const ArticleRecord& r) {
  return build_query(r.first_author_surname, r.title);
}

// Drops URLs whose host falls under a blocklisted pattern; order kept.
inline std::vector<std::string> filter_irrelevant_links(const std::vector<std::string>& urls,
                                                        const std::vector<std::string>& blocklist) {
  std::vector<std::string> out;
  for (const auto& u : urls) {
    const std::string host = url::host_of(u);
    bool blocked = std::any_of(blocklist.begin(), blocklist.end(),
                               [&](const std::string& p) { return url::host_matches(host, p); });
    if (!blocked) out.push_back(u);
  }
  return out;
}

inline std::vector<std::string> filter_irrelevant_links(const std::vector<std::string>& urls,
                                                        const SearchProvider& provider) {
  return filter_irrelevant_links(urls, provider.blocklist());
}

struct DetectionOutcome {
  DetectionEvidence evidence;
  std::vector<FetchLogEntry> fetch_log;  // deterministic (frontier) order
  std::vector<std::string> warnings;     // extraction failures, provider failures
};

struct RobotContext {
  const TextConverter* converter = nullptr;
  HostRateLimiter* rate_limiter = nullptr;  // optional politeness
  Clock* clock = nullptr;                   // defaults to the system clock
};

namespace detail {

struct FetchedPage {
  std::string url;
  FetchResult result;
  TimePoint at;
};

inline FetchedPage fetch_one(const Fetcher& fetcher, const std::string& u, RobotContext ctx,
                             Clock& clock) {
  FetchedPage page;
  page.url = u;
  page.at = ctx.rate_limiter ? ctx.rate_limiter->acquire(url::host_of(u)) : clock.now();
  page.result = fetcher.fetch(u);
  return page;
}

}  // namespace detail

// Classifies one article. The verdict is the first FULL_TEXT_FOUND in
// (depth, priority, discovery) order no matter how concurrent fetches
// complete; each canonical URL is fetched at most once.
inline DetectionOutcome detect_oa(const ArticleRecord& record,
                                  std::span<const SearchProvider* const> providers,
                                  const Fetcher& fetcher, const CrawlConfig& config,
                                  RobotContext ctx = {}) {
  if (providers.empty()) throw Error("INVALID_CONFIG", "detect_oa needs at least one provider");
  config.validate();
  SystemClock system_clock;
  Clock& clock = ctx.clock ? *ctx.clock : static_cast<Clock&>(system_clock);

  DetectionOutcome out;
  DetectionEvidence& ev = out.evidence;
  ev.article_id = record.id;
  ev.timestamp = format_timestamp(clock.now());
  ev.low_confidence = title_token_count(record.title) < 3;

  // Search fan-out.
  std::vector<std::string> hits;
  std::size_t failures = 0;
  for (const SearchProvider* p : providers) {
    try {
      auto urls = p->query(record.first_author_surname, record.title);
      auto kept = filter_irrelevant_links(urls, *p);
      hits.insert(hits.end(), kept.begin(), kept.end());
    } catch (const std::exception& e) {
      ++failures;
      out.warnings.push_back("provider " + p->name() + " failed: " + e.what());
    }
  }
  if (failures == providers.size()) {
    ev.verdict = OaStatus::UNKNOWN;
    ev.reason = "ALL_PROVIDERS_FAILED";
    return out;
  }

  std::unordered_set<std::string> visited;
  std::vector<std::string> level;
  for (const auto& h : hits) {
    auto canon = url::normalize_url(h);
    if (canon && visited.insert(*canon).second) level.push_back(*canon);
  }
  level = url::prioritize_urls(std::move(level));

  const std::size_t batch_size = static_cast<std::size_t>(config.max_in_flight);
  for (int depth = 0; depth <= config.max_depth && !level.empty(); ++depth) {
    ev.depth = depth;
    std::vector<std::string> next;
    for (std::size_t b = 0; b < level.size(); b += batch_size) {
      const std::size_t e = std::min(level.size(), b + batch_size);
      std::vector<detail::FetchedPage> pages;
      pages.reserve(e - b);
      if (e - b == 1) {
        pages.push_back(detail::fetch_one(fetcher, level[b], ctx, clock));
      } else {
        std::vector<std::future<detail::FetchedPage>> inflight;
        for (std::size_t i = b; i < e; ++i)
          inflight.push_back(std::async(std::launch::async, detail::fetch_one, std::cref(fetcher),
                                        std::cref(level[i]), ctx, std::ref(clock)));
        for (auto& f : inflight) pages.push_back(f.get());
      }

      for (auto& page : pages) {
        out.fetch_log.push_back(
            {page.at, page.url, page.result.status, url::host_of(page.url)});
        if (!page.result.ok()) continue;
        auto extracted = extract_text(page.result.body, page.result.format, ctx.converter);
        if (!extracted) {
          out.warnings.push_back(page.url + ": " + extracted.error().code);
          continue;
        }
        MatchVerdict verdict = match_full_text(extracted->text, record, config);
        if (auto* found = std::get_if<FullTextFound>(&verdict)) {
          ev.verdict = OaStatus::OA;
          ev.url = page.url;
          ev.match_head_offset = found->head_offset;
          ev.match_tail_marker = found->tail_evidence;
          return out;
        }
        // Title present but no full text: follow the page's candidate links.
        const auto reason = std::get<NotFound>(verdict).reason;
        if (page.result.format == Format::Html && reason == NotFoundReason::NO_REFERENCES_SECTION &&
            depth < config.max_depth) {
          for (auto& link : extract_candidate_links(extracted->links, page.url, record,
                                                    config.max_links_followed_per_page))
            if (visited.insert(link).second) next.push_back(std::move(link));
        }
      }
    }
    level = url::prioritize_urls(std::move(next));
  }

  ev.verdict = OaStatus::NOA;
  ev.reason = std::string(to_string(NotFoundReason::EXHAUSTED));
  return out;
}

inline DetectionOutcome detect_oa(const ArticleRecord& record, const SearchProvider& provider,
                                  const Fetcher& fetcher, const CrawlConfig& config,
                                  RobotContext ctx = {}) {
  const SearchProvider* one[] = {&provider};
  return detect_oa(record, one, fetcher, config, ctx);
}

}  // namespace oacite

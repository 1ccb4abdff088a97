#pragma once

// Live web access over cpp-httplib: a templated HTTP search provider and a
// fetcher that honours robots.txt. HTTPS needs CPPHTTPLIB_OPENSSL_SUPPORT
// defined before inclusion (and OpenSSL linked); otherwise https URLs fail
// as fetch errors.

#include <chrono>
#include <map>
#include <mutex>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>

#include "oacite/extract.hpp"
#include "oacite/fetch.hpp"
#include "oacite/robot.hpp"
#include "oacite/url.hpp"

namespace oacite::live {

inline constexpr std::string_view kUserAgent = "oacite-robot/1.0";

struct Target {
  std::string origin;  // scheme://host[:port]
  std::string path_and_query;
};

inline Expected<Target, std::string> split_target(std::string_view u) {
  auto canon = url::normalize_url(u);
  if (!canon) return unexpected(canon.error().code + ": " + canon.error().message);
  const auto p = url::detail::split(*canon);
  if (p.scheme != "http" && p.scheme != "https")
    return unexpected(std::string("unsupported scheme '") + p.scheme + "'");
  Target t;
  t.origin = p.scheme + "://" + *p.authority;
  t.path_and_query = p.path + (p.query ? "?" + *p.query : "");
  return t;
}

struct HttpResponse {
  int status = 0;
  std::string content_type;
  std::string body;
  std::string error;
};

inline HttpResponse http_get(const Target& t, std::chrono::milliseconds timeout) {
  HttpResponse out;
  try {
    httplib::Client cli(t.origin);
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    cli.set_follow_location(true);
    auto res = cli.Get(t.path_and_query, {{"User-Agent", std::string(kUserAgent)}});
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.body = std::move(res->body);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// --- robots.txt ----------------------------------------------------------------------

struct RobotsRules {
  std::vector<std::pair<std::string, bool>> rules;  // (path prefix, allow)

  // Longest matching prefix wins; Allow wins ties; no match allows.
  bool allowed(std::string_view path) const {
    std::size_t best_len = 0;
    bool verdict = true;
    bool matched = false;
    for (const auto& [prefix, allow] : rules) {
      if (prefix.empty() || path.substr(0, prefix.size()) != prefix) continue;
      if (!matched || prefix.size() > best_len || (prefix.size() == best_len && allow)) {
        best_len = prefix.size();
        verdict = allow;
        matched = true;
      }
    }
    return verdict;
  }
};

// Rules of the group naming `agent` (case-insensitive prefix of our token),
// else of the "*" group.
inline RobotsRules parse_robots(std::string_view body, std::string_view agent) {
  const std::string want = text::normalize(agent.substr(0, agent.find('/')));
  RobotsRules specific, wildcard;
  bool have_specific = false;
  std::vector<std::string> group_agents;
  bool in_rules = false;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = html::detail::lower(trim(line.substr(0, colon)));
    const std::string value(trim(line.substr(colon + 1)));
    if (key == "user-agent") {
      if (in_rules) group_agents.clear(), in_rules = false;
      group_agents.push_back(html::detail::lower(value));
    } else if (key == "allow" || key == "disallow") {
      in_rules = true;
      const bool allow = key == "allow";
      if (!allow && value.empty()) continue;  // "Disallow:" permits everything
      for (const auto& a : group_agents) {
        if (a == "*") {
          wildcard.rules.emplace_back(value, allow);
        } else if (!want.empty() && text::normalize(a).find(want) == 0) {
          specific.rules.emplace_back(value, allow);
          have_specific = true;
        }
      }
    }
  }
  return have_specific ? specific : wildcard;
}

// One robots.txt fetch per origin. 4xx or unreachable: everything allowed;
// 5xx: everything disallowed.
class RobotsCache {
 public:
  explicit RobotsCache(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  bool allowed(const Target& t) {
    const auto path = t.path_and_query.substr(0, t.path_and_query.find('?'));
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(t.origin); it != cache_.end()) return it->second.allowed(path);
    }
    RobotsRules rules;
    const HttpResponse r = http_get({t.origin, "/robots.txt"}, timeout_);
    if (r.status >= 200 && r.status < 300) rules = parse_robots(r.body, kUserAgent);
    else if (r.status >= 500) rules.rules.emplace_back("/", false);
    std::lock_guard lock(mu_);
    return cache_.emplace(t.origin, std::move(rules)).first->second.allowed(path);
  }

 private:
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::map<std::string, RobotsRules> cache_;
};

// --- fetcher -------------------------------------------------------------------------

class LiveFetcher final : public Fetcher {
 public:
  explicit LiveFetcher(std::chrono::milliseconds timeout, bool respect_robots = true)
      : timeout_(timeout), respect_robots_(respect_robots), robots_(timeout) {}

  FetchResult fetch(const std::string& u) const override {
    FetchResult out;
    auto target = split_target(u);
    if (!target) {
      out.error = target.error();
      return out;
    }
    if (respect_robots_ && !robots_.allowed(*target)) {
      out.error = "disallowed by robots.txt";
      return out;
    }
    HttpResponse r = http_get(*target, timeout_);
    out.status = r.status;
    out.error = std::move(r.error);
    out.format = detect_format(r.content_type, u);
    out.body = std::move(r.body);
    return out;
  }

 private:
  std::chrono::milliseconds timeout_;
  bool respect_robots_;
  mutable RobotsCache robots_;
};

// --- search provider -----------------------------------------------------------------

struct LiveProviderConfig {
  std::string name = "live";
  // {query}, {author} and {title} are replaced by their URL-encoded values.
  std::string url_template;
  // Capture group 1 of every match is a result URL (resolved against the search URL).
  std::string result_pattern = R"(<a[^>]+href\s*=\s*"(https?://[^"]+)\")";
  std::vector<std::string> blocklist;
  std::chrono::milliseconds timeout{10000};
};

class LiveSearchProvider final : public SearchProvider {
 public:
  explicit LiveSearchProvider(LiveProviderConfig cfg)
      : cfg_(std::move(cfg)), pattern_(cfg_.result_pattern, std::regex::icase) {
    if (cfg_.url_template.empty())
      throw ProviderError("INVALID_PROVIDER", "search URL template is empty");
    if (pattern_.mark_count() < 1)
      throw ProviderError("INVALID_PROVIDER", "result pattern needs a capture group");
  }

  std::string name() const override { return cfg_.name; }
  std::vector<std::string> blocklist() const override { return cfg_.blocklist; }

  std::string search_url(std::string_view author, std::string_view title) const {
    std::string u = cfg_.url_template;
    const std::pair<std::string, std::string> subs[] = {
        {"{query}", httplib::detail::encode_query_param(build_query(author, title))},
        {"{author}", httplib::detail::encode_query_param(std::string(author))},
        {"{title}", httplib::detail::encode_query_param(std::string(title))}};
    for (const auto& [key, value] : subs)
      for (auto p = u.find(key); p != std::string::npos; p = u.find(key, p + value.size()))
        u.replace(p, key.size(), value);
    return u;
  }

  std::vector<std::string> query(std::string_view author, std::string_view title) const override {
    const std::string u = search_url(author, title);
    auto target = split_target(u);
    if (!target) throw ProviderError("INVALID_PROVIDER", "bad search URL: " + target.error());
    const HttpResponse r = http_get(*target, cfg_.timeout);
    if (!r.error.empty()) throw ProviderError("PROVIDER_UNREACHABLE", cfg_.name + ": " + r.error);
    if (r.status < 200 || r.status >= 300)
      throw ProviderError("PROVIDER_HTTP_" + std::to_string(r.status),
                          cfg_.name + " answered HTTP " + std::to_string(r.status));
    std::vector<std::string> out;
    for (std::sregex_iterator it(r.body.begin(), r.body.end(), pattern_), end; it != end; ++it)
      out.push_back(url::resolve_reference(u, html::detail::decode_entities((*it)[1].str())));
    return out;
  }

 private:
  LiveProviderConfig cfg_;
  std::regex pattern_;
};

}  // namespace oacite::live

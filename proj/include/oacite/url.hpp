#pragma once

// URL canonicalization, reference resolution, dedup and full-text-first
// ordering of candidate URLs.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "oacite/expected.hpp"

namespace oacite::url {

struct UrlError {
  std::string code;  // MISSING_SCHEME, INVALID_SCHEME, MISSING_AUTHORITY, EMPTY_HOST, ...
  std::string message;
};

struct UrlParts {
  std::string scheme;
  std::optional<std::string> authority;  // userinfo@host:port, raw
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

namespace detail {

inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

inline bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

// Splits per RFC 3986 appendix B. Never fails; the scheme may come back empty.
inline UrlParts split(std::string_view s) {
  UrlParts p;
  if (auto hash = s.find('#'); hash != std::string_view::npos) {
    p.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (auto q = s.find('?'); q != std::string_view::npos) {
    p.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  auto colon = s.find(':');
  auto first_delim = s.find_first_of("/?#");
  if (colon != std::string_view::npos && colon > 0 &&
      (first_delim == std::string_view::npos || colon < first_delim)) {
    p.scheme = std::string(s.substr(0, colon));
    s = s.substr(colon + 1);
  }
  if (s.substr(0, 2) == "//") {
    s = s.substr(2);
    auto slash = s.find('/');
    p.authority = std::string(s.substr(0, slash));
    s = slash == std::string_view::npos ? std::string_view{} : s.substr(slash);
  }
  p.path = std::string(s);
  return p;
}

// RFC 3986 5.2.4.
inline std::string remove_dot_segments(std::string_view in) {
  std::string input(in);
  std::string output;
  while (!input.empty()) {
    if (input.rfind("../", 0) == 0) {
      input.erase(0, 3);
    } else if (input.rfind("./", 0) == 0) {
      input.erase(0, 2);
    } else if (input.rfind("/./", 0) == 0) {
      input.replace(0, 3, "/");
    } else if (input == "/.") {
      input = "/";
    } else if (input.rfind("/../", 0) == 0 || input == "/..") {
      input = input == "/.." ? std::string("/") : input.substr(3);
      auto last = output.rfind('/');
      output.erase(last == std::string::npos ? 0 : last);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      std::size_t start = input[0] == '/' ? 1 : 0;
      auto next = input.find('/', start);
      output += input.substr(0, next);
      input.erase(0, next == std::string::npos ? input.size() : next);
    }
  }
  return output;
}

inline std::optional<std::string> normalize_percent(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 2 >= s.size() || !is_hex(s[i + 1]) || !is_hex(s[i + 2])) return std::nullopt;
    out.push_back('%');
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(s[i + 1]))));
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(s[i + 2]))));
    i += 2;
  }
  return out;
}

inline std::string join(const UrlParts& p) {
  std::string out;
  if (!p.scheme.empty()) out += p.scheme + ":";
  if (p.authority) out += "//" + *p.authority;
  out += p.path;
  if (p.query) out += "?" + *p.query;
  if (p.fragment) out += "#" + *p.fragment;
  return out;
}

}  // namespace detail

// Canonical form: lowercase scheme and host, no fragment, no default port,
// dot-segments resolved, percent escapes in uppercase hex. Query parameter
// order is preserved.
inline Expected<std::string, UrlError> normalize_url(std::string_view raw) {
  using detail::to_lower;
  auto fail = [](std::string code, std::string msg) {
    return unexpected(UrlError{std::move(code), std::move(msg)});
  };

  for (unsigned char c : raw)
    if (std::isspace(c) || std::iscntrl(c))
      return fail("CONTAINS_WHITESPACE", "URL contains whitespace or control characters");
  if (raw.empty()) return fail("EMPTY", "URL is empty");

  UrlParts p = detail::split(raw);
  if (p.scheme.empty()) return fail("MISSING_SCHEME", "URL has no scheme");
  if (!std::isalpha(static_cast<unsigned char>(p.scheme[0])) ||
      !std::all_of(p.scheme.begin(), p.scheme.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '-' || c == '.';
      }))
    return fail("INVALID_SCHEME", "invalid scheme '" + p.scheme + "'");
  p.scheme = to_lower(p.scheme);
  if (!p.authority) return fail("MISSING_AUTHORITY", "URL is not of the form scheme://host/...");

  std::string authority = *p.authority;
  std::string userinfo;
  if (auto at = authority.rfind('@'); at != std::string::npos) {
    userinfo = authority.substr(0, at + 1);
    authority.erase(0, at + 1);
  }
  std::string host, port;
  if (!authority.empty() && authority[0] == '[') {
    auto close = authority.find(']');
    if (close == std::string::npos) return fail("INVALID_HOST", "unterminated IPv6 literal");
    host = authority.substr(0, close + 1);
    std::string rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != ':') return fail("INVALID_HOST", "garbage after IPv6 literal");
      port = rest.substr(1);
    }
  } else {
    auto colon = authority.rfind(':');
    host = authority.substr(0, colon);
    if (colon != std::string::npos) port = authority.substr(colon + 1);
  }
  if (host.empty()) return fail("EMPTY_HOST", "URL has an empty host");
  if (!port.empty()) {
    if (port.size() > 5 || !std::all_of(port.begin(), port.end(),
                                        [](unsigned char c) { return std::isdigit(c); }) ||
        std::stoi(port) > 65535)
      return fail("INVALID_PORT", "invalid port '" + port + "'");
    port = std::to_string(std::stoi(port));
  }
  host = to_lower(host);
  if ((p.scheme == "http" && port == "80") || (p.scheme == "https" && port == "443") ||
      (p.scheme == "ftp" && port == "21"))
    port.clear();

  auto norm_userinfo = detail::normalize_percent(userinfo);
  auto norm_path = detail::normalize_percent(p.path);
  std::optional<std::string> norm_query;
  if (p.query) norm_query = detail::normalize_percent(*p.query);
  if (!norm_userinfo || !norm_path || (p.query && !norm_query))
    return fail("INVALID_PERCENT_ENCODING", "malformed percent escape");

  UrlParts out;
  out.scheme = p.scheme;
  out.authority = *norm_userinfo + host + (port.empty() ? "" : ":" + port);
  out.path = norm_path->empty() ? "/" : detail::remove_dot_segments(*norm_path);
  if (out.path.empty()) out.path = "/";
  if (p.query) out.query = *norm_query;
  return detail::join(out);
}

// RFC 3986 5.2.2 reference resolution. `base` must be absolute.
inline std::string resolve_reference(std::string_view base, std::string_view ref) {
  using detail::remove_dot_segments;
  UrlParts b = detail::split(base);
  UrlParts r = detail::split(ref);
  UrlParts t;
  if (!r.scheme.empty()) {
    t = r;
    t.path = remove_dot_segments(r.path);
  } else {
    if (r.authority) {
      t.authority = r.authority;
      t.path = remove_dot_segments(r.path);
      t.query = r.query;
    } else {
      if (r.path.empty()) {
        t.path = b.path;
        t.query = r.query ? r.query : b.query;
      } else {
        if (r.path[0] == '/') {
          t.path = remove_dot_segments(r.path);
        } else {
          std::string merged;
          if (b.authority && b.path.empty()) {
            merged = "/" + r.path;
          } else {
            auto slash = b.path.rfind('/');
            merged = (slash == std::string::npos ? std::string() : b.path.substr(0, slash + 1)) +
                     r.path;
          }
          t.path = remove_dot_segments(merged);
        }
        t.query = r.query;
      }
      t.authority = b.authority;
    }
    t.scheme = b.scheme;
  }
  t.fragment = r.fragment;
  return detail::join(t);
}

// Lowercased host of an absolute URL, or empty when there is none.
inline std::string host_of(std::string_view u) {
  UrlParts p = detail::split(u);
  if (!p.authority) return {};
  std::string a = *p.authority;
  if (auto at = a.rfind('@'); at != std::string::npos) a.erase(0, at + 1);
  if (!a.empty() && a[0] == '[') {
    auto close = a.find(']');
    return detail::to_lower(a.substr(0, close == std::string::npos ? a.size() : close + 1));
  }
  return detail::to_lower(a.substr(0, a.rfind(':')));
}

// Lowercased extension of the last path segment, without the dot ("pdf").
inline std::string path_extension(std::string_view u) {
  const std::string path = detail::split(u).path;
  auto slash = path.rfind('/');
  std::string last = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = last.rfind('.');
  if (dot == std::string::npos || dot + 1 == last.size()) return {};
  return detail::to_lower(last.substr(dot + 1));
}

inline bool has_full_text_extension(std::string_view u) {
  const std::string ext = path_extension(u);
  return ext == "pdf" || ext == "ps";
}

// First occurrence wins; equality is on canonical form. URLs that fail to
// normalize are compared verbatim.
inline std::vector<std::string> dedup_urls(const std::vector<std::string>& urls) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& u : urls) {
    auto canon = normalize_url(u);
    const std::string key = canon ? *canon : u;
    if (seen.insert(key).second) out.push_back(u);
  }
  return out;
}

// Stable partition: .pdf / .ps first.
inline std::vector<std::string> prioritize_urls(std::vector<std::string> urls) {
  std::stable_partition(urls.begin(), urls.end(),
                        [](const std::string& u) { return has_full_text_extension(u); });
  return urls;
}

// True when `host` equals `pattern` or is a subdomain of it.
inline bool host_matches(std::string_view host, std::string_view pattern) {
  if (pattern.empty()) return false;
  if (pattern.substr(0, 2) == "*.") pattern.remove_prefix(2);
  if (host.size() == pattern.size()) return detail::to_lower(host) == detail::to_lower(pattern);
  if (host.size() > pattern.size() && host[host.size() - pattern.size() - 1] == '.')
    return detail::to_lower(host.substr(host.size() - pattern.size())) ==
           detail::to_lower(pattern);
  return false;
}

}  // namespace oacite::url

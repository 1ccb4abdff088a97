#pragma once

// Deterministic synthetic corpora: article records with planted OA labels
// and citation counts, an offline "mock web" of full texts, landing-page
// chains and decoys, mock search providers over it, an independent
// reachability checker, and the hand-check style audit.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "oacite/expected.hpp"
#include "oacite/extract.hpp"
#include "oacite/fetch.hpp"
#include "oacite/matcher.hpp"
#include "oacite/records.hpp"
#include "oacite/rng.hpp"
#include "oacite/robot.hpp"
#include "oacite/stats.hpp"
#include "oacite/url.hpp"

namespace oacite::corpus {

class CorpusError : public Error {
 public:
  using Error::Error;
};

struct CitationModel {
  double uncited_mass = 0.61;
  double mean_cited = 3.25;  // mean citation count among cited articles, >= 1
};

struct DecoySpec {
  double abstract_page_prob = 0.0;
  // Probability mass over chain depths 0..5 for OA articles.
  std::array<double, 6> chain_depth_distribution{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  double dead_link_prob = 0.0;
};

struct CorpusSpec {
  std::size_t n_articles = 1000;
  std::vector<std::string> disciplines{"Biology",   "Psychology", "Sociology", "Health",
                                       "Political Science", "Economics", "Education", "Law",
                                       "Business",  "Management"};
  int year_from = 1992;
  int year_to = 2003;
  double oa_probability = 0.12;
  // Overrides keyed "Discipline|Year", "Discipline|*" or "*|Year" (first match wins).
  std::map<std::string, double> oa_probability_by_cell;
  // Exact number of OA articles, drawn uniformly; overrides the probabilities.
  std::optional<std::size_t> oa_count;
  CitationModel citation_model;
  double oa_citation_multiplier = 1.0;
  DecoySpec decoys;
  std::uint64_t seed = 1;
  int journals_per_discipline = 4;
  int issues_per_year = 4;
  std::vector<std::string> countries{"USA", "UK",     "Canada", "Germany", "France",
                                     "Japan", "Australia", "Netherlands", "Italy", "Sweden"};
  bool generate_web = true;

  void validate() const {
    auto bad = [](const std::string& m) { throw CorpusError("INVALID_SPEC", m); };
    auto prob = [&](double p, const char* what) {
      if (!(p >= 0.0 && p <= 1.0)) bad(std::string(what) + " must be in [0, 1]");
    };
    if (n_articles < 1) bad("n_articles must be >= 1");
    if (disciplines.empty()) bad("disciplines must be non-empty");
    if (countries.empty()) bad("countries must be non-empty");
    if (year_to < year_from) bad("years must be a non-empty range");
    prob(oa_probability, "oa_probability");
    for (auto& [k, p] : oa_probability_by_cell) prob(p, "oa_probability override");
    if (oa_count && *oa_count > n_articles) bad("oa_count exceeds n_articles");
    prob(citation_model.uncited_mass, "uncited_mass");
    if (!(citation_model.mean_cited >= 1.0)) bad("mean_cited must be >= 1");
    if (!(oa_citation_multiplier >= 0.0)) bad("oa_citation_multiplier must be >= 0");
    prob(decoys.abstract_page_prob, "abstract_page_prob");
    prob(decoys.dead_link_prob, "dead_link_prob");
    double mass = 0.0;
    for (double w : decoys.chain_depth_distribution) {
      if (!(w >= 0.0)) bad("chain_depth_distribution weights must be >= 0");
      mass += w;
    }
    if (!(mass > 0.0)) bad("chain_depth_distribution must have positive mass");
    if (journals_per_discipline < 1 || issues_per_year < 1)
      bad("journals_per_discipline and issues_per_year must be >= 1");
  }
};

// --- spec JSON -----------------------------------------------------------------

inline CorpusSpec spec_from_json(const nlohmann::json& j) {
  CorpusSpec s;
  try {
    if (!j.is_object()) throw CorpusError("INVALID_SPEC", "spec must be a JSON object");
    if (j.contains("n_articles")) s.n_articles = j.at("n_articles").get<std::size_t>();
    if (j.contains("disciplines")) s.disciplines = j.at("disciplines").get<std::vector<std::string>>();
    if (j.contains("countries")) s.countries = j.at("countries").get<std::vector<std::string>>();
    if (j.contains("years")) {
      const auto& y = j.at("years");
      s.year_from = y.at(0).get<int>();
      s.year_to = y.at(1).get<int>();
    }
    if (j.contains("oa_probability")) {
      const auto& p = j.at("oa_probability");
      if (p.is_number()) {
        s.oa_probability = p.get<double>();
      } else {
        for (auto it = p.begin(); it != p.end(); ++it) {
          if (it.key() == "default") s.oa_probability = it->get<double>();
          else s.oa_probability_by_cell[it.key()] = it->get<double>();
        }
      }
    }
    if (j.contains("oa_count") && !j.at("oa_count").is_null())
      s.oa_count = j.at("oa_count").get<std::size_t>();
    if (j.contains("citation_model")) {
      const auto& c = j.at("citation_model");
      if (c.contains("family") && c.at("family") != "geometric-mixture")
        throw CorpusError("INVALID_SPEC", "citation_model.family must be geometric-mixture");
      if (c.contains("uncited_mass")) s.citation_model.uncited_mass = c.at("uncited_mass");
      if (c.contains("mean_cited")) s.citation_model.mean_cited = c.at("mean_cited");
    }
    if (j.contains("oa_citation_multiplier"))
      s.oa_citation_multiplier = j.at("oa_citation_multiplier").get<double>();
    if (j.contains("decoys")) {
      const auto& d = j.at("decoys");
      if (d.contains("abstract_page_prob")) s.decoys.abstract_page_prob = d.at("abstract_page_prob");
      if (d.contains("dead_link_prob")) s.decoys.dead_link_prob = d.at("dead_link_prob");
      if (d.contains("chain_depth_distribution")) {
        auto w = d.at("chain_depth_distribution").get<std::vector<double>>();
        if (w.size() != 6)
          throw CorpusError("INVALID_SPEC", "chain_depth_distribution needs 6 weights (depth 0..5)");
        std::copy(w.begin(), w.end(), s.decoys.chain_depth_distribution.begin());
      }
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("journals_per_discipline"))
      s.journals_per_discipline = j.at("journals_per_discipline");
    if (j.contains("issues_per_year")) s.issues_per_year = j.at("issues_per_year");
    if (j.contains("generate_web")) s.generate_web = j.at("generate_web");
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError("INVALID_SPEC", e.what());
  }
  s.validate();
  return s;
}

inline CorpusSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("IO", "cannot open spec '" + path + "'");
  try {
    return spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError("INVALID_SPEC", e.what());
  }
}

// --- mock web --------------------------------------------------------------------

struct MockPage {
  Format format = Format::Html;
  std::string body;
};

struct MockProviderData {
  std::string name;
  std::vector<std::string> blocklist;
  std::map<std::string, std::vector<std::string>> index;  // query -> result URLs
};

// Immutable after construction; safe to share between fetching threads.
struct MockWeb {
  std::map<std::string, MockPage> pages;  // canonical URL -> page
  std::set<std::string> dead_links;       // canonical URLs referenced but absent
  std::vector<MockProviderData> providers;

  const MockPage* find(const std::string& u) const {
    auto canon = url::normalize_url(u);
    if (!canon) return nullptr;
    auto it = pages.find(*canon);
    return it == pages.end() ? nullptr : &it->second;
  }

  std::set<std::string> hosts() const {
    std::set<std::string> out;
    for (auto& [u, p] : pages) out.insert(url::host_of(u));
    for (auto& u : dead_links) out.insert(url::host_of(u));
    return out;
  }
};

class MockSearchProvider final : public SearchProvider {
 public:
  explicit MockSearchProvider(const MockProviderData& data) : data_(data) {}

  std::string name() const override { return data_.name; }
  std::vector<std::string> query(std::string_view author, std::string_view title) const override {
    auto it = data_.index.find(build_query(author, title));
    return it == data_.index.end() ? std::vector<std::string>{} : it->second;
  }
  std::vector<std::string> blocklist() const override { return data_.blocklist; }

 private:
  const MockProviderData& data_;
};

// Serves MockWeb pages; anything absent is a 404. Never touches the network.
class MockFetcher final : public Fetcher {
 public:
  struct LogEntry {
    std::string url;
    int status;
    std::string host;
  };

  explicit MockFetcher(const MockWeb& web) : web_(web) {}

  FetchResult fetch(const std::string& u) const override {
    FetchResult r;
    if (const MockPage* page = web_.find(u)) {
      r.status = 200;
      r.format = page->format;
      r.body = page->body;
    } else {
      r.status = 404;
      r.error = "not found";
    }
    std::lock_guard lock(mu_);
    log_.push_back({u, r.status, url::host_of(u)});
    return r;
  }

  std::vector<LogEntry> log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  const MockWeb& web_;
  mutable std::mutex mu_;
  mutable std::vector<LogEntry> log_;
};

inline std::vector<std::unique_ptr<SearchProvider>> make_mock_providers(const MockWeb& web) {
  std::vector<std::unique_ptr<SearchProvider>> out;
  for (const auto& p : web.providers) out.push_back(std::make_unique<MockSearchProvider>(p));
  return out;
}

// --- ground truth ----------------------------------------------------------------

struct GroundTruth {
  std::string id;
  bool oa = false;                  // a full text exists somewhere on the mock web
  std::optional<int> chain_depth;   // links to follow from the search hit (OA only)
  bool reachable = false;           // a matcher-accepted page lies within depth 3
  bool abstract_decoy = false;
  bool dead_link = false;

  bool operator==(const GroundTruth&) const = default;
};

inline nlohmann::ordered_json to_json(const GroundTruth& g) {
  nlohmann::ordered_json j;
  j["id"] = g.id;
  j["oa"] = g.oa;
  j["chain_depth"] = g.chain_depth ? nlohmann::ordered_json(*g.chain_depth) : nullptr;
  j["reachable"] = g.reachable;
  j["abstract_decoy"] = g.abstract_decoy;
  j["dead_link"] = g.dead_link;
  return j;
}

inline GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth g;
  g.id = j.at("id").get<std::string>();
  g.oa = j.at("oa").get<bool>();
  if (j.contains("chain_depth") && !j.at("chain_depth").is_null())
    g.chain_depth = j.at("chain_depth").get<int>();
  g.reachable = j.value("reachable", false);
  g.abstract_decoy = j.value("abstract_decoy", false);
  g.dead_link = j.value("dead_link", false);
  return g;
}

inline std::vector<GroundTruth> load_ground_truth(const std::string& path) {
  std::vector<GroundTruth> out;
  oacite::detail::for_each_jsonl_line(
      path, [&](const nlohmann::json& j, std::size_t) { out.push_back(ground_truth_from_json(j)); });
  return out;
}

inline void save_ground_truth(const std::vector<GroundTruth>& truth, const std::string& path) {
  std::string buf;
  for (auto& g : truth) buf += to_json(g).dump() + "\n";
  oacite::detail::write_text_file(path, buf);
}

struct Corpus {
  std::vector<ArticleRecord> records;  // oa_status holds the planted label
  std::vector<GroundTruth> truth;      // parallel to records
  MockWeb web;
};

// --- reachability checker --------------------------------------------------------

namespace detail {

inline std::vector<std::string> all_hrefs(const std::string& html, const std::string& base) {
  std::vector<std::string> out;
  for (const auto& a : html::parse(html).links) {
    if (a.href.empty() || a.href[0] == '#') continue;
    auto canon = url::normalize_url(url::resolve_reference(base, a.href));
    if (canon) out.push_back(*canon);
  }
  return out;
}

}  // namespace detail

// Independent of the robot: plain breadth-first search over every hyperlink
// from the article's search results, accepting any page the matcher accepts.
inline bool reachable_within(const MockWeb& web, const ArticleRecord& record, int max_depth,
                             const CrawlConfig& config = {}) {
  const std::string q = build_query(record);
  std::deque<std::pair<std::string, int>> queue;
  std::unordered_set<std::string> seen;
  for (const auto& p : web.providers) {
    auto it = p.index.find(q);
    if (it == p.index.end()) continue;
    for (const auto& u : it->second)
      if (auto canon = url::normalize_url(u); canon && seen.insert(*canon).second)
        queue.emplace_back(*canon, 0);
  }
  while (!queue.empty()) {
    auto [u, depth] = queue.front();
    queue.pop_front();
    auto page_it = web.pages.find(u);
    if (page_it == web.pages.end()) continue;
    const MockPage& page = page_it->second;
    auto extracted = extract_text(page.body, page.format, nullptr);
    if (!extracted) continue;
    if (is_found(match_full_text(extracted->text, record, config))) return true;
    if (page.format != Format::Html || depth >= max_depth) continue;
    for (auto& next : detail::all_hrefs(page.body, u))
      if (seen.insert(next).second) queue.emplace_back(next, depth + 1);
  }
  return false;
}

// --- generation ------------------------------------------------------------------

namespace detail {

inline constexpr std::string_view kVocabulary[] = {
    "adaptive",    "analysis",    "archive",     "behaviour",   "boundary",    "capital",
    "cellular",    "change",      "child",       "clinical",    "cognitive",   "cohort",
    "community",   "comparative", "competition", "complex",     "conflict",    "consumer",
    "contract",    "cortex",      "court",       "cultural",    "decision",    "demand",
    "democratic",  "development", "diffusion",   "dynamics",    "ecology",     "economic",
    "education",   "effects",     "election",    "emotion",     "empirical",   "energy",
    "enzyme",      "equilibrium", "evidence",    "evolution",   "expression",  "family",
    "federal",     "field",       "firm",        "fiscal",      "framework",   "gender",
    "genetic",     "growth",      "health",      "hospital",    "household",   "identity",
    "immune",      "income",      "industry",    "inequality",  "inference",   "innovation",
    "institution", "insurance",   "labour",      "language",    "learning",    "legal",
    "liability",   "market",      "medical",     "membrane",    "memory",      "migration",
    "model",       "monetary",    "motor",       "network",     "neural",      "nursing",
    "organization","outcome",     "pattern",     "perception",  "policy",      "political",
    "population",  "poverty",     "pricing",     "protein",     "public",      "quality",
    "receptor",    "reform",      "regional",    "regulation",  "response",    "risk",
    "rural",       "school",      "selection",   "sequence",    "signal",      "social",
    "species",     "strategy",    "stress",      "structure",   "student",     "survey",
    "teacher",     "theory",      "therapy",     "trade",       "transfer",    "trust",
    "urban",       "variation",   "voting",      "welfare",     "women",       "workplace",
    "youth",       "mobility",    "kinship",     "tissue",      "habitat",     "sampling",
    "protocol",    "tariff",      "wages",       "judicial",    "merger",      "audit",
    "nutrition",   "obesity",     "anxiety",     "attention",   "contagion",   "crime",
    "deterrence",  "disparity",   "dispersal",   "efficiency",  "ethics",      "exchange",
    "foraging",    "governance",  "hormone",     "imaging",     "juvenile",    "kidney",
    "leadership",  "lineage",     "mutation",    "mortality",   "parenting",   "pathway",
    "pension",     "plasticity",  "predation",   "productivity","reasoning",   "resilience",
    "savings",     "secretion",   "settlement",  "solvency",    "symbiosis",   "taxation",
    "tenure",      "tolerance",   "turnover",    "vaccine",     "venture",     "virulence"};

inline constexpr std::string_view kSurnames[] = {
    "Smith",    "Johnson",  "Moreau",   "Okafor",   "Lindqvist","Garcia",   "Martin",
    "Tremblay", "Gagnon",   "Roy",      "Cote",     "Bouchard", "Gauthier", "Morin",
    "Lavoie",   "Fortin",   "Ouellet",  "Pelletier","Belanger", "Levesque", "Bergeron",
    "Leblanc",  "Paquette", "Girard",   "Simard",   "Boucher",  "Caron",    "Beaulieu",
    "Cloutier", "Dube",     "Poirier",  "Fournier", "Lapointe", "Leclerc",  "Lefebvre",
    "Poulin",   "Thibault", "St-Pierre","Nadeau",   "Martel",   "Muller",   "Schmidt",
    "Schneider","Fischer",  "Weber",    "Meyer",    "Wagner",   "Becker",   "Tanaka",
    "Suzuki",   "Watanabe", "Ito",      "Yamamoto", "Nakamura", "Kobayashi","Rossi",
    "Russo",    "Ferrari",  "Esposito", "Bianchi",  "Romano",   "Colombo",  "Andersson",
    "Karlsson", "Nilsson",  "Eriksson", "Larsson",  "Olsson",   "Persson",  "Jansen",
    "Visser",   "Smit",     "Bakker",   "Brown",    "Taylor",   "Wilson",   "Thompson",
    "White",    "Walker",   "Wright",   "Robinson", "Hughes",   "Edwards",  "Green"};

inline constexpr std::string_view kArchiveHosts[] = {
    "eprints.uni-alpha.example", "www.cs.uni-beta.example", "citeseer.mock.example",
    "papers.institute-gamma.example", "www.dept-delta.example", "arxiv.mock.example"};

inline constexpr std::string_view kPublisherHost = "publisher.example";
inline constexpr std::string_view kAdHost = "ads.mocksearch.example";
inline constexpr std::string_view kStaleHost = "old.homepages.example";

template <typename Seq>
std::string_view pick(Rng& rng, const Seq& seq) {
  return seq[rng.uniform_index(std::size(seq))];
}

inline std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline std::string sentence(Rng& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += i == 0 ? capitalize(pick(rng, kVocabulary)) : std::string(pick(rng, kVocabulary));
  }
  return s + ".";
}

inline std::string paragraph(Rng& rng, std::size_t sentences) {
  std::string p;
  for (std::size_t i = 0; i < sentences; ++i) {
    if (i) p += ' ';
    p += sentence(rng, 8 + rng.uniform_index(6));
  }
  return p;
}

inline std::string journal_code(std::string_view discipline) {
  std::string code;
  for (char c : discipline)
    if (std::isalpha(static_cast<unsigned char>(c)) && code.size() < 4)
      code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return code;
}

inline std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string slug(std::string_view title) {
  std::string s;
  for (char c : title) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else if (!s.empty() && s.back() != '-')
      s.push_back('-');
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s;
}

struct DocParts {
  std::string abstract;
  std::vector<std::string> sections;    // body paragraphs
  std::vector<std::string> references;  // citation lines
};

inline DocParts make_document_parts(Rng& rng) {
  DocParts d;
  d.abstract = paragraph(rng, 4);
  const std::size_t n_paras = 8 + rng.uniform_index(4);
  for (std::size_t i = 0; i < n_paras; ++i) d.sections.push_back(paragraph(rng, 5));
  const std::size_t n_refs = 6 + rng.uniform_index(6);
  for (std::size_t i = 0; i < n_refs; ++i) {
    std::ostringstream r;
    r << "[" << (i + 1) << "] " << pick(rng, kSurnames) << ", "
      << static_cast<char>('A' + rng.uniform_index(26)) << ". (" << (1980 + rng.uniform_index(24))
      << ") " << capitalize(pick(rng, kVocabulary)) << ' ' << pick(rng, kVocabulary) << ' '
      << pick(rng, kVocabulary) << ". Journal of " << capitalize(pick(rng, kVocabulary)) << ' '
      << (1 + rng.uniform_index(40)) << ": " << (1 + rng.uniform_index(500)) << '-'
      << (501 + rng.uniform_index(400)) << '.';
    d.references.push_back(r.str());
  }
  return d;
}

inline std::string author_line(const ArticleRecord& r, Rng& rng) {
  return std::string(1, static_cast<char>('A' + rng.uniform_index(26))) + ". " +
         r.first_author_surname + " and " + std::string(pick(rng, kSurnames)) + ", " +
         capitalize(pick(rng, kVocabulary)) + " Institute, " + r.country;
}

inline std::string full_text_plain(const ArticleRecord& r, Rng& rng) {
  DocParts d = make_document_parts(rng);
  std::string s = r.title + "\n" + author_line(r, rng) + "\n\nAbstract\n" + d.abstract + "\n\n";
  for (std::size_t i = 0; i < d.sections.size(); ++i)
    s += std::to_string(i + 1) + " " + capitalize(pick(rng, kVocabulary)) + "\n" + d.sections[i] +
         "\n\n";
  s += "References\n";
  for (auto& ref : d.references) s += ref + "\n";
  return s;
}

inline std::string full_text_html(const ArticleRecord& r, Rng& rng) {
  DocParts d = make_document_parts(rng);
  std::string s = "<html><head><title>" + html_escape(r.title) + "</title></head><body>\n<h1>" +
                  html_escape(r.title) + "</h1>\n<p>" + html_escape(author_line(r, rng)) +
                  "</p>\n<h2>Abstract</h2><p>" + d.abstract + "</p>\n";
  for (auto& para : d.sections) s += "<p>" + para + "</p>\n";
  s += "<h2>References</h2>\n<ol>\n";
  for (auto& ref : d.references) s += "<li>" + html_escape(ref) + "</li>\n";
  s += "</ol>\n<p><a href=\"/\">Home</a></p></body></html>\n";
  return s;
}

struct Link {
  std::string href;
  std::string text;
};

// Title, author and abstract; no references. Links follow the abstract.
inline std::string abstract_page(const ArticleRecord& r, Rng& rng, const std::vector<Link>& links) {
  std::string s = "<html><head><title>" + html_escape(r.title) +
                  "</title><script>var tracker = 'references bibliography';</script></head><body>\n"
                  "<h1>" +
                  html_escape(r.title) + "</h1>\n<p>" + html_escape(author_line(r, rng)) +
                  "</p>\n<h2>Abstract</h2>\n<p>" + paragraph(rng, 10) + "</p>\n<ul>\n";
  for (auto& l : links)
    s += "<li><a href=\"" + html_escape(l.href) + "\">" + html_escape(l.text) + "</a></li>\n";
  s += "<li><a href=\"/\">Home</a></li>\n<li><a href=\"/login\">Login</a></li>\n"
       "<li><a href=\"/contact\">Contact</a></li>\n</ul></body></html>\n";
  return s;
}

inline std::string paywall_page(Rng& rng) {
  return "<html><body><h1>Access denied</h1><p>" + paragraph(rng, 2) +
         "</p><p><a href=\"/subscribe\">Subscribe</a></p></body></html>\n";
}

inline std::int64_t draw_citations(Rng& rng, const CitationModel& model, double multiplier,
                                   bool is_oa) {
  double uncited = model.uncited_mass;
  double mean_cited = model.mean_cited;
  if (is_oa && multiplier != 1.0) {
    // Scale the overall mean by `multiplier`: stretch the cited tail when
    // possible, otherwise shrink the cited share (all cited at exactly 1).
    if (multiplier * model.mean_cited >= 1.0) {
      mean_cited = multiplier * model.mean_cited;
    } else {
      uncited = 1.0 - multiplier * (1.0 - model.uncited_mass) * model.mean_cited;
      mean_cited = 1.0;
    }
  }
  if (rng.bernoulli(uncited)) return 0;
  return 1 + static_cast<std::int64_t>(rng.geometric(1.0 / mean_cited));
}

inline double oa_probability_for(const CorpusSpec& spec, const std::string& discipline, int year) {
  const std::string y = std::to_string(year);
  for (const std::string& key : {discipline + "|" + y, discipline + "|*", "*|" + y}) {
    auto it = spec.oa_probability_by_cell.find(key);
    if (it != spec.oa_probability_by_cell.end()) return it->second;
  }
  return spec.oa_probability;
}

inline void add_page(MockWeb& web, const std::string& u, Format f, std::string body) {
  web.pages[url::normalize_url(u).value()] = MockPage{f, std::move(body)};
}

inline void add_dead(MockWeb& web, const std::string& u) {
  web.dead_links.insert(url::normalize_url(u).value());
}

// A presentation variant of `u` that canonicalizes back to it.
inline std::string noisy_variant(const std::string& u) {
  std::string out = u;
  const auto host_start = out.find("://") + 3;
  const auto host_end = out.find('/', host_start);
  for (auto i = host_start; i < host_end; ++i)
    out[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i])));
  return "HTTP" + out.substr(4) + "#top";
}

inline void build_web(Corpus& c, const CorpusSpec& spec) {
  Rng rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  MockWeb& web = c.web;
  MockProviderData alpha{"mocksearch-alpha", {std::string(kAdHost)}, {}};
  MockProviderData beta{"mocksearch-beta", {std::string(kAdHost)}, {}};

  // Primary search hit per article (empty when none) for use as noise elsewhere.
  std::vector<std::string> primary(c.records.size());
  std::vector<std::vector<std::string>> results_a(c.records.size()), results_b(c.records.size());

  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const ArticleRecord& r = c.records[i];
    GroundTruth& g = c.truth[i];
    const std::string host(pick(rng, kArchiveHosts));
    const std::string base = "http://" + host + "/papers/" + r.id + "/";
    std::vector<std::string> hits;

    if (g.oa) {
      const int depth = static_cast<int>(rng.categorical(spec.decoys.chain_depth_distribution));
      g.chain_depth = depth;
      const bool html_full_text = rng.bernoulli(0.3);
      const std::string full_url = base + (html_full_text ? "fulltext.html" : "fulltext.pdf");
      // Mock "PDFs" carry their text layer directly (served as text/plain).
      add_page(web, full_url, html_full_text ? Format::Html : Format::Text,
               html_full_text ? full_text_html(r, rng) : full_text_plain(r, rng));
      std::string next = full_url;
      for (int k = depth - 1; k >= 0; --k) {
        const std::string page_url = base + slug(r.title) + "-part" + std::to_string(k) + ".html";
        std::vector<Link> links;
        if (k == depth - 1)
          links.push_back({next.substr(base.size()), "Full text (PDF)"});
        else
          links.push_back({next.substr(base.size()), "Continue reading"});
        add_page(web, page_url, Format::Html, abstract_page(r, rng, links));
        next = page_url;
      }
      hits.push_back(next);
    }

    if (rng.bernoulli(spec.decoys.abstract_page_prob)) {
      g.abstract_decoy = true;
      const std::string abs_url = "http://" + std::string(kPublisherHost) + "/abstracts/" + r.id + ".html";
      const std::string buy_url = "http://" + std::string(kPublisherHost) + "/buy/" + r.id;
      const std::string pdf_url = "http://" + std::string(kPublisherHost) + "/pdf/" + r.id + ".pdf";
      add_page(web, abs_url, Format::Html,
               abstract_page(r, rng, {{buy_url, "Purchase this article"}, {pdf_url, "Download PDF"}}));
      add_page(web, buy_url, Format::Html, paywall_page(rng));
      add_dead(web, pdf_url);
      hits.push_back(abs_url);
    }

    if (rng.bernoulli(spec.decoys.dead_link_prob)) {
      g.dead_link = true;
      const std::string dead = "http://" + std::string(kStaleHost) + "/~" +
                               slug(r.first_author_surname) + "/" + r.id + ".pdf";
      add_dead(web, dead);
      hits.push_back(dead);
    }

    primary[i] = hits.empty() ? std::string() : hits.front();
    for (const auto& h : hits) {
      results_a[i].push_back(h);
      if (rng.bernoulli(0.5)) results_b[i].push_back(noisy_variant(h));
    }
    const std::string ad = "http://" + std::string(kAdHost) + "/click?id=" + r.id;
    results_a[i].push_back(ad);
    results_b[i].insert(results_b[i].begin(), ad);
  }

  // Unrelated hits: another article's primary page.
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const std::size_t noise = rng.uniform_index(3);
    for (std::size_t k = 0; k < noise; ++k) {
      const std::size_t j = rng.uniform_index(c.records.size());
      if (j == i || primary[j].empty()) continue;
      (rng.bernoulli(0.5) ? results_a[i] : results_b[i]).push_back(primary[j]);
    }
    const std::string q = build_query(c.records[i]);
    if (!results_a[i].empty()) alpha.index[q] = results_a[i];
    if (!results_b[i].empty()) beta.index[q] = results_b[i];
  }
  web.providers = {std::move(alpha), std::move(beta)};

  for (std::size_t i = 0; i < c.records.size(); ++i)
    c.truth[i].reachable = reachable_within(web, c.records[i], 3);
}

}  // namespace detail

// Same spec (seed included) gives byte-identical records, truth and web.
inline Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Corpus c;
  c.records.reserve(spec.n_articles);
  std::unordered_set<std::string> titles;
  const int n_years = spec.year_to - spec.year_from + 1;

  for (std::size_t i = 0; i < spec.n_articles; ++i) {
    ArticleRecord r;
    char id[16];
    std::snprintf(id, sizeof id, "A%06zu", i + 1);
    r.id = id;
    r.discipline = spec.disciplines[rng.uniform_index(spec.disciplines.size())];
    r.year = spec.year_from + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_years)));
    const auto journal = 1 + rng.uniform_index(static_cast<std::uint64_t>(spec.journals_per_discipline));
    r.journal_id = detail::journal_code(r.discipline) + "-J" + std::to_string(journal);
    const auto issue = 1 + rng.uniform_index(static_cast<std::uint64_t>(spec.issues_per_year));
    r.issue_key = make_issue_key(r.journal_id, r.year, std::to_string(issue));
    r.country = spec.countries[rng.uniform_index(spec.countries.size())];
    r.first_author_surname = std::string(detail::pick(rng, detail::kSurnames));
    do {
      const std::size_t words = 6 + rng.uniform_index(5);
      std::string t = detail::capitalize(detail::pick(rng, detail::kVocabulary));
      for (std::size_t w = 1; w < words; ++w) t += " " + std::string(detail::pick(rng, detail::kVocabulary));
      r.title = std::move(t);
    } while (!titles.insert(r.title).second);
    if (!spec.oa_count)
      r.oa_status = rng.bernoulli(detail::oa_probability_for(spec, r.discipline, r.year))
                        ? OaStatus::OA
                        : OaStatus::NOA;
    c.records.push_back(std::move(r));
  }
  if (spec.oa_count) {
    for (auto& r : c.records) r.oa_status = OaStatus::NOA;
    for (std::size_t idx : rng.sample_without_replacement(c.records.size(), *spec.oa_count))
      c.records[idx].oa_status = OaStatus::OA;
  }
  for (auto& r : c.records)
    r.citation_count = detail::draw_citations(rng, spec.citation_model,
                                              spec.oa_citation_multiplier,
                                              r.oa_status == OaStatus::OA);

  c.truth.resize(c.records.size());
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    c.truth[i].id = c.records[i].id;
    c.truth[i].oa = c.records[i].oa_status == OaStatus::OA;
  }
  if (spec.generate_web) detail::build_web(c, spec);
  return c;
}

// --- export / import ---------------------------------------------------------

// Writes <dir>/records.jsonl (statuses UNKNOWN), <dir>/ground_truth.jsonl and
// <dir>/mockweb/{index.json,pages/*}.
inline void export_corpus(const Corpus& c, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "mockweb" / "pages", ec);
  if (ec) throw CorpusError("IO", "cannot create '" + dir.string() + "': " + ec.message());

  std::vector<ArticleRecord> blind = c.records;
  for (auto& r : blind) r.oa_status = OaStatus::UNKNOWN;
  save_records(blind, (dir / "records.jsonl").string());
  save_ground_truth(c.truth, (dir / "ground_truth.jsonl").string());

  nlohmann::ordered_json index;
  index["providers"] = nlohmann::ordered_json::array();
  for (const auto& p : c.web.providers) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["blocklist"] = p.blocklist;
    pj["queries"] = nlohmann::ordered_json::object();
    for (const auto& [q, urls] : p.index) pj["queries"][q] = urls;
    index["providers"].push_back(std::move(pj));
  }
  index["pages"] = nlohmann::ordered_json::object();
  std::size_t n = 0;
  for (const auto& [u, page] : c.web.pages) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.%s", ++n,
                  page.format == Format::Html ? "html" : "txt");
    oacite::detail::write_text_file((dir / "mockweb" / "pages" / name).string(), page.body);
    index["pages"][u] = {{"file", std::string("pages/") + name},
                         {"format", std::string(to_string(page.format))}};
  }
  index["dead_links"] = c.web.dead_links;
  oacite::detail::write_text_file((dir / "mockweb" / "index.json").string(), index.dump(1) + "\n");
}

inline MockWeb load_mock_web(const std::filesystem::path& mockweb_dir) {
  std::ifstream in(mockweb_dir / "index.json");
  if (!in) throw CorpusError("IO", "cannot open '" + (mockweb_dir / "index.json").string() + "'");
  MockWeb web;
  try {
    const auto index = nlohmann::json::parse(in);
    for (const auto& pj : index.at("providers")) {
      MockProviderData p;
      p.name = pj.at("name").get<std::string>();
      p.blocklist = pj.value("blocklist", std::vector<std::string>{});
      for (auto it = pj.at("queries").begin(); it != pj.at("queries").end(); ++it)
        p.index[it.key()] = it->get<std::vector<std::string>>();
      web.providers.push_back(std::move(p));
    }
    if (index.contains("pages")) {
      for (auto it = index.at("pages").begin(); it != index.at("pages").end(); ++it) {
        const auto file = mockweb_dir / it->at("file").get<std::string>();
        std::ifstream pf(file, std::ios::binary);
        if (!pf) throw CorpusError("IO", "missing page file '" + file.string() + "'");
        std::ostringstream body;
        body << pf.rdbuf();
        web.pages[it.key()] = MockPage{parse_format(it->at("format").get<std::string>()), body.str()};
      }
    }
    if (index.contains("dead_links"))
      for (const auto& d : index.at("dead_links")) web.dead_links.insert(d.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError("INVALID_MOCKWEB", e.what());
  }
  return web;
}

// --- audit -------------------------------------------------------------------------

class AuditError : public CorpusError {
 public:
  AuditError(const std::string& message, std::size_t robot_oa, std::size_t robot_noa)
      : CorpusError("AUDIT_INFEASIBLE", message), robot_oa_(robot_oa), robot_noa_(robot_noa) {}
  std::size_t robot_oa() const noexcept { return robot_oa_; }
  std::size_t robot_noa() const noexcept { return robot_noa_; }

 private:
  std::size_t robot_oa_, robot_noa_;
};

// Draws `sample_size` robot-OA and `sample_size` robot-NOA articles uniformly
// without replacement and checks them against ground truth.
inline stats::ConfusionMatrix run_audit(const std::vector<DetectionEvidence>& detections,
                                        const std::vector<GroundTruth>& truth,
                                        std::size_t sample_size, std::uint64_t seed) {
  std::unordered_map<std::string, bool> truly_oa;
  for (const auto& g : truth) truly_oa[g.id] = g.oa;

  std::vector<std::string> tagged_oa, tagged_noa;
  for (const auto& d : detections) {
    if (!truly_oa.count(d.article_id))
      throw CorpusError("MISSING_TRUTH", "no ground truth for '" + d.article_id + "'");
    if (d.verdict == OaStatus::OA) tagged_oa.push_back(d.article_id);
    else if (d.verdict == OaStatus::NOA) tagged_noa.push_back(d.article_id);
  }
  std::sort(tagged_oa.begin(), tagged_oa.end());
  std::sort(tagged_noa.begin(), tagged_noa.end());
  if (tagged_oa.size() < sample_size || tagged_noa.size() < sample_size)
    throw AuditError("need " + std::to_string(sample_size) + " robot-OA and robot-NOA records; have " +
                         std::to_string(tagged_oa.size()) + " OA and " +
                         std::to_string(tagged_noa.size()) + " NOA",
                     tagged_oa.size(), tagged_noa.size());

  Rng rng(seed);
  std::unique_ptr<bool[]> oa_truth(new bool[sample_size]), noa_truth(new bool[sample_size]);
  auto oa_pick = rng.sample_without_replacement(tagged_oa.size(), sample_size);
  auto noa_pick = rng.sample_without_replacement(tagged_noa.size(), sample_size);
  for (std::size_t i = 0; i < sample_size; ++i) {
    oa_truth[i] = truly_oa[tagged_oa[oa_pick[i]]];
    noa_truth[i] = truly_oa[tagged_noa[noa_pick[i]]];
  }
  return stats::build_confusion_from_audit(std::span<const bool>(oa_truth.get(), sample_size),
                                           std::span<const bool>(noa_truth.get(), sample_size));
}

}  // namespace oacite::corpus

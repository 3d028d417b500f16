#include "verbatim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/util.hpp"

namespace fs = std::filesystem;

namespace verbatim {

std::string_view category_name(Category c) {
    switch (c) {
        case Category::Lawsuit: return "lawsuit";
        case Category::Arbitrary: return "arbitrary";
        case Category::New: return "new";
    }
    return "unknown";
}

std::optional<Category> category_from_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "lawsuit") return Category::Lawsuit;
    if (lower == "arbitrary") return Category::Arbitrary;
    if (lower == "new") return Category::New;
    return std::nullopt;
}

Date Date::parse(std::string_view iso) {
    const auto fail = [&] { throw Error("invalid date, expected YYYY-MM-DD: " + std::string(iso)); };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') fail();
    Date d;
    auto num = [&](std::string_view part, int& out) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || p != part.data() + part.size()) fail();
    };
    num(iso.substr(0, 4), d.year);
    num(iso.substr(5, 2), d.month);
    num(iso.substr(8, 2), d.day);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) fail();
    return d;
}

std::string Date::to_string() const {
    char buf[11];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

NormalizeOptions NormalizeOptions::defaults() {
    NormalizeOptions o;
    o.strip_patterns = {
        R"(^\s*(image|photo|video|audio|credit|caption)s?\s*[:\-])",
        R"(^\s*advertisement\s*$)",
        R"(^\s*(photograph|illustration|image)s?\s+by\b)",
        R"(^\s*related (articles?|coverage)\b)",
        R"(^\s*sign up for\b)",
        R"(^\s*\[[^\]]*\]\s*$)",
    };
    return o;
}

namespace {

std::string normalize_newlines(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
        } else {
            out.push_back(in[i]);
        }
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.emplace_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return lines;
}

std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns) {
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        try {
            out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw ConfigError("bad strip pattern '" + p + "': " + e.what());
        }
    }
    return out;
}

}  // namespace

std::string normalize_article(std::string_view raw_text, std::string_view title,
                              std::string_view byline, const NormalizeOptions& opts) {
    if (title.empty() || byline.empty()) {
        throw Error("normalize_article: title and byline must be non-empty");
    }
    auto chars = uni::decode_utf8_or_throw(normalize_newlines(raw_text));
    chars = uni::compose_canonical(chars);
    if (opts.ascii_fold) chars = uni::ascii_fold(chars);
    const std::string text = uni::encode_utf8(chars);

    const std::string title_n = uni::compose_canonical_utf8(title);
    const std::string byline_n = uni::compose_canonical_utf8(byline);

    const auto patterns =
        opts.apply_strip_patterns ? compile_patterns(opts.strip_patterns) : std::vector<std::regex>{};

    std::vector<std::string> kept;
    for (auto& line : split_lines(text)) {
        const auto t = trim(line);
        if (t == trim(title_n)) continue;
        if (t == trim(byline_n)) continue;  // re-seated at the top below
        bool stripped = false;
        for (const auto& re : patterns) {
            if (std::regex_search(line, re)) {
                stripped = true;
                break;
            }
        }
        if (stripped) continue;
        kept.push_back(std::move(line));
    }

    // Collapse blank runs to one blank line and trim the edges.
    std::string rest;
    bool pending_blank = false;
    bool any = false;
    for (const auto& line : kept) {
        if (trim(line).empty()) {
            if (any) pending_blank = true;
            continue;
        }
        if (any) rest += pending_blank ? "\n\n" : "\n";
        pending_blank = false;
        rest += line;
        any = true;
    }

    if (uni::char_count(rest) < opts.min_body_chars) {
        throw EmptyBody("normalized article text has " + std::to_string(uni::char_count(rest)) +
                        " characters, below the minimum of " +
                        std::to_string(opts.min_body_chars));
    }
    return byline_n + "\n" + rest;
}

void check_category_date(Category category, const Date& date, std::string_view article_id) {
    if (category == Category::New && date < kNewEarliest) {
        throw CategoryDateViolation("article '" + std::string(article_id) + "' dated " +
                                    date.to_string() + " is too old for category 'new' (earliest " +
                                    kNewEarliest.to_string() + ")");
    }
    if (category == Category::Arbitrary && kArbitraryLatest < date) {
        throw CategoryDateViolation("article '" + std::string(article_id) + "' dated " +
                                    date.to_string() +
                                    " is too recent for category 'arbitrary' (latest " +
                                    kArbitraryLatest.to_string() + ")");
    }
}

Article parse_ingestion_file(const std::string& path, std::string_view content,
                             std::optional<Category> expected_category,
                             const NormalizeOptions& opts) {
    const std::string text = normalize_newlines(content);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;

    std::string id, title, byline, date_str, category_str;
    bool nostrip = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) break;  // header ends at the first blank line
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError(path, lineno, "header line is not 'key: value'");
        }
        const std::string key{trim(line.substr(0, colon))};
        const std::string value{trim(line.substr(colon + 1))};
        if (key == "id") {
            id = value;
        } else if (key == "title") {
            title = value;
        } else if (key == "byline") {
            byline = value;
        } else if (key == "category") {
            category_str = value;
        } else if (key == "published_date") {
            date_str = value;
        } else if (key == "strip") {
            if (value == "none") {
                nostrip = true;
            } else if (value != "default") {
                throw ParseError(path, lineno, "strip must be 'none' or 'default'");
            }
        } else {
            throw ParseError(path, lineno, "unknown header key '" + key + "'");
        }
    }
    if (id.empty()) throw ParseError(path, lineno, "missing 'id' header");
    if (title.empty()) throw ParseError(path, lineno, "missing 'title' header");
    if (byline.empty()) throw ParseError(path, lineno, "missing 'byline' header");
    if (date_str.empty()) throw ParseError(path, lineno, "missing 'published_date' header");

    Category category;
    if (!category_str.empty()) {
        auto parsed = category_from_name(category_str);
        if (!parsed) throw ParseError(path, lineno, "unknown category '" + category_str + "'");
        if (expected_category && *parsed != *expected_category) {
            throw ParseError(path, lineno, "file category '" + category_str +
                                               "' contradicts the directory category '" +
                                               std::string(category_name(*expected_category)) + "'");
        }
        category = *parsed;
    } else if (expected_category) {
        category = *expected_category;
    } else {
        throw ParseError(path, lineno, "no category in header and none supplied");
    }

    Date date;
    try {
        date = Date::parse(date_str);
    } catch (const Error& e) {
        throw ParseError(path, lineno, e.what());
    }

    std::string raw_body;
    {
        std::ostringstream rest;
        rest << in.rdbuf();
        raw_body = rest.str();
    }

    NormalizeOptions file_opts = opts;
    if (nostrip) file_opts.apply_strip_patterns = false;

    Article a;
    a.id = std::move(id);
    a.title = uni::compose_canonical_utf8(title);
    a.byline = uni::compose_canonical_utf8(byline);
    a.category = category;
    a.published_date = date;
    a.body = normalize_article(raw_body, a.title, a.byline, file_opts);
    a.char_length = uni::char_count(a.body);
    check_category_date(a.category, a.published_date, a.id);
    return a;
}

Corpus Corpus::load_dir(const std::string& path, Category category,
                        const NormalizeOptions& opts) {
    if (!fs::is_directory(path)) throw IoError("not a directory: " + path);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    Corpus corpus;
    for (const auto& file : files) {
        corpus.add(parse_ingestion_file(file.string(), read_file(file.string()), category, opts));
    }
    return corpus;
}

void Corpus::add(Article article) {
    for (const auto& existing : articles_) {
        if (existing.id == article.id) {
            throw DuplicateId("duplicate article id '" + article.id + "'");
        }
    }
    check_category_date(article.category, article.published_date, article.id);
    if (article.char_length != uni::char_count(article.body)) {
        throw Error("article '" + article.id + "' char_length does not match its body");
    }
    articles_.push_back(std::move(article));
}

void Corpus::merge(const Corpus& other) {
    for (const auto& a : other.articles_) add(a);
}

const Article* Corpus::find(std::string_view id) const {
    for (const auto& a : articles_) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

std::set<Category> Corpus::categories_present() const {
    std::set<Category> out;
    for (const auto& a : articles_) out.insert(a.category);
    return out;
}

Corpus Corpus::load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path, lineno, e.what());
        }
        try {
            Article a;
            a.id = j.at("id").get<std::string>();
            a.title = j.at("title").get<std::string>();
            a.byline = j.at("byline").get<std::string>();
            auto cat = category_from_name(j.at("category").get<std::string>());
            if (!cat) throw Error("unknown category");
            a.category = *cat;
            a.published_date = Date::parse(j.at("published_date").get<std::string>());
            a.body = j.at("body").get<std::string>();
            a.char_length = j.at("char_length").get<std::size_t>();
            corpus.add(std::move(a));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path, lineno, e.what());
        } catch (const Error& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return corpus;
}

void Corpus::save_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open corpus file for writing: " + path);
    for (const auto& a : articles_) {
        nlohmann::ordered_json j;
        j["id"] = a.id;
        j["title"] = a.title;
        j["byline"] = a.byline;
        j["category"] = std::string(category_name(a.category));
        j["published_date"] = a.published_date.to_string();
        j["char_length"] = a.char_length;
        j["body"] = a.body;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("error writing corpus file: " + path);
}

}  // namespace verbatim

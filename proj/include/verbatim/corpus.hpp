#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace verbatim {

enum class Category { Lawsuit, Arbitrary, New };

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static Date parse(std::string_view iso);  // "YYYY-MM-DD", throws Error
    std::string to_string() const;
};

// Publication-date bounds for the three article sets: arbitrary articles
// predate the training cutoffs, new articles postdate every model studied.
inline constexpr Date kArbitraryLatest{2022, 12, 27};
inline constexpr Date kNewEarliest{2024, 7, 5};

struct Article {
    std::string id;
    std::string title;
    std::string byline;  // "By <names>" line, first line of body
    std::string body;    // normalized UTF-8 text
    Category category = Category::Arbitrary;
    Date published_date;
    std::size_t char_length = 0;  // characters in body, not bytes
};

struct NormalizeOptions {
    // Line filters for captions/widgets, applied case-insensitively.
    // The defaults approximate hand-cleaning and can be overridden.
    std::vector<std::string> strip_patterns;
    std::size_t min_body_chars = 500;
    bool ascii_fold = false;
    bool apply_strip_patterns = true;

    static NormalizeOptions defaults();
};

// raw text -> normalized Article body. Removes the title line and matching
// caption lines, re-seats the byline as the first line, applies canonical
// Unicode composition and LF line endings. Throws EmptyBody when stripping
// leaves less than min_body_chars characters of article text.
std::string normalize_article(std::string_view raw_text, std::string_view title,
                              std::string_view byline,
                              const NormalizeOptions& opts = NormalizeOptions::defaults());

// Checks the category/date rule; throws CategoryDateViolation.
void check_category_date(Category category, const Date& date, std::string_view article_id);

class Corpus {
  public:
    // One file per article: "key: value" header block, blank line, raw body.
    static Corpus load_dir(const std::string& path, Category category,
                           const NormalizeOptions& opts = NormalizeOptions::defaults());

    // Canonical storage: one JSON object per line.
    static Corpus load_jsonl(const std::string& path);
    void save_jsonl(const std::string& path) const;

    // Enforces unique ids and category date bounds.
    void add(Article article);
    void merge(const Corpus& other);

    const std::vector<Article>& articles() const { return articles_; }
    const Article* find(std::string_view id) const;
    std::set<Category> categories_present() const;
    std::size_t size() const { return articles_.size(); }

  private:
    std::vector<Article> articles_;
};

// Parses a single ingestion-format file. Exposed for tests.
Article parse_ingestion_file(const std::string& path, std::string_view content,
                             std::optional<Category> expected_category,
                             const NormalizeOptions& opts);

}  // namespace verbatim

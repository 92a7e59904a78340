#pragma once

// Textual inputs: tokenization, parallel corpora, CoNLL-style annotations and
// QA records.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmforge/error.hpp"
#include "cmforge/unicode.hpp"

namespace cmforge {

class LanguageTag {
public:
    LanguageTag() : code_("other") {}

    explicit LanguageTag(std::string code) : code_(std::move(code))
    {
        if (code_.empty()) throw input_error("language tag must be non-empty");
        for (char c : code_) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
            if (!ok) throw input_error("language tag must be lowercase ASCII: '" + code_ + "'");
        }
    }

    static LanguageTag other() { return LanguageTag("other"); }

    const std::string& code() const noexcept { return code_; }
    bool is_other() const noexcept { return code_ == "other"; }

    friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
    friend auto operator<=>(const LanguageTag&, const LanguageTag&) = default;

private:
    std::string code_;
};

struct Token {
    std::string surface;
    LanguageTag lang;
    std::size_t index = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline bool devanagari_language(const std::string& code)
{
    return code == "hi" || code == "mr" || code == "ne" || code == "sa" || code == "mai";
}

inline bool non_latin_language(const std::string& code)
{
    static const std::array<std::string_view, 14> codes = {
        "hi", "mr", "ne", "sa", "mai", "bn", "ta", "te", "ml", "gu", "pa", "ur", "kn", "or"};
    return std::find(codes.begin(), codes.end(), code) != codes.end();
}

}  // namespace detail

/// Language of a single token from its script. Tokens without letters are
/// "other"; Devanagari is tagged with the declared language when that is a
/// Devanagari language, else "hi"; Latin letters inside a non-Latin-script
/// text are taken as English.
inline LanguageTag tag_language(std::string_view surface, const LanguageTag& declared)
{
    using unicode::Script;
    switch (unicode::letter_script(surface)) {
    case Script::none:
        return LanguageTag::other();
    case Script::devanagari:
        return detail::devanagari_language(declared.code()) ? declared : LanguageTag("hi");
    case Script::latin:
        if (declared.is_other()) return declared;
        return detail::non_latin_language(declared.code()) ? LanguageTag("en") : declared;
    case Script::other:
        return declared;
    }
    return declared;
}

/// Whitespace tokenizer that detaches leading and trailing punctuation
/// (general category P, which includes the danda) into one token per
/// character. Input is NFC-normalized first.
inline std::vector<Token> tokenize(std::string_view text, const LanguageTag& lang)
{
    std::vector<Token> out;
    const std::string norm = unicode::nfc(text);
    const auto cps = unicode::code_points(norm);

    auto emit = [&](std::size_t b, std::size_t e) {
        std::string s;
        for (std::size_t k = b; k < e; ++k) unicode::append_utf8(s, cps[k]);
        Token t;
        t.lang = tag_language(s, lang);
        t.surface = std::move(s);
        t.index = out.size();
        out.push_back(std::move(t));
    };

    std::size_t i = 0;
    while (i < cps.size()) {
        if (unicode::is_space(cps[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < cps.size() && !unicode::is_space(cps[end])) ++end;
        std::size_t b = i;
        std::size_t e = end;
        while (b < e && unicode::is_punct(cps[b])) {
            emit(b, b + 1);
            ++b;
        }
        std::size_t tail = e;
        while (tail > b && unicode::is_punct(cps[tail - 1])) --tail;
        if (b < tail) emit(b, tail);
        for (std::size_t k = tail; k < e; ++k) emit(k, k + 1);
        i = end;
    }
    return out;
}

inline std::vector<std::string> surfaces(const std::vector<Token>& tokens)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.surface);
    return out;
}

inline std::string join(const std::vector<std::string>& words, std::string_view sep = " ")
{
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.append(sep);
        out.append(words[i]);
    }
    return out;
}

/// Display form of a token sequence: single spaces, except that closing
/// punctuation (. , ; : ! ? ) ] } danda) attaches to the previous word.
inline std::string detokenize(const std::vector<std::string>& words)
{
    static const std::array<std::string_view, 11> closing = {
        ".", ",", ";", ":", "!", "?", ")", "]", "}", "।", "॥"};
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        bool attach = i > 0 && std::find(closing.begin(), closing.end(), words[i]) != closing.end();
        if (i && !attach) out.push_back(' ');
        out.append(words[i]);
    }
    return out;
}

struct ParallelPair {
    std::string id;
    std::vector<Token> source;
    std::vector<Token> target;
};

namespace detail {

inline std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    return in;
}

inline void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t b = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(b, i - b));
            b = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
    while (i < s.size()) {
        while (i < s.size() && space(s[i])) ++i;
        std::size_t b = i;
        while (i < s.size() && !space(s[i])) ++i;
        if (b < i) out.emplace_back(s.substr(b, i - b));
    }
    return out;
}

}  // namespace detail

inline std::vector<ParallelPair> parse_parallel(std::istream& in, const LanguageTag& src_lang,
                                                const LanguageTag& tgt_lang)
{
    std::vector<ParallelPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        if (!unicode::valid_utf8(line)) throw parse_error(lineno, "invalid UTF-8");
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2) throw parse_error(lineno, "expected 2 fields");
        ParallelPair p;
        p.id = std::to_string(lineno);
        p.source = tokenize(fields[0], src_lang);
        p.target = tokenize(fields[1], tgt_lang);
        if (p.source.empty() || p.target.empty()) throw parse_error(lineno, "empty side");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

/// Reads "source<TAB>target" lines; pair ids are 1-based line numbers.
inline std::vector<ParallelPair> load_parallel(const std::string& path, const LanguageTag& src_lang,
                                               const LanguageTag& tgt_lang)
{
    auto in = detail::open_input(path);
    return parse_parallel(in, src_lang, tgt_lang);
}

enum class NeType { PER, LOC, ORG, OTHER };

inline std::string to_string(NeType t)
{
    switch (t) {
    case NeType::PER: return "PER";
    case NeType::LOC: return "LOC";
    case NeType::ORG: return "ORG";
    case NeType::OTHER: return "OTHER";
    }
    return "OTHER";
}

inline NeType parse_ne_type(std::string_view s)
{
    if (s == "PER" || s == "PERSON") return NeType::PER;
    if (s == "LOC" || s == "LOCATION" || s == "GPE") return NeType::LOC;
    if (s == "ORG" || s == "ORGANIZATION") return NeType::ORG;
    return NeType::OTHER;
}

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive

    std::size_t size() const noexcept { return end - start; }
    bool contains(const Span& o) const noexcept { return start <= o.start && o.end <= end; }

    friend bool operator==(const Span&, const Span&) = default;
    friend auto operator<=>(const Span&, const Span&) = default;
};

struct NeSpan {
    Span span;
    NeType type = NeType::OTHER;

    friend bool operator==(const NeSpan&, const NeSpan&) = default;
};

struct AnnotatedSentence {
    std::vector<Token> tokens;
    std::vector<std::string> pos;
    std::vector<NeSpan> ne_spans;
    std::vector<Span> np_spans;
    /// "# key = value" lines preceding the sentence in CoNLL input.
    std::map<std::string, std::string> meta;

    std::size_t size() const noexcept { return tokens.size(); }

    /// NE type covering token `i`, if any.
    std::optional<NeType> ne_at(std::size_t i) const
    {
        for (const auto& ne : ne_spans)
            if (ne.span.start <= i && i < ne.span.end) return ne.type;
        return std::nullopt;
    }

    void validate() const
    {
        if (!pos.empty() && pos.size() != tokens.size())
            throw input_error("PoS count does not match token count");
        auto check = [&](const std::vector<Span>& spans, const char* what) {
            std::vector<Span> sorted = spans;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                if (sorted[k].start >= sorted[k].end || sorted[k].end > tokens.size())
                    throw input_error(std::string(what) + " span out of bounds");
                if (k && sorted[k].start < sorted[k - 1].end)
                    throw input_error(std::string(what) + " spans overlap");
            }
        };
        std::vector<Span> ne;
        for (const auto& s : ne_spans) ne.push_back(s.span);
        check(ne, "NE");
        check(np_spans, "NP");
    }
};

/// Wraps plain tokens as an unannotated sentence (no PoS, no spans).
inline AnnotatedSentence unannotated(std::vector<Token> tokens)
{
    AnnotatedSentence s;
    s.tokens = std::move(tokens);
    return s;
}

namespace bio {

struct Label {
    char tag = 'O';     // 'B', 'I' or 'O'
    std::string type;   // empty for untyped chunks
};

inline Label parse_label(std::string_view s)
{
    if (s == "O" || s == "_" || s == "-") return {};
    if (s.size() >= 1 && (s[0] == 'B' || s[0] == 'I')) {
        if (s.size() == 1) return {s[0], ""};
        if (s[1] == '-') return {s[0], std::string(s.substr(2))};
    }
    throw input_error("bad BIO label '" + std::string(s) + "'");
}

/// Decodes a BIO column into typed spans. `lines` gives the source line of
/// each label for error messages (may be empty).
inline std::vector<std::pair<Span, std::string>> decode(const std::vector<std::string>& labels,
                                                        const std::vector<std::size_t>& lines = {})
{
    std::vector<std::pair<Span, std::string>> spans;
    std::optional<std::size_t> open;
    std::string open_type;
    auto close = [&](std::size_t end) {
        if (open) spans.push_back({Span{*open, end}, open_type});
        open.reset();
    };
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Label l;
        try {
            l = parse_label(labels[i]);
        } catch (const input_error& e) {
            if (i < lines.size()) throw parse_error(lines[i], e.what());
            throw;
        }
        if (l.tag == 'O') {
            close(i);
        } else if (l.tag == 'B') {
            close(i);
            open = i;
            open_type = l.type;
        } else {
            if (!open || open_type != l.type) {
                std::string msg = "I-" + l.type + " without preceding B-" + l.type;
                if (i < lines.size()) throw parse_error(lines[i], msg);
                throw input_error(msg);
            }
        }
    }
    close(labels.size());
    return spans;
}

inline std::vector<std::string> encode(const std::vector<std::pair<Span, std::string>>& spans,
                                       std::size_t n)
{
    std::vector<std::string> labels(n, "O");
    for (const auto& [span, type] : spans) {
        for (std::size_t i = span.start; i < span.end && i < n; ++i) {
            std::string prefix = i == span.start ? "B" : "I";
            labels[i] = type.empty() ? prefix : prefix + "-" + type;
        }
    }
    return labels;
}

inline std::vector<std::string> encode_ne(const AnnotatedSentence& s)
{
    std::vector<std::pair<Span, std::string>> spans;
    for (const auto& ne : s.ne_spans) spans.push_back({ne.span, to_string(ne.type)});
    return encode(spans, s.size());
}

inline std::vector<std::string> encode_np(const AnnotatedSentence& s)
{
    std::vector<std::pair<Span, std::string>> spans;
    for (const auto& np : s.np_spans) spans.push_back({np, "NP"});
    return encode(spans, s.size());
}

}  // namespace bio

/// Parses CoNLL-style annotations: one token per line with columns
/// token, pos, ne-BIO, np-BIO and an optional fifth language column that
/// overrides script-based tagging. Blank lines end a sentence; "# key = value"
/// lines (no TAB) before a sentence are kept as metadata.
inline std::vector<AnnotatedSentence> parse_annotations(std::istream& in, const LanguageTag& lang)
{
    std::vector<AnnotatedSentence> out;
    AnnotatedSentence cur;
    std::vector<std::string> ne_labels, np_labels;
    std::vector<std::size_t> lines;

    auto flush = [&]() {
        if (cur.tokens.empty()) {
            cur = {};
            return;
        }
        for (auto& [span, type] : bio::decode(ne_labels, lines))
            cur.ne_spans.push_back({span, parse_ne_type(type)});
        for (auto& [span, type] : bio::decode(np_labels, lines)) cur.np_spans.push_back(span);
        cur.validate();
        out.push_back(std::move(cur));
        cur = {};
        ne_labels.clear();
        np_labels.clear();
        lines.clear();
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (!unicode::valid_utf8(line)) throw parse_error(lineno, "invalid UTF-8");
        if (detail::blank(line)) {
            flush();
            continue;
        }
        if (cur.tokens.empty() && line.rfind("# ", 0) == 0 && line.find('\t') == std::string::npos) {
            auto eq = line.find('=');
            if (eq != std::string::npos) {
                auto trim = [](std::string s) {
                    auto b = s.find_first_not_of(' ');
                    auto e = s.find_last_not_of(' ');
                    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
                };
                cur.meta[trim(line.substr(2, eq - 2))] = trim(line.substr(eq + 1));
            }
            continue;
        }
        auto cols = line.find('\t') != std::string::npos ? detail::split(line, '\t') : detail::split_ws(line);
        if (cols.size() != 4 && cols.size() != 5)
            throw parse_error(lineno, "expected 4 columns, got " + std::to_string(cols.size()));
        Token t;
        t.surface = unicode::nfc(cols[0]);
        if (t.surface.empty()) throw parse_error(lineno, "empty token");
        t.lang = cols.size() == 5 ? LanguageTag(cols[4]) : tag_language(t.surface, lang);
        t.index = cur.tokens.size();
        cur.tokens.push_back(std::move(t));
        cur.pos.push_back(cols[1]);
        ne_labels.push_back(cols[2]);
        np_labels.push_back(cols[3]);
        lines.push_back(lineno);
    }
    flush();
    return out;
}

inline std::vector<AnnotatedSentence> load_annotations(const std::string& path, const LanguageTag& lang)
{
    auto in = detail::open_input(path);
    return parse_annotations(in, lang);
}

inline void write_annotations(std::ostream& out, const std::vector<AnnotatedSentence>& sentences)
{
    for (const auto& s : sentences) {
        for (const auto& [k, v] : s.meta) out << "# " << k << " = " << v << '\n';
        auto ne = bio::encode_ne(s);
        auto np = bio::encode_np(s);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << s.tokens[i].surface << '\t' << (s.pos.empty() ? "_" : s.pos[i]) << '\t' << ne[i]
                << '\t' << np[i] << '\n';
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// QA records

enum class QType { factoid, descriptive };

inline std::string to_string(QType q) { return q == QType::factoid ? "factoid" : "descriptive"; }

inline QType parse_qtype(std::string_view s)
{
    if (s == "factoid") return QType::factoid;
    if (s == "descriptive") return QType::descriptive;
    throw input_error("unknown question type '" + std::string(s) + "' (factoid|descriptive)");
}

struct QARecord {
    std::string id;
    AnnotatedSentence question;
    LanguageTag language{"en"};
    QType qtype = QType::factoid;
    std::vector<std::string> answers;
    std::vector<std::string> passage_ids;
    std::optional<std::string> answer_type;
};

inline nlohmann::json to_json(const AnnotatedSentence& s)
{
    nlohmann::json j;
    j["tokens"] = surfaces(s.tokens);
    if (!s.pos.empty()) j["pos"] = s.pos;
    j["ne"] = bio::encode_ne(s);
    j["np"] = bio::encode_np(s);
    return j;
}

inline AnnotatedSentence annotated_from_json(const nlohmann::json& j, const LanguageTag& lang)
{
    if (j.is_string()) return unannotated(tokenize(j.get<std::string>(), lang));
    AnnotatedSentence s;
    for (const auto& w : j.at("tokens")) {
        Token t;
        t.surface = unicode::nfc(w.get<std::string>());
        t.lang = tag_language(t.surface, lang);
        t.index = s.tokens.size();
        s.tokens.push_back(std::move(t));
    }
    if (j.contains("pos")) s.pos = j["pos"].get<std::vector<std::string>>();
    if (j.contains("ne"))
        for (auto& [span, type] : bio::decode(j["ne"].get<std::vector<std::string>>()))
            s.ne_spans.push_back({span, parse_ne_type(type)});
    if (j.contains("np"))
        for (auto& [span, type] : bio::decode(j["np"].get<std::vector<std::string>>()))
            s.np_spans.push_back(span);
    s.validate();
    return s;
}

inline nlohmann::json to_json(const QARecord& r)
{
    nlohmann::json j;
    j["id"] = r.id;
    j["question"] = to_json(r.question);
    j["language"] = r.language.code();
    j["qtype"] = to_string(r.qtype);
    j["answers"] = r.answers;
    j["passage_ids"] = r.passage_ids;
    if (r.answer_type) j["answer_type"] = *r.answer_type;
    return j;
}

inline QARecord qa_record_from_json(const nlohmann::json& j)
{
    QARecord r;
    r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    r.language = LanguageTag(j.value("language", std::string("en")));
    r.question = annotated_from_json(j.at("question"), r.language);
    r.qtype = parse_qtype(j.value("qtype", std::string("factoid")));
    if (j.contains("answers")) r.answers = j["answers"].get<std::vector<std::string>>();
    if (j.contains("passage_ids")) r.passage_ids = j["passage_ids"].get<std::vector<std::string>>();
    if (j.contains("answer_type") && !j["answer_type"].is_null())
        r.answer_type = j["answer_type"].get<std::string>();
    return r;
}

/// Reads JSON-lines; every non-blank line is one JSON object.
inline std::vector<nlohmann::json> load_jsonl(const std::string& path)
{
    auto in = detail::open_input(path);
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        if (!unicode::valid_utf8(line)) throw parse_error(lineno, "invalid UTF-8");
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(lineno, e.what());
        }
    }
    return out;
}

inline std::vector<QARecord> load_qa_records(const std::string& path)
{
    std::vector<QARecord> out;
    std::size_t k = 0;
    for (const auto& j : load_jsonl(path)) {
        ++k;
        try {
            out.push_back(qa_record_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw input_error("record " + std::to_string(k) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset split

template <typename T>
struct DatasetSplit {
    std::vector<T> train, dev, test;
};

/// Seeded shuffle then cut by `ratios` (largest-remainder rounding, every
/// part gets at least one record).
template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> records, std::array<double, 3> ratios, std::uint64_t seed)
{
    if (records.size() < 3) throw input_error("split_dataset needs at least 3 records");
    double sum = 0;
    for (double r : ratios) {
        if (!(r > 0)) throw input_error("split ratios must be positive");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw input_error("split ratios must sum to 1");

    std::mt19937_64 rng(seed);
    for (std::size_t i = records.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(records[i - 1], records[j]);
    }

    const std::size_t n = records.size();
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
        double exact = ratios[k] * static_cast<double>(n);
        sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[k] = exact - static_cast<double>(sizes[k]);
        assigned += sizes[k];
    }
    while (assigned < n) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (rem[k] > rem[best] + 1e-12) best = k;
        ++sizes[best];
        rem[best] = -1;
        ++assigned;
    }
    for (int k = 0; k < 3; ++k) {
        while (sizes[k] == 0) {
            int donor = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            --sizes[donor];
            ++sizes[k];
        }
    }

    DatasetSplit<T> out;
    auto it = std::make_move_iterator(records.begin());
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
    it += static_cast<std::ptrdiff_t>(sizes[0]);
    out.dev.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
    it += static_cast<std::ptrdiff_t>(sizes[1]);
    out.test.assign(it, std::make_move_iterator(records.end()));
    return out;
}

}  // namespace cmforge

#include "scenegest/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scenegest/io.hpp"

namespace scenegest {

using nlohmann::json;

int TimedTranscript::sentence_of(int word) const {
    int s = 0;
    for (size_t i = 0; i < sentence_starts.size(); ++i)
        if (sentence_starts[i] <= word) s = static_cast<int>(i);
    return s;
}

std::pair<int, int> TimedTranscript::sentence_range(int sentence) const {
    int first = sentence_starts[sentence];
    int last = sentence + 1 < static_cast<int>(sentence_starts.size())
                   ? sentence_starts[sentence + 1] - 1
                   : static_cast<int>(words.size()) - 1;
    return {first, last};
}

TimedTranscript load_transcript(const std::string &path) {
    json j = json::parse(read_file(path));
    TimedTranscript t;
    for (const json &jw : j.at("words")) {
        TimedWord w;
        w.text = jw.at("text").get<std::string>();
        w.start = jw.at("start").get<double>();
        w.end = jw.at("end").get<double>();
        if (w.end < w.start)
            throw std::runtime_error(path + ": word '" + w.text + "' ends before it starts");
        if (!t.words.empty() && w.start < t.words.back().start)
            throw std::runtime_error(path + ": word starts go backwards at '" + w.text + "'");
        t.words.push_back(std::move(w));
    }
    t.sentence_starts = j.at("sentences").get<std::vector<int>>();
    if (t.words.empty()) {
        // A wordless transcript is legal (the pipeline then emits no gestures)
        // but must not smuggle in sentences or spans.
        if (!t.sentence_starts.empty() || j.contains("phrases") || j.contains("object_spans"))
            throw std::runtime_error(path + ": spans given for an empty word list");
        return t;
    }
    if (t.sentence_starts.empty() || t.sentence_starts[0] != 0)
        throw std::runtime_error(path + ": sentence list must start at word 0");
    for (size_t i = 0; i < t.sentence_starts.size(); ++i) {
        int s = t.sentence_starts[i];
        if (s < 0 || s >= static_cast<int>(t.words.size()) ||
            (i > 0 && s <= t.sentence_starts[i - 1]))
            throw std::runtime_error(path + ": sentence starts must be strictly increasing");
    }
    auto check_range = [&](int first, int last) {
        if (first < 0 || last < first || last >= static_cast<int>(t.words.size()))
            throw std::runtime_error(path + ": span out of range");
    };
    if (j.contains("phrases")) {
        for (const json &jp : j.at("phrases")) {
            PhraseSpan p;
            p.first = jp.at("first").get<int>();
            p.last = jp.at("last").get<int>();
            p.focus = jp.at("focus").get<int>();
            check_range(p.first, p.last);
            if (p.focus < p.first || p.focus > p.last)
                throw std::runtime_error(path + ": focus word outside its phrase");
            if (t.sentence_of(p.first) != t.sentence_of(p.last))
                throw std::runtime_error(path + ": phrase crosses a sentence boundary");
            if (jp.contains("focus_lemma")) p.focus_lemma = jp.at("focus_lemma").get<std::string>();
            if (jp.contains("alignment")) p.alignment = jp.at("alignment").get<bool>();
            t.phrases.push_back(std::move(p));
        }
    }
    if (j.contains("object_spans")) {
        for (const json &js : j.at("object_spans")) {
            int a = js.at(0).get<int>(), b = js.at(1).get<int>();
            check_range(a, b);
            t.object_spans.emplace_back(a, b);
        }
    }
    return t;
}

/*---- embeddings ----*/

static uint64_t fnv1a64(const std::string &s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

static std::vector<std::string> tokenize(const std::string &text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

static void add_hash_token(std::vector<double> &v, const std::string &tok, int dim) {
    uint64_t h = fnv1a64(tok);
    int idx = static_cast<int>(h % static_cast<uint64_t>(dim));
    double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    v[idx] += sign;
}

static void l2_normalize(std::vector<double> &v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 1e-12)
        for (double &x : v) x /= n;
}

std::vector<double> HashEmbedding::embed(const std::string &text) const {
    std::vector<double> v(dim_, 0.0);
    for (const std::string &tok : tokenize(text)) add_hash_token(v, tok, dim_);
    l2_normalize(v);
    return v;
}

TableEmbedding::TableEmbedding(const std::string &path) {
    std::istringstream in(read_file(path));
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "EMB" || version != 1) throw std::runtime_error(path + ": not an EMB 1 file");
    std::string key;
    in >> key >> dim_;
    if (key != "dim" || dim_ <= 0) throw std::runtime_error(path + ": missing dimension header");
    fallback_ = HashEmbedding(dim_);
    std::string token;
    while (in >> token) {
        std::vector<double> v(dim_);
        for (int i = 0; i < dim_; ++i) in >> v[i];
        if (!in) throw std::runtime_error(path + ": truncated vector for token " + token);
        table_[token] = std::move(v);
    }
}

std::vector<double> TableEmbedding::embed(const std::string &text) const {
    std::vector<double> v(dim_, 0.0);
    for (const std::string &tok : tokenize(text)) {
        auto it = table_.find(tok);
        if (it != table_.end()) {
            for (int i = 0; i < dim_; ++i) v[i] += it->second[i];
        } else {
            add_hash_token(v, tok, dim_);
        }
    }
    l2_normalize(v);
    return v;
}

double cosine(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double num = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na < 1e-24 || nb < 1e-24) return 0.0;
    return num / (std::sqrt(na) * std::sqrt(nb));
}

/*---- attribute dictionaries ----*/

AttributeDicts default_dictionaries() {
    AttributeDicts d;
    for (const char *s : {"tiny", "small", "medium", "large", "huge"}) d.size[s] = s;
    const std::pair<const char *, const char *> pos[] = {
        {"left", "left"},           {"right", "right"},
        {"top", "top"},             {"bottom", "bottom"},
        {"middle", "middle"},       {"center", "middle"},
        {"centre", "middle"},
        {"top left", "top_left"},   {"top-left", "top_left"},
        {"top right", "top_right"}, {"top-right", "top_right"},
        {"middle left", "middle_left"},   {"middle-left", "middle_left"},
        {"middle right", "middle_right"}, {"middle-right", "middle_right"},
        {"bottom left", "bottom_left"},   {"bottom-left", "bottom_left"},
        {"bottom right", "bottom_right"}, {"bottom-right", "bottom_right"},
    };
    for (auto [k, v] : pos) d.position[k] = v;
    return d;
}

static bool word_bounded(const std::string &text, size_t pos, size_t len) {
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    if (pos > 0 && is_word(text[pos - 1])) return false;
    if (pos + len < text.size() && is_word(text[pos + len])) return false;
    return true;
}

DictResult dictionary_annotate(const std::string &phrase_text, const AttributeDicts &dicts) {
    std::string text;
    for (char c : phrase_text) text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    struct Key {
        std::string match;
        std::string cls;
        bool is_size;
    };
    std::vector<Key> keys;
    for (const auto &[k, v] : dicts.size) keys.push_back({k, v, true});
    for (const auto &[k, v] : dicts.position) keys.push_back({k, v, false});
    std::sort(keys.begin(), keys.end(), [](const Key &a, const Key &b) {
        return a.match.size() != b.match.size() ? a.match.size() > b.match.size()
                                                : a.match < b.match;
    });

    std::vector<char> consumed(text.size(), 0);
    size_t size_at = std::string::npos, pos_at = std::string::npos;
    DictResult res;
    for (const Key &key : keys) {
        size_t from = 0;
        while (true) {
            size_t at = text.find(key.match, from);
            if (at == std::string::npos) break;
            bool free = word_bounded(text, at, key.match.size());
            for (size_t i = at; free && i < at + key.match.size(); ++i)
                free = !consumed[i];
            if (free) {
                for (size_t i = at; i < at + key.match.size(); ++i) consumed[i] = 1;
                if (key.is_size && at < size_at) {
                    size_at = at;
                    res.size_class = key.cls;
                } else if (!key.is_size && at < pos_at) {
                    pos_at = at;
                    res.position_class = key.cls;
                }
                break;  // one consumption per key; the earliest offset decides
            }
            from = at + 1;
        }
    }
    return res;
}

/*---- scoring ----*/

double relevance_score(const std::vector<double> &embedding,
                       const std::vector<std::vector<double>> &history) {
    double max_sim = 0.0;
    for (const std::vector<double> &h : history) {
        double c = cosine(embedding, h);
        if (c < 0.0) c = 0.0;  // opposite meanings are still novel
        max_sim = std::max(max_sim, c);
    }
    return 1.0 - max_sim;
}

double position_score(int phrase_last, int sentence_first, int sentence_last) {
    if (sentence_last <= sentence_first) return 1.0;
    return static_cast<double>(phrase_last - sentence_first) /
           static_cast<double>(sentence_last - sentence_first);
}

double importance_score(double relevance, double position, int bonus) {
    return 0.65 * relevance + 0.25 * position + 0.1 * bonus;
}

/*---- annotation ----*/

static std::string lower(const std::string &s) {
    std::string out;
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

static std::string join_words(const TimedTranscript &t, int first, int last) {
    std::string out;
    for (int i = first; i <= last; ++i) {
        if (i > first) out.push_back(' ');
        out += lower(t.words[i].text);
    }
    return out;
}

// Emits one span per object-label word (stretching back to the previous span
// or sentence start), or one sentence-wide span when only dictionary words
// hit. Used only when the transcript carries no pre-marked phrases.
static std::vector<PhraseSpan> fallback_chunker(const TimedTranscript &t,
                                                const AttributeDicts &dicts,
                                                const std::vector<std::string> &labels) {
    std::set<std::string> label_set, dict_set;
    for (const std::string &l : labels) label_set.insert(lower(l));
    for (const auto &[k, v] : dicts.size) if (k.find(' ') == std::string::npos) dict_set.insert(k);
    for (const auto &[k, v] : dicts.position) if (k.find(' ') == std::string::npos) dict_set.insert(k);

    std::vector<PhraseSpan> out;
    for (size_t s = 0; s < t.sentence_starts.size(); ++s) {
        auto [first, last] = t.sentence_range(static_cast<int>(s));
        int prev_end = first - 1;
        bool any_label = false;
        for (int i = first; i <= last; ++i) {
            if (!label_set.count(lower(t.words[i].text))) continue;
            any_label = true;
            PhraseSpan p;
            p.first = prev_end + 1;
            p.last = i;
            p.focus = i;
            out.push_back(p);
            prev_end = i;
        }
        if (!any_label) {
            bool any_dict = false;
            for (int i = first; i <= last; ++i)
                any_dict = any_dict || dict_set.count(lower(t.words[i].text)) > 0;
            if (any_dict) {
                PhraseSpan p;
                p.first = first;
                p.last = last;
                p.focus = last;
                out.push_back(p);
            }
        }
    }
    return out;
}

std::vector<PhraseAnnotation> annotate_transcript(const TimedTranscript &transcript,
                                                  const EmbeddingProvider &provider,
                                                  const AttributeDicts &dicts,
                                                  const std::vector<std::string> &labels) {
    std::vector<PhraseSpan> spans = transcript.phrases;
    if (spans.empty()) spans = fallback_chunker(transcript, dicts, labels);
    std::stable_sort(spans.begin(), spans.end(),
                     [](const PhraseSpan &a, const PhraseSpan &b) { return a.first < b.first; });

    std::vector<PhraseAnnotation> out;
    std::vector<std::vector<double>> history;
    for (const PhraseSpan &span : spans) {
        PhraseAnnotation a;
        a.span = span;
        if (a.span.focus_lemma.empty()) a.span.focus_lemma = lower(transcript.words[span.focus].text);
        a.text = join_words(transcript, span.first, span.last);
        std::vector<double> emb = provider.embed(a.text);
        a.relevance = relevance_score(emb, history);
        history.push_back(std::move(emb));
        DictResult dr = dictionary_annotate(a.text, dicts);
        a.size_class = dr.size_class;
        a.position_class = dr.position_class;
        for (auto [lo, hi] : transcript.object_spans)
            if (lo <= span.last && span.first <= hi) a.bonus = 1;
        int sent = transcript.sentence_of(span.first);
        auto [sf, sl] = transcript.sentence_range(sent);
        a.position = position_score(span.last, sf, sl);
        a.importance = importance_score(a.relevance, a.position, a.bonus);
        a.gated = a.importance >= 0.5;
        a.focus_time = transcript.words[span.focus].start;
        out.push_back(std::move(a));
    }
    return out;
}

void bind_annotations(std::vector<PhraseAnnotation> &annotations, const Scene &scene) {
    for (PhraseAnnotation &a : annotations) {
        const ObjectRecord *best = nullptr;
        for (const ObjectRecord &o : scene.objects) {
            if (lower(o.label) != a.span.focus_lemma) continue;
            if (!best || o.confidence > best->confidence ||
                (o.confidence == best->confidence && o.id < best->id))
                best = &o;
        }
        if (best) {
            a.object_id = best->id;
            if (a.span.alignment && best->group >= 0) a.group_id = best->group;
        }
    }
}

}  // namespace scenegest

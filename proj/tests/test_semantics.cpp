#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scenegest/io.hpp"
#include "scenegest/semantics.hpp"

using namespace scenegest;
namespace fs = std::filesystem;

namespace {

// Oracle: FNV-1a 64 reimplemented from the published constants.
uint64_t fnv_oracle(const std::string &s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

TimedTranscript make_transcript(const std::vector<std::string> &words,
                                std::vector<int> sentence_starts) {
    TimedTranscript t;
    for (size_t i = 0; i < words.size(); ++i)
        t.words.push_back({words[i], 0.5 * i, 0.5 * i + 0.4});
    t.sentence_starts = std::move(sentence_starts);
    return t;
}

PhraseSpan span(int first, int last, int focus) {
    PhraseSpan p;
    p.first = first;
    p.last = last;
    p.focus = focus;
    return p;
}

// Hands out fixed vectors per exact phrase text; unknown text gets a unit
// vector on the first axis.
struct ScriptedEmbedding : EmbeddingProvider {
    int dims = 2;
    std::map<std::string, std::vector<double>> vecs;
    int dim() const override { return dims; }
    std::vector<double> embed(const std::string &text) const override {
        auto it = vecs.find(text);
        if (it != vecs.end()) return it->second;
        std::vector<double> v(dims, 0.0);
        v[0] = 1.0;
        return v;
    }
};

struct TempFile {
    fs::path path;
    TempFile(const std::string &name, const std::string &content) {
        path = fs::temp_directory_path() / name;
        write_file_atomic(path.string(), content);
    }
    ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("long dictionary keys eat their span first") {
    AttributeDicts d = default_dictionaries();
    DictResult r = dictionary_annotate("a huge tree at the bottom left", d);
    CHECK(r.size_class == "huge");
    CHECK(r.position_class == "bottom_left");

    r = dictionary_annotate("a tree", d);
    CHECK(r.size_class.empty());
    CHECK(r.position_class.empty());

    r = dictionary_annotate("large box on the left, small box", d);
    CHECK(r.size_class == "large");
    CHECK(r.position_class == "left");

    r = dictionary_annotate("small box on the left, large box", d);
    CHECK(r.size_class == "small");
}

TEST_CASE("dictionary matching respects word boundaries, case and synonyms") {
    AttributeDicts d = default_dictionaries();
    CHECK(dictionary_annotate("the top-right corner", d).position_class == "top_right");
    CHECK(dictionary_annotate("the lefty loosey", d).position_class.empty());
    CHECK(dictionary_annotate("in the center", d).position_class == "middle");
    CHECK(dictionary_annotate("small centre piece", d).position_class == "middle");
    CHECK(dictionary_annotate("small centre piece", d).size_class == "small");
    CHECK(dictionary_annotate("HUGE Box Bottom LEFT", d).size_class == "huge");
    CHECK(dictionary_annotate("HUGE Box Bottom LEFT", d).position_class == "bottom_left");
    CHECK(dictionary_annotate("smallish things", d).size_class.empty());
}

TEST_CASE("novelty is one minus the best clamped match so far") {
    std::vector<double> e{1.0, 0.0};
    CHECK(relevance_score(e, {}) == 1.0);
    CHECK(relevance_score(e, {{0.0, 1.0}}) == 1.0);
    CHECK(relevance_score(e, {{-1.0, 0.0}}) == 1.0);  // opposite is still novel
    CHECK(relevance_score(e, {e}) == doctest::Approx(0.0).epsilon(1e-12));
    // the strongest of several matches decides
    CHECK(relevance_score(e, {{0.0, 1.0}, {1.0, 1.0}}) ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cosine guards dimensions and zero vectors") {
    CHECK_THROWS_AS(cosine({1.0, 0.0}, {1.0}), std::invalid_argument);
    CHECK(cosine({0.0, 0.0}, {1.0, 0.0}) == 0.0);
    CHECK(cosine({2.0, 0.0}, {5.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phrase lateness maps linearly across its sentence") {
    CHECK(position_score(0, 0, 10) == 0.0);
    CHECK(position_score(10, 0, 10) == 1.0);
    CHECK(position_score(5, 0, 10) == 0.5);
    CHECK(position_score(7, 5, 9) == 0.5);
    CHECK(position_score(3, 3, 3) == 1.0);  // single-word sentence
}

TEST_CASE("importance arithmetic is exact") {
    CHECK(importance_score(1.0, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(importance_score(1.0, 1.0, 1) >= 0.5);
    CHECK(importance_score(0.0, 1.0, 1) == doctest::Approx(0.35).epsilon(1e-13));
    CHECK(importance_score(0.0, 1.0, 1) < 0.5);
    CHECK(importance_score(0.6, 0.4, 0) == doctest::Approx(0.49).epsilon(1e-13));
    CHECK(importance_score(0.6, 0.4, 0) < 0.5);
    // monotone in every component
    CHECK(importance_score(0.7, 0.4, 0) > importance_score(0.6, 0.4, 0));
    CHECK(importance_score(0.6, 0.5, 0) > importance_score(0.6, 0.4, 0));
    CHECK(importance_score(0.6, 0.4, 1) > importance_score(0.6, 0.4, 0));
}

TEST_CASE("a phrase landing exactly on 0.5 passes the gate") {
    // relevance 0.625 (cosine 6/16), position 3/8, no bonus:
    // 0.65*0.625 + 0.25*0.375 is exactly 0.5 in doubles.
    TimedTranscript t = make_transcript(
        {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine"}, {0});
    t.phrases.push_back(span(0, 0, 0));
    t.phrases.push_back(span(1, 3, 3));

    ScriptedEmbedding prov;
    prov.dims = 16;
    std::vector<double> a(16, 1.0), b(16, 1.0);
    for (int i = 0; i < 5; ++i) b[i] = -1.0;  // dot(a, b) = 6, norms 4*4
    prov.vecs["one"] = a;
    prov.vecs["two three four"] = b;

    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {});
    REQUIRE(ann.size() == 2);
    CHECK(ann[0].relevance == 1.0);
    CHECK(ann[0].position == 0.0);
    CHECK(ann[0].importance == doctest::Approx(0.65).epsilon(1e-13));
    CHECK(ann[0].gated);
    CHECK(ann[1].relevance == 0.625);
    CHECK(ann[1].position == 0.375);
    CHECK(ann[1].importance == 0.5);
    CHECK(ann[1].gated);
}

TEST_CASE("a phrase at 0.49 stays below the gate") {
    // relevance 0.6 (cosine 2/5), position 2/5, no bonus -> 0.49.
    TimedTranscript t =
        make_transcript({"one", "two", "three", "four", "five", "six"}, {0});
    t.phrases.push_back(span(0, 0, 0));
    t.phrases.push_back(span(1, 2, 2));

    ScriptedEmbedding prov;
    prov.dims = 4;
    prov.vecs["one"] = {1.0, 0.0, 0.0, 0.0};
    prov.vecs["two three"] = {2.0, 4.0, 2.0, 1.0};  // norm 5, dot 2

    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {});
    REQUIRE(ann.size() == 2);
    CHECK(ann[1].relevance == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(ann[1].position == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(ann[1].importance == doctest::Approx(0.49).epsilon(1e-13));
    CHECK(!ann[1].gated);
}

TEST_CASE("annotation fills text, lemma, bonus and focus time") {
    TimedTranscript t = make_transcript({"The", "BIG", "Tree", "falls", "now"}, {0});
    t.phrases.push_back(span(0, 2, 2));
    PhraseSpan p2 = span(3, 4, 4);
    p2.focus_lemma = "fall";
    t.phrases.push_back(p2);
    t.object_spans.emplace_back(2, 2);

    HashEmbedding prov(64);
    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {});
    REQUIRE(ann.size() == 2);
    CHECK(ann[0].text == "the big tree");
    CHECK(ann[0].span.focus_lemma == "tree");  // defaulted from the focus word
    CHECK(ann[0].bonus == 1);                  // object span overlaps [0,2]
    CHECK(ann[0].focus_time == 1.0);           // word 2 starts at 1.0 s
    CHECK(ann[1].span.focus_lemma == "fall");  // preset lemma kept
    CHECK(ann[1].bonus == 0);
    // a repeated identical phrase scores no novelty
    t.phrases.push_back(span(0, 2, 2));
    ann = annotate_transcript(t, prov, default_dictionaries(), {});
    REQUIRE(ann.size() == 3);
    CHECK(ann[1].relevance == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("without pre-marked phrases labels carve the sentence") {
    TimedTranscript t = make_transcript({"a", "tree", "and", "a", "tree"}, {0});
    HashEmbedding prov(64);
    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {"tree"});
    REQUIRE(ann.size() == 2);
    CHECK(ann[0].span.first == 0);
    CHECK(ann[0].span.last == 1);
    CHECK(ann[0].span.focus == 1);
    CHECK(ann[1].span.first == 2);
    CHECK(ann[1].span.last == 4);
    CHECK(ann[1].span.focus == 4);
    CHECK(ann[0].span.focus_lemma == "tree");
}

TEST_CASE("a dictionary word alone claims the whole sentence") {
    TimedTranscript t = make_transcript({"it", "sits", "on", "the", "left", "side"}, {0});
    HashEmbedding prov(64);
    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {"rock"});
    REQUIRE(ann.size() == 1);
    CHECK(ann[0].span.first == 0);
    CHECK(ann[0].span.last == 5);
    CHECK(ann[0].span.focus == 5);
    CHECK(ann[0].position == 1.0);
    CHECK(ann[0].position_class == "left");

    TimedTranscript quiet = make_transcript({"hello", "there"}, {0});
    CHECK(annotate_transcript(quiet, prov, default_dictionaries(), {"rock"}).empty());
}

TEST_CASE("the fallback chunker works one sentence at a time") {
    TimedTranscript t =
        make_transcript({"the", "tree", "stands", "it", "is", "tall"}, {0, 3});
    HashEmbedding prov(64);
    std::vector<PhraseAnnotation> ann =
        annotate_transcript(t, prov, default_dictionaries(), {"tree"});
    REQUIRE(ann.size() == 1);
    CHECK(ann[0].span.first == 0);
    CHECK(ann[0].span.last == 1);
}

TEST_CASE("sentence lookups bracket their words") {
    TimedTranscript t = make_transcript(
        {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}, {0, 3, 7});
    CHECK(t.sentence_of(0) == 0);
    CHECK(t.sentence_of(2) == 0);
    CHECK(t.sentence_of(3) == 1);
    CHECK(t.sentence_of(6) == 1);
    CHECK(t.sentence_of(7) == 2);
    CHECK(t.sentence_of(9) == 2);
    CHECK(t.sentence_range(0) == std::pair<int, int>(0, 2));
    CHECK(t.sentence_range(1) == std::pair<int, int>(3, 6));
    CHECK(t.sentence_range(2) == std::pair<int, int>(7, 9));
}

TEST_CASE("hash embedding puts one signed unit in the token's bucket") {
    HashEmbedding prov;
    CHECK(prov.dim() == 128);
    std::vector<double> v = prov.embed("tree");
    uint64_t h = fnv_oracle("tree");
    int bucket = static_cast<int>(h % 128);
    double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    REQUIRE(static_cast<int>(v.size()) == 128);
    CHECK(v[bucket] == sign);
    int nonzero = 0;
    for (double x : v) nonzero += x != 0.0;
    CHECK(nonzero == 1);

    CHECK(prov.embed("Tree,") == v);   // case and punctuation fold away
    CHECK(prov.embed("tree tree") == v);  // direction, not count
    CHECK(prov.embed("tree") == v);    // deterministic
    std::vector<double> empty = prov.embed("");
    for (double x : empty) CHECK(x == 0.0);
}

TEST_CASE("embeddings come back unit length") {
    HashEmbedding prov;
    std::vector<double> v = prov.embed("the quick brown fox jumps");
    double n = 0.0;
    for (double x : v) n += x * x;
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("disjoint-bucket phrases are fully novel") {
    // distinct FNV buckets checked through the oracle, not assumed
    REQUIRE(fnv_oracle("alpha") % 128 != fnv_oracle("beta") % 128);
    HashEmbedding prov;
    CHECK(relevance_score(prov.embed("alpha"), {prov.embed("beta")}) == 1.0);
}

TEST_CASE("token tables load, mix and fall back to hashing") {
    TempFile f("scenegest_emb.txt",
               "EMB 1\ndim 4\napple 1 0 0 0\nbanana 0 1 0 0\n");
    TableEmbedding table(f.path.string());
    CHECK(table.dim() == 4);
    CHECK(table.embed("apple") == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    std::vector<double> mix = table.embed("apple banana");
    CHECK(mix[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mix[1] == doctest::Approx(mix[0]).epsilon(1e-12));
    CHECK(mix[2] == 0.0);
    // unknown tokens hash at the table's dimension
    HashEmbedding hash4(4);
    CHECK(table.embed("cherry") == hash4.embed("cherry"));
}

TEST_CASE("broken embedding files are rejected") {
    TempFile bad_tag("scenegest_emb_tag.txt", "EMBX 1\ndim 4\n");
    CHECK_THROWS_AS(TableEmbedding(bad_tag.path.string()), std::runtime_error);
    TempFile bad_dim("scenegest_emb_dim.txt", "EMB 1\nsize 4\n");
    CHECK_THROWS_AS(TableEmbedding(bad_dim.path.string()), std::runtime_error);
    TempFile trunc("scenegest_emb_trunc.txt", "EMB 1\ndim 4\napple 1 0\n");
    CHECK_THROWS_AS(TableEmbedding(trunc.path.string()), std::runtime_error);
}

TEST_CASE("transcript files validate times, sentences and spans") {
    std::string good = R"({
      "words": [
        {"text": "The", "start": 0.0, "end": 0.2},
        {"text": "tree", "start": 0.3, "end": 0.5}
      ],
      "sentences": [0],
      "phrases": [{"first": 0, "last": 1, "focus": 1, "alignment": true}],
      "object_spans": [[1, 1]]
    })";
    TempFile f("scenegest_tr.json", good);
    TimedTranscript t = load_transcript(f.path.string());
    REQUIRE(t.words.size() == 2);
    CHECK(t.words[1].text == "tree");
    REQUIRE(t.phrases.size() == 1);
    CHECK(t.phrases[0].alignment);
    CHECK(t.object_spans == std::vector<std::pair<int, int>>{{1, 1}});

    auto throws = [](const std::string &body) {
        TempFile tf("scenegest_tr_bad.json", body);
        CHECK_THROWS_AS(load_transcript(tf.path.string()), std::runtime_error);
    };
    throws(R"({"words": [{"text": "a", "start": 1.0, "end": 0.5}], "sentences": [0]})");
    throws(R"({"words": [{"text": "a", "start": 1.0, "end": 1.2},
                          {"text": "b", "start": 0.5, "end": 0.9}], "sentences": [0]})");
    throws(R"({"words": [{"text": "a", "start": 0.0, "end": 0.2}], "sentences": [1]})");
    throws(R"({"words": [{"text": "a", "start": 0.0, "end": 0.2},
                          {"text": "b", "start": 0.3, "end": 0.4}], "sentences": [0, 0]})");
    throws(R"({"words": [{"text": "a", "start": 0.0, "end": 0.2}], "sentences": [0],
               "phrases": [{"first": 0, "last": 0, "focus": 3}]})");
    throws(R"({"words": [{"text": "a", "start": 0.0, "end": 0.2},
                          {"text": "b", "start": 0.3, "end": 0.4}], "sentences": [0, 1],
               "phrases": [{"first": 0, "last": 1, "focus": 0}]})");
    throws(R"({"words": [{"text": "a", "start": 0.0, "end": 0.2}], "sentences": [0],
               "object_spans": [[0, 4]]})");
    throws(R"({"words": [], "sentences": [0]})");

    TempFile empty("scenegest_tr_empty.json", R"({"words": [], "sentences": []})");
    CHECK(load_transcript(empty.path.string()).words.empty());
}

TEST_CASE("focus lemmas bind to scene objects by confidence then id") {
    Scene s;
    ObjectRecord apple1;
    apple1.id = 4;
    apple1.label = "apple";
    apple1.confidence = 0.7;
    apple1.group = 2;
    ObjectRecord apple2 = apple1;
    apple2.id = 9;
    apple2.confidence = 0.9;
    ObjectRecord tree;
    tree.id = 1;
    tree.label = "tree";
    tree.confidence = 1.0;
    s.objects = {apple1, apple2, tree};

    std::vector<PhraseAnnotation> ann(4);
    ann[0].span.focus_lemma = "apple";
    ann[1].span.focus_lemma = "car";
    ann[2].span.focus_lemma = "apple";
    ann[2].span.alignment = true;
    ann[3].span.focus_lemma = "tree";
    ann[3].span.alignment = true;

    bind_annotations(ann, s);
    CHECK(ann[0].object_id == 9);  // higher confidence wins
    CHECK(ann[0].group_id == -1);  // no alignment flag, no group
    CHECK(ann[1].object_id == -1);
    CHECK(ann[2].object_id == 9);
    CHECK(ann[2].group_id == 2);
    CHECK(ann[3].object_id == 1);
    CHECK(ann[3].group_id == -1);  // bound object has no group

    // equal confidence falls back to the smaller id
    s.objects[1].confidence = 0.7;
    std::vector<PhraseAnnotation> tie(1);
    tie[0].span.focus_lemma = "apple";
    bind_annotations(tie, s);
    CHECK(tie[0].object_id == 4);
}

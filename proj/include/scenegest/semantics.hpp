#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "scenegest/scene.hpp"

namespace scenegest {

struct TimedWord {
    std::string text;
    double start = 0.0;
    double end = 0.0;
};

struct PhraseSpan {
    int first = 0;  // inclusive word indices
    int last = 0;
    int focus = 0;             // word the stroke synchronizes to
    std::string focus_lemma;   // defaults to the lowercased focus word
    bool alignment = false;    // phrase talks about an arrangement
};

struct TimedTranscript {
    std::vector<TimedWord> words;
    std::vector<int> sentence_starts;                 // first entry is 0
    std::vector<PhraseSpan> phrases;                  // may be empty
    std::vector<std::pair<int, int>> object_spans;    // grammatical objects, inclusive

    int sentence_of(int word) const;
    std::pair<int, int> sentence_range(int sentence) const;  // inclusive word indices
};

/// Transcript files are JSON: words with start/end seconds, sentence start
/// indices, optional pre-marked phrase spans and grammatical-object spans.
TimedTranscript load_transcript(const std::string &path);

/// Maps a phrase text to vectors for novelty comparison. Implementations must
/// be deterministic.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dim() const = 0;
    virtual std::vector<double> embed(const std::string &text) const = 0;
};

/// Hash-bucketed bag of words: each token lands in a bucket with a sign, both
/// taken from a 64-bit FNV-1a hash, and the sum is L2-normalized. Fully
/// deterministic and needs no data files.
class HashEmbedding : public EmbeddingProvider {
public:
    explicit HashEmbedding(int dim = 128) : dim_(dim) {}
    int dim() const override { return dim_; }
    std::vector<double> embed(const std::string &text) const override;

private:
    int dim_;
};

/// Token table loaded from a file ("EMB 1" header with a fixed dimension);
/// tokens missing from the table fall back to the hash embedding at the same
/// dimension so novel words still separate.
class TableEmbedding : public EmbeddingProvider {
public:
    explicit TableEmbedding(const std::string &path);
    int dim() const override { return dim_; }
    std::vector<double> embed(const std::string &text) const override;

private:
    int dim_ = 0;
    std::map<std::string, std::vector<double>> table_;
    HashEmbedding fallback_{0};
};

double cosine(const std::vector<double> &a, const std::vector<double> &b);

/// Match-string to class-name tables for sizes and positions.
struct AttributeDicts {
    std::map<std::string, std::string> size;
    std::map<std::string, std::string> position;
};
AttributeDicts default_dictionaries();

struct DictResult {
    std::string size_class;      // empty when nothing matched
    std::string position_class;
};

/// Longest-match-first dictionary scan over the phrase text. Matched spans
/// are consumed so "bottom left" blocks the shorter "bottom" and "left";
/// with several hits of one kind the earliest in the text wins.
DictResult dictionary_annotate(const std::string &phrase_text, const AttributeDicts &dicts);

/// 1 minus the highest clamped cosine against the embeddings seen so far;
/// 1.0 with an empty history.
double relevance_score(const std::vector<double> &embedding,
                       const std::vector<std::vector<double>> &history);

/// How late the phrase ends inside its sentence, 0 at the first word, 1 at
/// the last; single-word sentences score 1.
double position_score(int phrase_last, int sentence_first, int sentence_last);

/// importance = 0.65*relevance + 0.25*position + 0.1*bonus.
double importance_score(double relevance, double position, int bonus);

struct PhraseAnnotation {
    PhraseSpan span;
    std::string text;  // lowercased words joined by single spaces
    std::string size_class;
    std::string position_class;
    int bonus = 0;
    double relevance = 0.0;
    double position = 0.0;
    double importance = 0.0;
    bool gated = false;  // importance >= 0.5 passes the gate
    double focus_time = 0.0;
    int object_id = -1;  // bound scene object
    int group_id = -1;   // alignment group, when flagged and the object has one
};

/// Scores every phrase in time order: embeds the text, compares against all
/// earlier phrases of this run, reads size/position attributes, checks
/// grammatical-object overlap and applies the importance gate. When the
/// transcript carries no pre-marked phrases a simple fallback chunker builds
/// spans around object labels and dictionary hits.
std::vector<PhraseAnnotation> annotate_transcript(const TimedTranscript &transcript,
                                                  const EmbeddingProvider &provider,
                                                  const AttributeDicts &dicts,
                                                  const std::vector<std::string> &labels);

/// Attaches scene objects by exact focus-lemma match; among several objects
/// with the label the highest confidence wins, then the lowest id. Phrases
/// flagged for alignment inherit the bound object's group.
void bind_annotations(std::vector<PhraseAnnotation> &annotations, const Scene &scene);

}  // namespace scenegest

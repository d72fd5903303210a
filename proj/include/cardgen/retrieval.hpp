#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cardgen/corpus.hpp"
#include "cardgen/prompts.hpp"
#include "cardgen/providers.hpp"
#include "cardgen/templates.hpp"

namespace cardgen::retrieval {

struct IndexedChunk {
    corpus::Chunk chunk;
    corpus::DocKind doc_kind = corpus::DocKind::paper;
    std::string section_heading;
};

struct SectionEntry {
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string heading;

    friend bool operator==(const SectionEntry&, const SectionEntry&) = default;
};

// Exact-search substrate: chunks, their vectors, and the section catalog.
// Immutable after build and safe to share across threads.
class EmbeddedIndex {
public:
    EmbeddedIndex() = default;

    std::size_t size() const { return chunks_.size(); }
    const IndexedChunk& chunk_at(std::size_t i) const { return chunks_[i]; }
    const providers::EmbeddingVector& vector_at(std::size_t i) const { return vectors_[i]; }
    const std::vector<SectionEntry>& catalog() const { return catalog_; }
    std::size_t dimension() const { return vectors_.empty() ? 0 : vectors_[0].dimension(); }

    friend EmbeddedIndex build_index(const std::vector<corpus::SourceDocument>& docs,
                                     const std::vector<corpus::Chunk>& chunks,
                                     providers::EmbeddingProvider& embedder);

private:
    std::vector<IndexedChunk> chunks_;
    std::vector<providers::EmbeddingVector> vectors_;
    std::vector<SectionEntry> catalog_;
};

// Embeds every chunk (batched) and populates the section catalog. Throws
// ConfigError on an empty chunk list; provider failures propagate and no
// partial index is ever returned.
EmbeddedIndex build_index(const std::vector<corpus::SourceDocument>& docs,
                          const std::vector<corpus::Chunk>& chunks,
                          providers::EmbeddingProvider& embedder);

struct RetrievalConfig {
    std::size_t k_sections = 3;
    std::size_t in_section_chunks = 8;
    std::size_t out_section_chunks = 4;
    std::size_t one_step_chunks = 12;
    std::size_t max_subquestions = 5;
    // The "w/o pseudo" ablation embeds the raw question prompt instead of
    // decomposing and hallucinating pseudo answers.
    bool use_pseudo_answers = true;
};

struct ScoredChunk {
    std::size_t index = 0;  // position in the EmbeddedIndex
    double score = 0.0;
};

struct RetrievalResult {
    std::string question_id;
    std::vector<std::string> sub_questions;
    std::vector<std::string> pseudo_answers;  // parallel to sub_questions
    std::vector<SectionEntry> inferred_sections;
    // Two-step: in-section block first, then out-of-section block, each
    // score-descending. One-step: single score-descending block.
    std::vector<ScoredChunk> ranked_chunks;
};

using ChunkFilter = std::function<bool(std::size_t chunk_index)>;

// Exact top-k by inner product over chunks passing the filter. Ties break
// by (doc_id, section_ordinal, chunk_ordinal) ascending. Returns fewer
// than k when the filtered set is smaller.
std::vector<ScoredChunk> similarity_search(const EmbeddedIndex& index,
                                           const providers::EmbeddingVector& query,
                                           const ChunkFilter& filter, std::size_t k);

// 1..max sub-questions parsed from a numbered-list response; unparseable
// or empty output falls back to the original prompt.
std::vector<std::string> decompose_question(const templates::QuestionTemplate& question,
                                            providers::ChatProvider& chat,
                                            const prompts::PromptLibrary& prompts,
                                            std::size_t max_subquestions);

// Matches LLM output against catalog headings case-insensitively,
// exact-then-substring; unmatched names are dropped and an empty result
// falls back to the entire catalog.
std::vector<SectionEntry> infer_sections(const templates::QuestionTemplate& question,
                                         const std::vector<SectionEntry>& catalog,
                                         providers::ChatProvider& chat,
                                         const prompts::PromptLibrary& prompts,
                                         std::size_t k_sections);

// Hypothetical answer used solely as a retrieval query; an empty response
// falls back to the sub-question text.
std::string pseudo_answer(const std::string& sub_question, providers::ChatProvider& chat,
                          const prompts::PromptLibrary& prompts);

// Two-step retrieval: infer sections, embed one query per sub-question,
// score the in-section pool and its complement separately (max-merge
// across sub-questions), then keep the top in_section_chunks +
// out_section_chunks.
RetrievalResult two_step_retrieve(const templates::QuestionTemplate& question,
                                  const EmbeddedIndex& index, providers::ChatProvider& chat,
                                  providers::EmbeddingProvider& embedder,
                                  const RetrievalConfig& cfg,
                                  const prompts::PromptLibrary& prompts);

// One-step baseline: same query stages, no section inference, top
// one_step_chunks over the whole corpus.
RetrievalResult one_step_retrieve(const templates::QuestionTemplate& question,
                                  const EmbeddedIndex& index, providers::ChatProvider& chat,
                                  providers::EmbeddingProvider& embedder,
                                  const RetrievalConfig& cfg,
                                  const prompts::PromptLibrary& prompts);

}  // namespace cardgen::retrieval

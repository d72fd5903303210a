#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cardgen::corpus {

enum class DocKind { paper, readme };

std::string_view to_string(DocKind kind);

struct Section {
    std::size_t ordinal = 0;
    std::string heading;  // trimmed, leading '#' markers stripped
    std::string body;
    int level = 0;  // markdown heading level; 0 for synthetic or paper sections
};

// Synthetic heading for README text before the first heading.
inline constexpr std::string_view kPreambleHeading = "_preamble";

struct SourceDocument {
    std::string doc_id;
    DocKind kind = DocKind::paper;
    std::string title;
    std::vector<Section> sections;  // ordinals 0..n-1, source order
};

struct Chunk {
    std::string doc_id;
    std::size_t section_ordinal = 0;
    std::size_t chunk_ordinal = 0;
    // Half-open byte span into the section body, aligned to UTF-8 code
    // point boundaries. `text` is the exact substring.
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string text;
};

// One evaluation instance: a human-written card plus its direct sources.
struct EvalTriple {
    std::string card_text;
    std::optional<SourceDocument> paper;
    std::optional<SourceDocument> readme;
};

// Parses the structured paper export {title, abstract, sections:[{heading,
// text}]}. The abstract becomes section 0 with heading "Abstract".
// Throws ParseError naming the missing field on malformed input.
SourceDocument parse_paper_document(std::string_view json_text, std::string doc_id);

SourceDocument parse_paper_file(const std::filesystem::path& path, std::string doc_id);

// Splits markdown on heading lines (1-6 '#' followed by a space). Text
// before the first heading becomes the "_preamble" section. Lines inside
// fenced code blocks are never headings. Section bodies are verbatim with
// trailing newlines trimmed.
SourceDocument parse_readme(std::string_view markdown, std::string doc_id);

// Inverse of parse_readme up to heading-line normalization: emits
// "#"*level + " " + heading + "\n" + body + "\n" per section.
std::string render_readme(const SourceDocument& doc);

struct ChunkingConfig {
    std::size_t chunk_size = 512;  // in code points
    std::size_t overlap = 64;
};

// Fixed-stride windows per section: starts at 0, chunk_size - overlap,
// ...; the final window is cut at the section end and iteration stops once
// a window reaches it. Empty sections yield no chunks; chunks never cross
// section boundaries. Throws ConfigError when overlap >= chunk_size.
std::vector<Chunk> chunk_document(const SourceDocument& doc, const ChunkingConfig& cfg = {});

}  // namespace cardgen::corpus

#include "cardgen/corpus.hpp"

#include <algorithm>

#include "json.hpp"

#include "cardgen/errors.hpp"
#include "cardgen/io.hpp"
#include "cardgen/text.hpp"

namespace cardgen::corpus {

using nlohmann::json;

std::string_view to_string(DocKind kind) {
    return kind == DocKind::paper ? "paper" : "readme";
}

namespace {

std::string clean_heading(std::string_view raw) {
    std::string_view t = text::trim(raw);
    std::size_t i = 0;
    while (i < t.size() && t[i] == '#') ++i;
    return std::string(text::trim(t.substr(i)));
}

const json& require_field(const json& obj, const char* field, const std::string& where) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        throw ParseError("paper export: missing field \"" + std::string(field) + "\" in " + where);
    }
    return *it;
}

std::string require_string(const json& obj, const char* field, const std::string& where) {
    const json& v = require_field(obj, field, where);
    if (!v.is_string()) {
        throw ParseError("paper export: field \"" + std::string(field) + "\" in " + where +
                         " is not a string");
    }
    return v.get<std::string>();
}

}  // namespace

SourceDocument parse_paper_document(std::string_view json_text, std::string doc_id) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError("paper export: invalid JSON: " + std::string(e.what()));
    }
    if (!root.is_object()) throw ParseError("paper export: top-level value is not an object");

    SourceDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.kind = DocKind::paper;
    doc.title = require_string(root, "title", "document");

    std::string abstract = require_string(root, "abstract", "document");
    const json& sections = require_field(root, "sections", "document");
    if (!sections.is_array()) throw ParseError("paper export: field \"sections\" is not an array");

    doc.sections.push_back(Section{0, "Abstract", std::move(abstract), 0});
    std::size_t ordinal = 1;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const json& entry = sections[i];
        std::string where = "sections[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ParseError("paper export: " + where + " is not an object");
        Section sec;
        sec.ordinal = ordinal++;
        sec.heading = clean_heading(require_string(entry, "heading", where));
        sec.body = require_string(entry, "text", where);
        doc.sections.push_back(std::move(sec));
    }
    return doc;
}

SourceDocument parse_paper_file(const std::filesystem::path& path, std::string doc_id) {
    return parse_paper_document(io::read_text_file(path), std::move(doc_id));
}

namespace {

// A heading line is 1-6 '#' characters followed by a space, at line start.
int heading_level(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && line[i] == '#') ++i;
    if (i == 0 || i > 6) return 0;
    if (i >= line.size() || line[i] != ' ') return 0;
    return static_cast<int>(i);
}

bool is_fence_line(std::string_view line) {
    std::string_view t = text::trim(line);
    return t.substr(0, 3) == "```";
}

std::string trim_trailing_newlines(std::string_view body) {
    std::size_t e = body.size();
    while (e > 0 && (body[e - 1] == '\n' || body[e - 1] == '\r')) --e;
    return std::string(body.substr(0, e));
}

}  // namespace

SourceDocument parse_readme(std::string_view markdown, std::string doc_id) {
    SourceDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.kind = DocKind::readme;

    struct Block {
        std::string heading;
        int level;
        std::string body;
    };
    std::vector<Block> blocks;
    blocks.push_back(Block{std::string(kPreambleHeading), 0, {}});

    bool in_fence = false;
    std::size_t pos = 0;
    while (pos <= markdown.size()) {
        if (pos == markdown.size()) break;
        std::size_t nl = markdown.find('\n', pos);
        std::size_t line_end = (nl == std::string_view::npos) ? markdown.size() : nl;
        std::string_view line = markdown.substr(pos, line_end - pos);
        std::size_t next = (nl == std::string_view::npos) ? markdown.size() : nl + 1;

        if (is_fence_line(line)) in_fence = !in_fence;

        int level = in_fence || is_fence_line(line) ? 0 : heading_level(line);
        if (level > 0) {
            blocks.push_back(Block{clean_heading(line), level, {}});
        } else {
            blocks.back().body.append(markdown.substr(pos, next - pos));
        }
        pos = next;
    }

    // Title: first heading if any.
    for (const Block& b : blocks) {
        if (b.heading != kPreambleHeading) {
            doc.title = b.heading;
            break;
        }
    }

    std::size_t ordinal = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        // Keep the preamble only when there is text before the first
        // heading or no heading at all.
        if (i == 0 && blocks.size() > 1 && text::trim(blocks[0].body).empty()) continue;
        Section sec;
        sec.ordinal = ordinal++;
        sec.heading = blocks[i].heading;
        sec.level = blocks[i].level;
        sec.body = trim_trailing_newlines(blocks[i].body);
        doc.sections.push_back(std::move(sec));
    }
    return doc;
}

std::string render_readme(const SourceDocument& doc) {
    std::string out;
    for (const Section& sec : doc.sections) {
        if (sec.heading != kPreambleHeading) {
            out.append(static_cast<std::size_t>(std::max(sec.level, 1)), '#');
            out.push_back(' ');
            out.append(sec.heading);
            out.push_back('\n');
        }
        if (!sec.body.empty()) {
            out.append(sec.body);
            out.push_back('\n');
        }
    }
    return out;
}

std::vector<Chunk> chunk_document(const SourceDocument& doc, const ChunkingConfig& cfg) {
    if (cfg.chunk_size == 0) throw ConfigError("chunk_size must be positive");
    if (cfg.overlap >= cfg.chunk_size) {
        throw ConfigError("chunk overlap (" + std::to_string(cfg.overlap) +
                          ") must be smaller than chunk size (" + std::to_string(cfg.chunk_size) +
                          ")");
    }
    const std::size_t stride = cfg.chunk_size - cfg.overlap;

    std::vector<Chunk> chunks;
    for (const Section& sec : doc.sections) {
        std::vector<std::size_t> offsets = text::utf8_offsets(sec.body);
        const std::size_t n_cp = offsets.size() - 1;
        if (n_cp == 0) continue;

        std::size_t chunk_ordinal = 0;
        for (std::size_t start = 0; start < n_cp; start += stride) {
            std::size_t end = std::min(start + cfg.chunk_size, n_cp);
            Chunk c;
            c.doc_id = doc.doc_id;
            c.section_ordinal = sec.ordinal;
            c.chunk_ordinal = chunk_ordinal++;
            c.begin = offsets[start];
            c.end = offsets[end];
            c.text = sec.body.substr(c.begin, c.end - c.begin);
            chunks.push_back(std::move(c));
            if (end == n_cp) break;
        }
    }
    return chunks;
}

}  // namespace cardgen::corpus

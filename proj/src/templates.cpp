#include "cardgen/templates.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "cardgen/errors.hpp"
#include "cardgen/io.hpp"
#include "cardgen/text.hpp"

#ifndef CARDGEN_SHARE_DIR
#define CARDGEN_SHARE_DIR ""
#endif

namespace cardgen::templates {

std::string_view to_string(CardKind kind) {
    return kind == CardKind::model ? "model" : "data";
}

CardKind card_kind_from_string(std::string_view s) {
    if (s == "model") return CardKind::model;
    if (s == "data") return CardKind::data;
    throw ValidationError("unknown card kind: \"" + std::string(s) + "\" (expected model or data)");
}

CardSchema::CardSchema(CardKind kind, std::vector<RoleSpec> roles,
                       std::vector<QuestionTemplate> questions)
    : kind_(kind), roles_(std::move(roles)), questions_(std::move(questions)) {
    for (const QuestionTemplate& q : questions_) {
        if (std::find(section_order_.begin(), section_order_.end(), q.section_name) ==
            section_order_.end()) {
            section_order_.push_back(q.section_name);
        }
    }
}

const QuestionTemplate* CardSchema::find_question(std::string_view question_id) const {
    for (const QuestionTemplate& q : questions_) {
        if (q.question_id == question_id) return &q;
    }
    return nullptr;
}

const QuestionTemplate* CardSchema::find_question_by_title(std::string_view title) const {
    for (const QuestionTemplate& q : questions_) {
        if (q.title == title) return &q;
    }
    return nullptr;
}

const RoleSpec& CardSchema::role_for(const QuestionTemplate& q) const {
    for (const RoleSpec& r : roles_) {
        if (r.name == q.role_name) return r;
    }
    throw ValidationError("unknown role \"" + q.role_name + "\" for question \"" + q.question_id +
                          "\"");
}

std::vector<const QuestionTemplate*> CardSchema::section_questions(std::string_view section) const {
    std::vector<const QuestionTemplate*> out;
    for (const QuestionTemplate& q : questions_) {
        if (q.section_name == section) out.push_back(&q);
    }
    return out;
}

std::vector<std::string> CardSchema::important_ids() const {
    std::vector<std::string> out;
    for (const QuestionTemplate& q : questions_) {
        if (q.important) out.push_back(q.question_id);
    }
    return out;
}

std::filesystem::path share_dir() {
    if (const char* env = std::getenv("CARDGEN_SHARE_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return CARDGEN_SHARE_DIR;
}

namespace {

bool parse_bool(std::string_view v) {
    std::string s = text::lower_ascii(text::trim(v));
    return s == "yes" || s == "true" || s == "1";
}

struct RawBlock {
    std::string type;  // "role" or "question"
    std::map<std::string, std::string> fields;
    std::size_t line = 0;
};

std::vector<RawBlock> parse_blocks(std::string_view content, std::vector<std::string>& problems) {
    std::vector<RawBlock> blocks;
    std::size_t lineno = 0;
    for (std::string_view raw : text::split_lines(content)) {
        ++lineno;
        std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back("line " + std::to_string(lineno) + ": malformed block header");
                continue;
            }
            std::string type = text::lower_ascii(text::trim(line.substr(1, line.size() - 2)));
            if (type != "role" && type != "question") {
                problems.push_back("line " + std::to_string(lineno) + ": unknown block type [" +
                                   type + "]");
            }
            blocks.push_back(RawBlock{type, {}, lineno});
            continue;
        }
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected \"key: value\"");
            continue;
        }
        if (blocks.empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": field outside of a block");
            continue;
        }
        std::string key = text::lower_ascii(text::trim(line.substr(0, colon)));
        std::string value(text::trim(line.substr(colon + 1)));
        blocks.back().fields[key] = value;
    }
    return blocks;
}

std::string title_from_id(std::string_view id) {
    std::string out(id);
    std::replace(out.begin(), out.end(), '_', ' ');
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

}  // namespace

CardSchema parse_schema(std::string_view content, const std::string& origin) {
    std::vector<std::string> problems;
    std::vector<RawBlock> blocks = parse_blocks(content, problems);

    std::vector<RoleSpec> roles;
    std::vector<QuestionTemplate> questions;
    bool kind_set = false;
    CardKind kind = CardKind::model;

    for (RawBlock& b : blocks) {
        auto field = [&](const char* name) -> std::string {
            auto it = b.fields.find(name);
            return it == b.fields.end() ? std::string() : it->second;
        };
        if (b.type == "role") {
            RoleSpec role;
            role.name = field("name");
            role.description = field("description");
            if (role.name.empty()) {
                problems.push_back("role block at line " + std::to_string(b.line) +
                                   ": missing name");
                continue;
            }
            roles.push_back(std::move(role));
        } else if (b.type == "question") {
            QuestionTemplate q;
            q.question_id = field("id");
            q.section_name = field("section");
            q.title = field("title");
            q.role_name = field("role");
            q.prompt = field("prompt");
            q.important = parse_bool(field("important"));
            std::string where = q.question_id.empty()
                                    ? "question block at line " + std::to_string(b.line)
                                    : "question \"" + q.question_id + "\"";
            if (q.question_id.empty()) problems.push_back(where + ": missing id");
            if (q.section_name.empty()) problems.push_back(where + ": missing section");
            if (q.prompt.empty()) problems.push_back(where + ": empty prompt");
            std::string kind_field = field("kind");
            if (kind_field.empty()) {
                problems.push_back(where + ": missing kind");
            } else {
                try {
                    q.card_kind = card_kind_from_string(kind_field);
                    if (kind_set && q.card_kind != kind) {
                        problems.push_back(where + ": kind \"" + kind_field +
                                           "\" differs from the file's kind \"" +
                                           std::string(to_string(kind)) + "\"");
                    } else {
                        kind = q.card_kind;
                        kind_set = true;
                    }
                } catch (const ValidationError&) {
                    problems.push_back(where + ": unknown kind \"" + kind_field + "\"");
                }
            }
            if (q.title.empty()) q.title = title_from_id(q.question_id);
            questions.push_back(std::move(q));
        }
    }

    std::set<std::string> role_names;
    for (const RoleSpec& r : roles) {
        if (!role_names.insert(r.name).second) {
            problems.push_back("duplicate role \"" + r.name + "\"");
        }
    }
    std::set<std::string> ids;
    std::set<std::string> titles;
    for (const QuestionTemplate& q : questions) {
        if (!q.question_id.empty() && !ids.insert(q.question_id).second) {
            problems.push_back("duplicate question id \"" + q.question_id + "\"");
        }
        if (!q.title.empty() && !titles.insert(q.title).second) {
            problems.push_back("duplicate question title \"" + q.title + "\"");
        }
        if (q.role_name.empty()) {
            problems.push_back("question \"" + q.question_id + "\": missing role");
        } else if (role_names.count(q.role_name) == 0) {
            problems.push_back("question \"" + q.question_id + "\": unknown role \"" + q.role_name +
                               "\"");
        }
    }
    if (questions.empty()) problems.push_back("no question records");

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "template file " << origin << ": ";
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i > 0) msg << "; ";
            msg << problems[i];
        }
        throw ValidationError(msg.str());
    }
    return CardSchema(kind, std::move(roles), std::move(questions));
}

CardSchema load_schema(const std::filesystem::path& path) {
    return parse_schema(io::read_text_file(path), path.string());
}

std::string serialize_schema(const CardSchema& schema) {
    std::ostringstream out;
    for (const RoleSpec& r : schema.roles()) {
        out << "[role]\n";
        out << "name: " << r.name << "\n";
        out << "description: " << r.description << "\n";
        out << "\n";
    }
    for (const QuestionTemplate& q : schema.questions()) {
        out << "[question]\n";
        out << "id: " << q.question_id << "\n";
        out << "kind: " << to_string(q.card_kind) << "\n";
        out << "section: " << q.section_name << "\n";
        out << "title: " << q.title << "\n";
        out << "role: " << q.role_name << "\n";
        if (q.important) out << "important: yes\n";
        out << "prompt: " << q.prompt << "\n";
        out << "\n";
    }
    return out.str();
}

CardSchema builtin_schema(CardKind kind) {
    std::filesystem::path file =
        share_dir() / "templates" /
        (kind == CardKind::model ? "model_card.tmpl" : "data_card.tmpl");
    return load_schema(file);
}

std::vector<std::string> important_questions(CardKind kind) {
    return builtin_schema(kind).important_ids();
}

}  // namespace cardgen::templates

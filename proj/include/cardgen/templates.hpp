#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cardgen::templates {

enum class CardKind { model, data };

std::string_view to_string(CardKind kind);
CardKind card_kind_from_string(std::string_view s);

struct RoleSpec {
    std::string name;
    std::string description;  // expertise blurb injected into the system message

    friend bool operator==(const RoleSpec&, const RoleSpec&) = default;
};

struct QuestionTemplate {
    std::string question_id;
    CardKind card_kind = CardKind::model;
    std::string section_name;
    std::string title;  // display name used as the card heading
    std::string role_name;
    std::string prompt;
    bool important = false;

    friend bool operator==(const QuestionTemplate&, const QuestionTemplate&) = default;
};

class CardSchema {
public:
    CardSchema() = default;
    CardSchema(CardKind kind, std::vector<RoleSpec> roles, std::vector<QuestionTemplate> questions);

    CardKind card_kind() const { return kind_; }
    const std::vector<QuestionTemplate>& questions() const { return questions_; }
    const std::vector<RoleSpec>& roles() const { return roles_; }
    const std::vector<std::string>& section_order() const { return section_order_; }
    std::size_t question_count() const { return questions_.size(); }

    const QuestionTemplate* find_question(std::string_view question_id) const;
    const QuestionTemplate* find_question_by_title(std::string_view title) const;
    const RoleSpec& role_for(const QuestionTemplate& q) const;

    // Questions of one section, schema order.
    std::vector<const QuestionTemplate*> section_questions(std::string_view section) const;

    std::vector<std::string> important_ids() const;

    friend bool operator==(const CardSchema&, const CardSchema&) = default;

private:
    CardKind kind_ = CardKind::model;
    std::vector<RoleSpec> roles_;
    std::vector<QuestionTemplate> questions_;
    std::vector<std::string> section_order_;
};

// Root of the shipped data files (templates, prompts). Resolution order:
// CARDGEN_SHARE_DIR environment variable, then the build-time default.
std::filesystem::path share_dir();

// The shipped question templates: 31 questions in 7 sections for model
// cards, 21 questions for data cards.
CardSchema builtin_schema(CardKind kind);

// Parses the line-oriented template format (share/templates/FORMAT.md).
// Throws ValidationError listing every offending entry.
CardSchema parse_schema(std::string_view content, const std::string& origin);
CardSchema load_schema(const std::filesystem::path& path);

std::string serialize_schema(const CardSchema& schema);

// Ids flagged important in the builtin template for this kind.
std::vector<std::string> important_questions(CardKind kind);

}  // namespace cardgen::templates

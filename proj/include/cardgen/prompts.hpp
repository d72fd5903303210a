#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cardgen::prompts {

// Replaces every "{key}" occurrence; unknown placeholders are left intact.
std::string substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& vars);

// Prompt texts ship as data files (share/prompts/*.txt) so wording can be
// revised without code changes.
class PromptLibrary {
public:
    static PromptLibrary load(const std::filesystem::path& dir);
    static PromptLibrary builtin();

    const std::string& raw(std::string_view name) const;
    std::string render(std::string_view name,
                       const std::map<std::string, std::string>& vars) const;
    // Multi-part prompts (few-shot message lists) separated by "---" lines.
    std::vector<std::string> parts(std::string_view name) const;

    // Stable fingerprint of the loaded prompt set, recorded in reports.
    std::string digest() const;

private:
    std::map<std::string, std::string> prompts_;
};

}  // namespace cardgen::prompts

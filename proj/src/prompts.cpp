#include "cardgen/prompts.hpp"

#include <algorithm>

#include "cardgen/errors.hpp"
#include "cardgen/io.hpp"
#include "cardgen/templates.hpp"
#include "cardgen/text.hpp"

namespace cardgen::prompts {

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        std::size_t close = tmpl.find('}', open + 1);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        std::string key(tmpl.substr(open + 1, close - open - 1));
        auto it = vars.find(key);
        if (it != vars.end()) {
            out.append(it->second);
        } else {
            out.append(tmpl.substr(open, close - open + 1));
        }
        pos = close + 1;
    }
    return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("prompt directory not found: " + dir.string());
    }
    PromptLibrary lib;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::string content = io::read_text_file(entry.path());
        // trim one trailing newline added by editors
        if (!content.empty() && content.back() == '\n') content.pop_back();
        lib.prompts_[entry.path().stem().string()] = std::move(content);
    }
    if (lib.prompts_.empty()) {
        throw ConfigError("prompt directory has no .txt files: " + dir.string());
    }
    return lib;
}

PromptLibrary PromptLibrary::builtin() {
    return load(templates::share_dir() / "prompts");
}

const std::string& PromptLibrary::raw(std::string_view name) const {
    auto it = prompts_.find(std::string(name));
    if (it == prompts_.end()) {
        throw ConfigError("unknown prompt: \"" + std::string(name) + "\"");
    }
    return it->second;
}

std::string PromptLibrary::render(std::string_view name,
                                  const std::map<std::string, std::string>& vars) const {
    return substitute(raw(name), vars);
}

std::vector<std::string> PromptLibrary::parts(std::string_view name) const {
    const std::string& content = raw(name);
    std::vector<std::string> out;
    std::string current;
    for (std::string_view line : text::split_lines(content)) {
        if (text::trim(line) == "---") {
            out.push_back(std::string(text::trim(current)));
            current.clear();
        } else {
            current.append(line);
            current.push_back('\n');
        }
    }
    out.push_back(std::string(text::trim(current)));
    return out;
}

std::string PromptLibrary::digest() const {
    std::string all;
    for (const auto& [name, content] : prompts_) {
        all.append(name);
        all.push_back('\0');
        all.append(content);
        all.push_back('\0');
    }
    return text::to_hex(text::fnv1a64(all));
}

}  // namespace cardgen::prompts

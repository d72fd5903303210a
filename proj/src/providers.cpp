#include "cardgen/providers.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "cardgen/errors.hpp"
#include "cardgen/io.hpp"
#include "cardgen/text.hpp"

namespace cardgen::providers {

using nlohmann::json;

std::string_view to_string(Speaker speaker) {
    switch (speaker) {
        case Speaker::system: return "system";
        case Speaker::user: return "user";
        case Speaker::assistant: return "assistant";
    }
    return "user";
}

namespace {

void validate_request(const ChatRequest& request) {
    if (request.messages.empty()) throw ConfigError("chat request has no messages");
}

std::string render_messages(const ChatRequest& request) {
    std::string out;
    for (const Message& m : request.messages) {
        out.append("[");
        out.append(to_string(m.speaker));
        out.append("] ");
        out.append(m.content);
        out.push_back('\n');
    }
    return out;
}

void check_finite(const EmbeddingVector& v) {
    for (double x : v.values) {
        if (!std::isfinite(x)) throw ProtocolError("embedding contains a non-finite value");
    }
}

}  // namespace

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw ProtocolError("embedding dimension mismatch: " + std::to_string(a.dimension()) +
                            " vs " + std::to_string(b.dimension()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

EmbeddingVector mock_embedding(std::string_view text_in, std::size_t dimension) {
    if (dimension < 2) throw ConfigError("mock embedding dimension must be at least 2");
    std::vector<double> values(dimension, 0.0);
    std::vector<std::string> tokens = text::tokenize_alnum(text_in);
    if (tokens.empty()) {
        values[0] = 1.0;  // reserved axis for the empty token set
        return EmbeddingVector{std::move(values)};
    }
    for (const std::string& token : tokens) {
        values[1 + text::fnv1a64(token) % (dimension - 1)] += 1.0;
    }
    double norm = 0.0;
    for (double x : values) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : values) x /= norm;
    return EmbeddingVector{std::move(values)};
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension,
                                             std::shared_ptr<CallCounters> counters)
    : dimension_(dimension), counters_(std::move(counters)) {}

std::vector<EmbeddingVector> MockEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ConfigError("embed requires at least one text");
    if (counters_) counters_->embed_calls += texts.size();
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(mock_embedding(t, dimension_));
    return out;
}

ScriptedChatProvider::ScriptedChatProvider(std::vector<ScriptRule> rules,
                                           std::optional<std::string> default_response,
                                           std::shared_ptr<CallCounters> counters)
    : rules_(std::move(rules)), default_(std::move(default_response)),
      counters_(std::move(counters)) {}

ScriptedChatProvider ScriptedChatProvider::from_file(const std::filesystem::path& path,
                                                     std::shared_ptr<CallCounters> counters) {
    json root;
    try {
        root = json::parse(io::read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError("script file " + path.string() + ": invalid JSON: " + e.what());
    }
    std::vector<ScriptRule> rules;
    for (const json& r : root.value("rules", json::array())) {
        ScriptRule rule;
        const json& pat = r.at("contains");
        if (pat.is_string()) {
            rule.contains.push_back(pat.get<std::string>());
        } else {
            for (const json& p : pat) rule.contains.push_back(p.get<std::string>());
        }
        rule.response = r.at("response").get<std::string>();
        rules.push_back(std::move(rule));
    }
    std::optional<std::string> def;
    if (root.contains("default")) def = root["default"].get<std::string>();
    return ScriptedChatProvider(std::move(rules), std::move(def), std::move(counters));
}

void ScriptedChatProvider::add_rule(std::vector<std::string> contains, std::string response) {
    rules_.push_back(ScriptRule{std::move(contains), std::move(response)});
}

void ScriptedChatProvider::set_default(std::string response) {
    default_ = std::move(response);
}

std::string ScriptedChatProvider::chat(const ChatRequest& request) {
    validate_request(request);
    ++calls_;
    if (counters_) ++counters_->chat_calls;
    std::string haystack = render_messages(request);
    const std::string* response = nullptr;
    for (const ScriptRule& rule : rules_) {
        bool all = true;
        for (const std::string& pattern : rule.contains) {
            if (haystack.find(pattern) == std::string::npos) {
                all = false;
                break;
            }
        }
        if (all) {
            response = &rule.response;
            break;
        }
    }
    if (response == nullptr) {
        if (!default_.has_value()) {
            throw ProviderError("scripted provider: no rule matches request:\n" + haystack);
        }
        response = &*default_;
    }
    if (text::trim(*response).empty()) {
        throw EmptyResponseError("scripted provider returned empty content");
    }
    return *response;
}

std::string canonical_chat_request(const ChatRequest& request) {
    json msgs = json::array();
    for (const Message& m : request.messages) {
        msgs.push_back({{"content", m.content}, {"role", std::string(to_string(m.speaker))}});
    }
    json body{{"kind", "chat"},
              {"max_output", request.max_output},
              {"messages", std::move(msgs)},
              {"model", request.model_name},
              {"temperature", request.temperature}};
    return body.dump();
}

std::string chat_digest(const ChatRequest& request) {
    return text::to_hex(text::fnv1a64(canonical_chat_request(request)));
}

std::string embed_digest(std::string_view model, std::string_view input_text) {
    json body{{"input", std::string(input_text)},
              {"kind", "embed"},
              {"model", std::string(model)}};
    return text::to_hex(text::fnv1a64(body.dump()));
}

CassetteMode cassette_mode_from_string(std::string_view s) {
    if (s == "record") return CassetteMode::record;
    if (s == "replay") return CassetteMode::replay;
    if (s == "passthrough") return CassetteMode::passthrough;
    throw ConfigError("unknown cassette mode: \"" + std::string(s) +
                      "\" (expected record, replay, or passthrough)");
}

Cassette::Cassette(CassetteMode mode, std::filesystem::path file)
    : mode_(mode), file_(std::move(file)) {
    if (mode_ == CassetteMode::passthrough) return;
    if (!std::filesystem::exists(file_)) {
        if (mode_ == CassetteMode::replay) {
            throw ConfigError("cassette file not found: " + file_.string());
        }
        return;
    }
    std::string content = io::read_text_file(file_);
    std::size_t lineno = 0;
    for (std::string_view line : text::split_lines(content)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            json entry = json::parse(line);
            entries_[entry.at("digest").get<std::string>()] = entry.at("response");
        } catch (const json::exception& e) {
            throw ParseError("cassette " + file_.string() + " line " + std::to_string(lineno) +
                             ": " + e.what());
        }
    }
}

std::optional<json> Cassette::lookup(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Cassette::append(const std::string& digest, std::string_view kind, json response) {
    std::lock_guard<std::mutex> lock(mutex_);
    json entry{{"digest", digest}, {"kind", std::string(kind)}, {"response", response}};
    std::filesystem::path dir = file_.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to cassette: " + file_.string());
    out << entry.dump() << "\n";
    out.flush();
    entries_[digest] = std::move(response);
}

std::size_t Cassette::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

CassetteChatProvider::CassetteChatProvider(std::shared_ptr<ChatProvider> inner,
                                           std::shared_ptr<Cassette> cassette,
                                           std::shared_ptr<CallCounters> counters)
    : inner_(std::move(inner)), cassette_(std::move(cassette)), counters_(std::move(counters)) {
    if (cassette_ == nullptr) throw ConfigError("cassette provider requires a cassette");
    if (cassette_->mode() != CassetteMode::replay && inner_ == nullptr) {
        throw ConfigError("cassette record/passthrough mode requires an inner provider");
    }
}

std::string CassetteChatProvider::chat(const ChatRequest& request) {
    validate_request(request);
    std::string digest = chat_digest(request);
    if (cassette_->mode() == CassetteMode::replay) {
        std::optional<json> hit = cassette_->lookup(digest);
        if (!hit.has_value()) {
            throw ProviderError("cassette miss for chat request (digest " + digest + ")");
        }
        if (counters_) ++counters_->cassette_hits;
        return hit->get<std::string>();
    }
    std::string response = inner_->chat(request);
    if (cassette_->mode() == CassetteMode::record) cassette_->append(digest, "chat", response);
    return response;
}

CassetteEmbeddingProvider::CassetteEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                     std::shared_ptr<Cassette> cassette,
                                                     std::string model,
                                                     std::shared_ptr<CallCounters> counters)
    : inner_(std::move(inner)), cassette_(std::move(cassette)), model_(std::move(model)),
      counters_(std::move(counters)) {
    if (cassette_ == nullptr) throw ConfigError("cassette provider requires a cassette");
    if (cassette_->mode() != CassetteMode::replay && inner_ == nullptr) {
        throw ConfigError("cassette record/passthrough mode requires an inner provider");
    }
}

std::vector<EmbeddingVector> CassetteEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    if (texts.empty()) throw ConfigError("embed requires at least one text");
    if (cassette_->mode() == CassetteMode::replay) {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const std::string& t : texts) {
            std::string digest = embed_digest(model_, t);
            std::optional<json> hit = cassette_->lookup(digest);
            if (!hit.has_value()) {
                throw ProviderError("cassette miss for embedding request (digest " + digest + ")");
            }
            if (counters_) ++counters_->cassette_hits;
            EmbeddingVector v{hit->get<std::vector<double>>()};
            check_finite(v);
            out.push_back(std::move(v));
        }
        return out;
    }
    std::vector<EmbeddingVector> out = inner_->embed(texts);
    if (cassette_->mode() == CassetteMode::record) {
        for (std::size_t i = 0; i < texts.size(); ++i) {
            cassette_->append(embed_digest(model_, texts[i]), "embed", json(out[i].values));
        }
    }
    return out;
}

CachingChatProvider::CachingChatProvider(std::shared_ptr<ChatProvider> inner,
                                         std::shared_ptr<CallCounters> counters)
    : inner_(std::move(inner)), counters_(std::move(counters)) {
    if (inner_ == nullptr) throw ConfigError("caching provider requires an inner provider");
}

std::string CachingChatProvider::chat(const ChatRequest& request) {
    validate_request(request);
    std::string digest = chat_digest(request);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(digest);
        if (it != cache_.end()) {
            if (counters_) ++counters_->cache_hits;
            return it->second;
        }
    }
    std::string response = inner_->chat(request);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_[digest] = response;
    return response;
}

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                   std::string model,
                                                   std::shared_ptr<CallCounters> counters)
    : inner_(std::move(inner)), model_(std::move(model)), counters_(std::move(counters)) {
    if (inner_ == nullptr) throw ConfigError("caching provider requires an inner provider");
}

std::vector<EmbeddingVector> CachingEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ConfigError("embed requires at least one text");
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto it = cache_.find(embed_digest(model_, texts[i]));
            if (it != cache_.end()) {
                out[i] = it->second;
                if (counters_) ++counters_->cache_hits;
            } else {
                missing.push_back(i);
            }
        }
    }
    if (!missing.empty()) {
        std::vector<std::string> batch;
        batch.reserve(missing.size());
        for (std::size_t i : missing) batch.push_back(texts[i]);
        std::vector<EmbeddingVector> fresh = inner_->embed(batch);
        if (fresh.size() != batch.size()) {
            throw ProtocolError("embedding provider returned " + std::to_string(fresh.size()) +
                                " vectors for " + std::to_string(batch.size()) + " inputs");
        }
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t j = 0; j < missing.size(); ++j) {
            cache_[embed_digest(model_, batch[j])] = fresh[j];
            out[missing[j]] = std::move(fresh[j]);
        }
    }
    return out;
}

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t limit) : available_(limit == 0 ? 1 : limit) {}

ConcurrencyLimiter::Token::Token(ConcurrencyLimiter& limiter) : limiter_(limiter) {
    std::unique_lock<std::mutex> lock(limiter_.mutex_);
    limiter_.cv_.wait(lock, [&] { return limiter_.available_ > 0; });
    --limiter_.available_;
}

ConcurrencyLimiter::Token::~Token() {
    {
        std::lock_guard<std::mutex> lock(limiter_.mutex_);
        ++limiter_.available_;
    }
    limiter_.cv_.notify_one();
}

namespace {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading path prefix, no trailing slash
};

UrlParts split_base_url(const std::string& base_url) {
    std::size_t scheme = base_url.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("provider base_url must include a scheme: " + base_url);
    }
    std::size_t slash = base_url.find('/', scheme + 3);
    UrlParts parts;
    if (slash == std::string::npos) {
        parts.origin = base_url;
    } else {
        parts.origin = base_url.substr(0, slash);
        parts.path = base_url.substr(slash);
        while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
    }
    return parts;
}

// POSTs with bounded exponential backoff on transport errors and 5xx.
json post_json_with_retry(const HttpProviderConfig& config, const std::string& endpoint,
                          const json& body, const std::shared_ptr<CallCounters>& counters) {
    UrlParts parts = split_base_url(config.base_url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

    const std::string payload = body.dump();
    const std::string path = parts.path + endpoint;
    auto sleeper = config.retry.sleeper
                       ? config.retry.sleeper
                       : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    std::string last_failure;
    std::chrono::milliseconds delay = config.retry.initial_delay;
    for (int attempt = 0; attempt <= config.retry.max_retries; ++attempt) {
        if (attempt > 0) {
            sleeper(delay);
            delay *= config.retry.backoff_factor;
        }
        std::optional<ConcurrencyLimiter::Token> token;
        if (config.limiter) token.emplace(*config.limiter);
        if (counters) ++counters->network_requests;
        httplib::Result result = client.Post(path, headers, payload, "application/json");
        if (!result) {
            last_failure = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_failure = "server error: HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status >= 400) {
            throw ProviderError("provider rejected request: HTTP " +
                                    std::to_string(result->status) + " " + result->body,
                                /*retryable=*/false);
        }
        try {
            return json::parse(result->body);
        } catch (const json::exception& e) {
            throw ProtocolError("provider returned invalid JSON: " + std::string(e.what()));
        }
    }
    throw ProviderError("provider unreachable after " +
                            std::to_string(config.retry.max_retries + 1) + " attempts (" +
                            last_failure + ")",
                        /*retryable=*/true);
}

}  // namespace

HttpChatProvider::HttpChatProvider(HttpProviderConfig config,
                                   std::shared_ptr<CallCounters> counters)
    : config_(std::move(config)), counters_(std::move(counters)) {}

std::string HttpChatProvider::chat(const ChatRequest& request) {
    validate_request(request);
    if (counters_) ++counters_->chat_calls;
    json messages = json::array();
    for (const Message& m : request.messages) {
        messages.push_back(
            {{"role", std::string(to_string(m.speaker))}, {"content", m.content}});
    }
    json body{{"model", request.model_name.empty() ? config_.model : request.model_name},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"max_tokens", request.max_output}};
    json response = post_json_with_retry(config_, "/chat/completions", body, counters_);
    try {
        const json& choices = response.at("choices");
        if (choices.empty()) throw EmptyResponseError("provider returned no choices");
        const json& content = choices.at(0).at("message").at("content");
        std::string out = content.is_null() ? std::string() : content.get<std::string>();
        if (text::trim(out).empty()) {
            throw EmptyResponseError("provider returned empty assistant content");
        }
        return out;
    } catch (const json::exception& e) {
        throw ProtocolError("unexpected chat-completions payload: " + std::string(e.what()));
    }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config,
                                             std::shared_ptr<CallCounters> counters)
    : config_(std::move(config)), counters_(std::move(counters)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ConfigError("embed requires at least one text");
    if (counters_) counters_->embed_calls += texts.size();
    json body{{"model", config_.model}, {"input", texts}};
    json response = post_json_with_retry(config_, "/embeddings", body, counters_);
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    try {
        const json& data = response.at("data");
        if (data.size() != texts.size()) {
            throw ProtocolError("embedding provider returned " + std::to_string(data.size()) +
                                " vectors for " + std::to_string(texts.size()) + " inputs");
        }
        for (const json& item : data) {
            std::size_t index = item.at("index").get<std::size_t>();
            if (index >= out.size() || filled[index]) {
                throw ProtocolError("embedding response has bad index " + std::to_string(index));
            }
            out[index] = EmbeddingVector{item.at("embedding").get<std::vector<double>>()};
            filled[index] = true;
        }
    } catch (const json::exception& e) {
        throw ProtocolError("unexpected embeddings payload: " + std::string(e.what()));
    }
    std::lock_guard<std::mutex> lock(mutex_);
    for (const EmbeddingVector& v : out) {
        check_finite(v);
        if (seen_dimension_ == 0) seen_dimension_ = v.dimension();
        if (v.dimension() != seen_dimension_) {
            throw ProtocolError("embedding dimension changed from " +
                                std::to_string(seen_dimension_) + " to " +
                                std::to_string(v.dimension()));
        }
    }
    return out;
}

}  // namespace cardgen::providers

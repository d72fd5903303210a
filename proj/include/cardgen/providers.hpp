#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cardgen::providers {

enum class Speaker { system, user, assistant };

std::string_view to_string(Speaker speaker);

struct Message {
    Speaker speaker = Speaker::user;
    std::string content;
};

struct ChatRequest {
    std::string model_name;
    std::vector<Message> messages;  // must be non-empty
    double temperature = 0.0;
    int max_output = 1024;
};

struct EmbeddingVector {
    std::vector<double> values;  // all finite
    std::size_t dimension() const { return values.size(); }
};

// Both throw ProtocolError on dimension mismatch.
double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Shared call accounting across a provider stack.
struct CallCounters {
    std::atomic<std::uint64_t> chat_calls{0};        // leaf chat invocations
    std::atomic<std::uint64_t> embed_calls{0};       // leaf embedded texts
    std::atomic<std::uint64_t> network_requests{0};  // HTTP attempts
    std::atomic<std::uint64_t> cache_hits{0};
    std::atomic<std::uint64_t> cassette_hits{0};
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    // Returns the assistant message content. Refusal/empty content raises
    // EmptyResponseError; transport problems raise ProviderError.
    virtual std::string chat(const ChatRequest& request) = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // One vector per input text, same order, constant dimension.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Deterministic bag-of-tokens embedding: token axes are
// 1 + hash(token) % (dim - 1), counts normalized to unit length. Axis 0 is
// reserved for the empty token set.
EmbeddingVector mock_embedding(std::string_view text, std::size_t dimension = 64);

class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dimension = 64,
                                   std::shared_ptr<CallCounters> counters = nullptr);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const { return dimension_; }

private:
    std::size_t dimension_;
    std::shared_ptr<CallCounters> counters_;
};

// Rule with AND semantics over substring patterns.
struct ScriptRule {
    std::vector<std::string> contains;
    std::string response;
};

// Deterministic scripted chat: first rule whose patterns all occur in the
// rendered conversation wins.
class ScriptedChatProvider : public ChatProvider {
public:
    ScriptedChatProvider() = default;
    explicit ScriptedChatProvider(std::vector<ScriptRule> rules,
                                  std::optional<std::string> default_response = std::nullopt,
                                  std::shared_ptr<CallCounters> counters = nullptr);
    static ScriptedChatProvider from_file(const std::filesystem::path& path,
                                          std::shared_ptr<CallCounters> counters = nullptr);

    void add_rule(std::vector<std::string> contains, std::string response);
    void set_default(std::string response);

    std::string chat(const ChatRequest& request) override;
    std::uint64_t calls() const { return calls_.load(); }

private:
    std::vector<ScriptRule> rules_;
    std::optional<std::string> default_;
    std::shared_ptr<CallCounters> counters_;
    std::atomic<std::uint64_t> calls_{0};
};

// Canonical field-ordered JSON rendering; equal requests give equal bytes
// across processes.
std::string canonical_chat_request(const ChatRequest& request);
std::string chat_digest(const ChatRequest& request);
std::string embed_digest(std::string_view model, std::string_view input_text);

enum class CassetteMode { record, replay, passthrough };

CassetteMode cassette_mode_from_string(std::string_view s);

// Append-only request/response log keyed by digest. Replay mode performs
// no provider activity; a missing entry is an error.
class Cassette {
public:
    Cassette(CassetteMode mode, std::filesystem::path file);

    CassetteMode mode() const { return mode_; }
    std::optional<nlohmann::json> lookup(const std::string& digest) const;
    void append(const std::string& digest, std::string_view kind, nlohmann::json response);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    CassetteMode mode_;
    std::filesystem::path file_;
    std::map<std::string, nlohmann::json> entries_;
};

class CassetteChatProvider : public ChatProvider {
public:
    // `inner` may be null in replay mode.
    CassetteChatProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<Cassette> cassette,
                         std::shared_ptr<CallCounters> counters = nullptr);
    std::string chat(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<Cassette> cassette_;
    std::shared_ptr<CallCounters> counters_;
};

class CassetteEmbeddingProvider : public EmbeddingProvider {
public:
    CassetteEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                              std::shared_ptr<Cassette> cassette, std::string model,
                              std::shared_ptr<CallCounters> counters = nullptr);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::shared_ptr<Cassette> cassette_;
    std::string model_;
    std::shared_ptr<CallCounters> counters_;
};

class CachingChatProvider : public ChatProvider {
public:
    CachingChatProvider(std::shared_ptr<ChatProvider> inner,
                        std::shared_ptr<CallCounters> counters = nullptr);
    std::string chat(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<CallCounters> counters_;
    std::mutex mutex_;
    std::map<std::string, std::string> cache_;
};

class CachingEmbeddingProvider : public EmbeddingProvider {
public:
    CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, std::string model,
                             std::shared_ptr<CallCounters> counters = nullptr);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::string model_;
    std::shared_ptr<CallCounters> counters_;
    std::mutex mutex_;
    std::map<std::string, EmbeddingVector> cache_;
};

// Bounds in-flight provider requests (default 4).
class ConcurrencyLimiter {
public:
    explicit ConcurrencyLimiter(std::size_t limit);

    class Token {
    public:
        explicit Token(ConcurrencyLimiter& limiter);
        ~Token();
        Token(const Token&) = delete;
        Token& operator=(const Token&) = delete;

    private:
        ConcurrencyLimiter& limiter_;
    };
    Token acquire() { return Token(*this); }

private:
    friend class Token;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t available_;
};

struct RetryPolicy {
    int max_retries = 3;  // retries after the first attempt: delays 1s/4s/16s
    std::chrono::milliseconds initial_delay{1000};
    int backoff_factor = 4;
    std::function<void(std::chrono::milliseconds)> sleeper;  // injectable for tests
};

struct HttpProviderConfig {
    std::string base_url;  // e.g. "https://api.example.com/v1"
    std::string model;
    std::string api_key;  // resolved credential; empty sends no auth header
    RetryPolicy retry;
    std::shared_ptr<ConcurrencyLimiter> limiter;
};

// Chat-completions endpoint speaking the de facto commercial JSON schema.
class HttpChatProvider : public ChatProvider {
public:
    HttpChatProvider(HttpProviderConfig config, std::shared_ptr<CallCounters> counters = nullptr);
    std::string chat(const ChatRequest& request) override;

private:
    HttpProviderConfig config_;
    std::shared_ptr<CallCounters> counters_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(HttpProviderConfig config,
                          std::shared_ptr<CallCounters> counters = nullptr);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    HttpProviderConfig config_;
    std::shared_ptr<CallCounters> counters_;
    std::mutex mutex_;
    std::size_t seen_dimension_ = 0;
};

// The bundle threaded through the pipeline.
struct ProviderSet {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<EmbeddingProvider> embedding;
    std::shared_ptr<ChatProvider> judge;
    std::shared_ptr<CallCounters> counters;
};

}  // namespace cardgen::providers

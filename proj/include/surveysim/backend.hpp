#pragma once

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "surveysim/catalog.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/prompt.hpp"
#include "surveysim/sha256.hpp"
#include "surveysim/synthetic.hpp"

namespace surveysim {

// Extract the first integer token from a raw completion. "5", " 7.\n" and
// "Rating: 6" all parse; text without digits or with a first integer outside
// 1..7 is rejected.
inline int parse_rating(std::string_view raw) {
    std::size_t pos = 0;
    while (pos < raw.size() && !std::isdigit(static_cast<unsigned char>(raw[pos]))) ++pos;
    if (pos == raw.size()) {
        throw ParseError("unparseable rating: no integer token in \"" + std::string(raw) + "\"");
    }
    bool negative = pos > 0 && raw[pos - 1] == '-';
    long value = 0;
    while (pos < raw.size() && std::isdigit(static_cast<unsigned char>(raw[pos]))) {
        value = value * 10 + (raw[pos] - '0');
        if (value > 1000000) break; // avoid overflow on digit floods
        ++pos;
    }
    if (negative) value = -value;
    if (value < 1 || value > 7) {
        throw ParseError("rating out of range: first integer token " + std::to_string(value) +
                         " not in [1, 7]");
    }
    return static_cast<int>(value);
}

enum class BackendKind { Remote, Synthetic };

struct SamplingParams {
    double temperature = 1.0;
    int max_output_tokens = 8;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
};

struct BackendConfig {
    BackendKind kind = BackendKind::Synthetic;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo-1106";
    SamplingParams sampling;
    RetryPolicy retry;
    double requests_per_second = 2.0;
    std::filesystem::path cache_dir; // empty disables the response cache
    std::string api_key_env = "OPENAI_API_KEY";
    SyntheticRespondentParams synthetic;

    void validate() const {
        if (sampling.temperature < 0) throw ConfigError("backend: temperature must be >= 0");
        if (retry.max_attempts < 1) throw ConfigError("backend: max attempts must be >= 1");
        if (requests_per_second <= 0) throw ConfigError("backend: rate limit must be positive");
        if (kind == BackendKind::Synthetic) synthetic.validate();
    }

    std::string fingerprint() const {
        std::ostringstream out;
        if (kind == BackendKind::Synthetic) {
            out << "synthetic:" << sha256_hex(synthetic_params_to_json(synthetic).dump()).substr(0, 12);
        } else {
            out << "remote:" << model << "@" << endpoint << ";t=" << sampling.temperature
                << ";mt=" << sampling.max_output_tokens;
        }
        return out.str();
    }
};

inline nlohmann::json backend_config_to_json(const BackendConfig& c) {
    return nlohmann::json{
        {"kind", c.kind == BackendKind::Synthetic ? "synthetic" : "remote"},
        {"endpoint", c.endpoint},
        {"model", c.model},
        {"temperature", c.sampling.temperature},
        {"max_output_tokens", c.sampling.max_output_tokens},
        {"max_attempts", c.retry.max_attempts},
        {"initial_backoff_ms", c.retry.initial_backoff.count()},
        {"backoff_multiplier", c.retry.multiplier},
        {"requests_per_second", c.requests_per_second},
        {"cache_dir", c.cache_dir.string()},
        {"api_key_env", c.api_key_env},
        {"synthetic", synthetic_params_to_json(c.synthetic)},
    };
}

inline BackendConfig backend_config_from_json(const nlohmann::json& j) {
    BackendConfig c;
    const std::string kind = j.value("kind", "synthetic");
    if (kind == "synthetic") {
        c.kind = BackendKind::Synthetic;
    } else if (kind == "remote") {
        c.kind = BackendKind::Remote;
    } else {
        throw ConfigError("backend: unknown kind '" + kind + "'");
    }
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.sampling.temperature = j.value("temperature", c.sampling.temperature);
    c.sampling.max_output_tokens = j.value("max_output_tokens", c.sampling.max_output_tokens);
    c.retry.max_attempts = j.value("max_attempts", c.retry.max_attempts);
    c.retry.initial_backoff =
        std::chrono::milliseconds(j.value("initial_backoff_ms", c.retry.initial_backoff.count()));
    c.retry.multiplier = j.value("backoff_multiplier", c.retry.multiplier);
    c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
    c.cache_dir = j.value("cache_dir", std::string());
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    if (j.contains("synthetic")) c.synthetic = synthetic_params_from_json(j.at("synthetic"));
    c.validate();
    return c;
}

// Content-addressed response cache: one file per (prompt, model, sampling)
// digest, written via rename so interrupted runs can resume cleanly.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    static std::string key_for(std::string_view prompt_text, const std::string& model,
                               const SamplingParams& sampling) {
        std::ostringstream material;
        material << model << '\x1f' << sampling.temperature << '\x1f' << sampling.max_output_tokens
                 << '\x1f' << prompt_text;
        return sha256_hex(material.str());
    }

    std::optional<std::string> lookup(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        std::ifstream file(dir_ / (key + ".txt"), std::ios::binary);
        if (!file) return std::nullopt;
        std::ostringstream content;
        content << file.rdbuf();
        return content.str();
    }

    void store(const std::string& key, std::string_view text) const {
        if (!enabled()) return;
        std::lock_guard<std::mutex> lock(mutex_);
        const auto final_path = dir_ / (key + ".txt");
        const auto tmp_path = dir_ / (key + ".tmp");
        {
            std::ofstream file(tmp_path, std::ios::binary);
            file << text;
        }
        std::filesystem::rename(tmp_path, final_path);
    }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

// Token-bucket rate limiter; the clock is injectable for tests.
class TokenBucket {
public:
    TokenBucket(double tokens_per_second, double burst)
        : rate_(tokens_per_second), burst_(burst), tokens_(burst) {}

    // Seconds the caller must wait before its request may proceed.
    double acquire_delay(double now_seconds) {
        std::lock_guard<std::mutex> lock(mutex_);
        refill(now_seconds);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return 0.0;
        }
        const double deficit = 1.0 - tokens_;
        tokens_ -= 1.0; // the request is committed; debt delays later callers
        return deficit / rate_;
    }

    void acquire() {
        const double delay = acquire_delay(steady_seconds());
        if (delay > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }

    static double steady_seconds() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }

private:
    void refill(double now_seconds) {
        if (last_ < 0) last_ = now_seconds;
        tokens_ = std::min(burst_, tokens_ + (now_seconds - last_) * rate_);
        last_ = now_seconds;
    }

    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    double last_ = -1.0;
};

class RespondentBackend {
public:
    virtual ~RespondentBackend() = default;

    // Raw completion text for one rendered prompt.
    virtual std::string complete_text(const RenderedPrompt& prompt) = 0;

    virtual std::string fingerprint() const = 0;
};

// Deterministic test respondent. It reads the prompt the way the remote model
// would: the deprivation score comes from the rating lines of the rendered
// text and the country from the country-of-residence line, so masked prompts
// genuinely deny it the country signal.
class SyntheticBackend : public RespondentBackend {
public:
    SyntheticBackend(SyntheticRespondentParams params, const CatalogSet& catalogs)
        : params_(std::move(params)), catalogs_(&catalogs) {
        params_.validate();
        std::ostringstream fp;
        fp << "synthetic:" << sha256_hex(synthetic_params_to_json(params_).dump()).substr(0, 12);
        fingerprint_ = fp.str();
    }

    std::string complete_text(const RenderedPrompt& prompt) override {
        const LanguageCatalog& catalog = require_catalog(*catalogs_, prompt.language_code);
        const std::optional<Country> country = extract_country(prompt.text, catalog);
        const double d = extract_mean_deprivation(prompt.text, catalog);
        const double mu =
            synthetic_mean(params_for(params_, prompt.probe), country, d,
                           prompt.framing.anti_elite, prompt.framing.anti_immigrant,
                           language_bias_for(params_, prompt.language_code));
        const double noise = synthetic_noise(params_, prompt.persona_id, prompt.probe);
        return std::to_string(round_half_up_rating(mu + noise));
    }

    std::string fingerprint() const override { return fingerprint_; }

private:
    static std::optional<Country> extract_country(const std::string& text,
                                                  const LanguageCatalog& catalog) {
        const std::string needle = catalog.str("label_country") + ": ";
        const std::size_t at = text.find(needle);
        if (at == std::string::npos) return std::nullopt;
        const std::size_t begin = at + needle.size();
        const std::size_t end = text.find('\n', begin);
        const std::string name = text.substr(begin, end - begin);
        for (Country c : kCountries) {
            if (catalog.country_name(c) == name) return c;
        }
        return std::nullopt;
    }

    static double extract_mean_deprivation(const std::string& text,
                                           const LanguageCatalog& catalog) {
        const std::string needle = catalog.str("rating_prefix") + " ";
        double sum = 0;
        int count = 0;
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            const std::size_t value_at = pos + needle.size();
            if (value_at < text.size() && std::isdigit(static_cast<unsigned char>(text[value_at]))) {
                sum += text[value_at] - '0';
                ++count;
            }
            pos = value_at;
        }
        // A prompt with no completed rating lines would be malformed; treat as scale midpoint.
        return count == 0 ? 4.0 : sum / count;
    }

    SyntheticRespondentParams params_;
    const CatalogSet* catalogs_;
    std::string fingerprint_;
};

namespace detail {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /path...
};

inline SplitUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("backend: endpoint missing scheme: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace detail

// HTTP chat-completion client with retry, backoff, rate limiting, and the
// content-addressed response cache.
class RemoteBackend : public RespondentBackend {
public:
    explicit RemoteBackend(BackendConfig config)
        : config_(std::move(config)),
          cache_(config_.cache_dir),
          bucket_(config_.requests_per_second, std::max(1.0, config_.requests_per_second)) {
        config_.validate();
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("backend: credential environment variable " + config_.api_key_env +
                              " is not set");
        }
        api_key_ = key;
    }

    std::string complete_text(const RenderedPrompt& prompt) override {
        const std::string key = ResponseCache::key_for(prompt.text, config_.model, config_.sampling);
        if (auto hit = cache_.lookup(key)) return *hit;

        const std::string text = post_with_retries(prompt.text);
        cache_.store(key, text);
        return text;
    }

    std::string fingerprint() const override { return config_.fingerprint(); }

private:
    std::string post_with_retries(const std::string& prompt_text) {
        const nlohmann::json body = {
            {"model", config_.model},
            {"temperature", config_.sampling.temperature},
            {"max_tokens", config_.sampling.max_output_tokens},
            {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                               {"content", prompt_text}}})},
        };
        const auto [base, path] = detail::split_url(config_.endpoint);

        std::string last_error;
        auto backoff = std::chrono::duration<double, std::milli>(
            static_cast<double>(config_.retry.initial_backoff.count()));
        for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(backoff);
                backoff *= config_.retry.multiplier;
            }
            bucket_.acquire();

            httplib::Client client(base);
            client.set_connection_timeout(30);
            client.set_read_timeout(120);
            client.set_default_headers({{"Authorization", "Bearer " + api_key_}});
            httplib::Result result = client.Post(path, body.dump(), "application/json");

            if (!result) {
                last_error = "transport error: " + httplib::to_string(result.error());
                continue;
            }
            if (result->status == 429 || result->status >= 500) {
                last_error = "HTTP " + std::to_string(result->status);
                continue;
            }
            if (result->status != 200) {
                throw BackendError("backend rejected request: HTTP " +
                                   std::to_string(result->status) + " " + result->body);
            }
            return extract_content(result->body);
        }
        throw BackendError("backend unreachable after " +
                           std::to_string(config_.retry.max_attempts) + " attempts (" + last_error +
                           ")");
    }

    static std::string extract_content(const std::string& body) {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded()) throw BackendError("backend returned invalid JSON");
        try {
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("unexpected completion shape: ") + e.what());
        }
    }

    BackendConfig config_;
    ResponseCache cache_;
    TokenBucket bucket_;
    std::string api_key_;
};

inline std::unique_ptr<RespondentBackend> make_backend(const BackendConfig& config,
                                                       const CatalogSet& catalogs) {
    config.validate();
    if (config.kind == BackendKind::Synthetic) {
        return std::make_unique<SyntheticBackend>(config.synthetic, catalogs);
    }
    return std::make_unique<RemoteBackend>(config);
}

// One-shot completion honoring the cache; the operation-level entry point.
inline std::string complete(const RenderedPrompt& prompt, const BackendConfig& config,
                            const CatalogSet& catalogs) {
    if (config.kind == BackendKind::Synthetic && !config.cache_dir.empty()) {
        ResponseCache cache(config.cache_dir);
        const std::string key =
            ResponseCache::key_for(prompt.text, config.model, config.sampling);
        if (auto hit = cache.lookup(key)) return *hit;
        SyntheticBackend backend(config.synthetic, catalogs);
        std::string text = backend.complete_text(prompt);
        cache.store(key, text);
        return text;
    }
    return make_backend(config, catalogs)->complete_text(prompt);
}

} // namespace surveysim

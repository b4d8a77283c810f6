#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "surveysim/backend.hpp"
#include "surveysim/catalog.hpp"
#include "surveysim/prompt.hpp"

using namespace surveysim;

namespace {

const CatalogSet& catalogs() {
    static const CatalogSet set =
        load_catalog_dir(std::filesystem::path(SURVEYSIM_SOURCE_DIR) / "data" / "catalogs");
    return set;
}

Persona persona(Country c = Country::Austria, FramingCondition framing = {true, false}) {
    Persona p;
    p.id = "x-0001";
    p.country = c;
    p.age = 35;
    p.gender = Gender::Female;
    p.education = 4;
    p.deprivation_ratings = {2, 4, 6};
    p.framing = framing;
    return p;
}

SyntheticRespondentParams country_sensitive_params() {
    SyntheticRespondentParams params;
    params.persuasion.intercept = 4.0;
    params.persuasion.country[static_cast<std::size_t>(Country::Austria)] = 1.0;
    params.persuasion.country[static_cast<std::size_t>(Country::Sweden)] = -1.0;
    return params;
}

struct ScopedEnv {
    std::string name;
    ScopedEnv(const std::string& n, const std::string& value) : name(n) {
        setenv(name.c_str(), value.c_str(), 1);
    }
    ~ScopedEnv() { unsetenv(name.c_str()); }
};

} // namespace

TEST_CASE("synthetic backend reads the country from the rendered text", "[backend]") {
    SyntheticBackend backend(country_sensitive_params(), catalogs());

    const auto unmasked =
        render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, false);
    CHECK(backend.complete_text(unmasked) == "5"); // 4 + austria effect

    const auto masked =
        render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, true);
    CHECK(backend.complete_text(masked) == "4"); // country invisible

    // The country line works in every catalog language, not just English.
    const auto german = render_prompt(persona(), catalogs().at("DE"), ProbeKind::Persuasion1, false);
    CHECK(backend.complete_text(german) == "5");
    const auto hebrew = render_prompt(persona(), catalogs().at("IW"), ProbeKind::Persuasion1, false);
    CHECK(backend.complete_text(hebrew) == "5");
}

TEST_CASE("synthetic backend recovers D from the rating lines", "[backend]") {
    SyntheticRespondentParams params;
    params.persuasion.intercept = 1.0;
    params.persuasion.d = 0.5; // rating = 1 + 0.5 * D
    SyntheticBackend backend(params, catalogs());
    Persona p = persona();
    p.deprivation_ratings = {6, 6, 6};
    const auto prompt = render_prompt(p, catalogs().at("EN"), ProbeKind::Persuasion2, false);
    CHECK(backend.complete_text(prompt) == "4");
}

TEST_CASE("synthetic gateway rating equals the persona-level operation", "[backend]") {
    SyntheticRespondentParams params = country_sensitive_params();
    params.noise_sd = 0.7;
    params.seed = 31;
    SyntheticBackend backend(params, catalogs());
    for (ProbeKind probe : kAllProbes) {
        const auto prompt = render_prompt(persona(), catalogs().at("EN"), probe, false);
        CHECK(backend.complete_text(prompt) ==
              std::to_string(synthetic_respond(persona(), probe, "EN", params)));
    }
}

TEST_CASE("token bucket spaces requests at the configured rate", "[backend]") {
    TokenBucket bucket(2.0, 1.0); // 2 rps, burst of one
    double now = 1000.0;
    CHECK(bucket.acquire_delay(now) == 0.0);
    CHECK_THAT(bucket.acquire_delay(now), Catch::Matchers::WithinAbs(0.5, 1e-9));
    CHECK_THAT(bucket.acquire_delay(now), Catch::Matchers::WithinAbs(1.0, 1e-9));
    // After enough time passes the bucket refills (up to the burst).
    now += 10.0;
    CHECK(bucket.acquire_delay(now) == 0.0);
    CHECK_THAT(bucket.acquire_delay(now), Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("cache serves repeats without touching the backend", "[backend]") {
    const auto dir = std::filesystem::temp_directory_path() / "surveysim_cache_test";
    std::filesystem::remove_all(dir);

    BackendConfig config;
    config.kind = BackendKind::Synthetic;
    config.synthetic = country_sensitive_params();
    config.cache_dir = dir;

    const auto prompt = render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, false);
    const std::string first = complete(prompt, config, catalogs());
    CHECK(first == "5");

    // Overwrite the cached entry; a repeat must come from the cache alone.
    const std::string key = ResponseCache::key_for(prompt.text, config.model, config.sampling);
    {
        std::ofstream f(dir / (key + ".txt"), std::ios::binary);
        f << "7";
    }
    CHECK(complete(prompt, config, catalogs()) == "7");
    std::filesystem::remove_all(dir);
}

TEST_CASE("remote backend needs its credential", "[backend]") {
    unsetenv("SURVEYSIM_TEST_KEY");
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.api_key_env = "SURVEYSIM_TEST_KEY";
    REQUIRE_THROWS_AS(RemoteBackend(config), ConfigError);
}

TEST_CASE("remote backend round-trips against a local server", "[backend]") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        const auto body = nlohmann::json::parse(req.body);
        REQUIRE(body.at("model") == "test-model");
        REQUIRE(body.at("messages").at(0).at("role") == "user");
        res.set_content(nlohmann::json{{"choices",
                                        {{{"message", {{"role", "assistant"}, {"content", "6"}}}}}}}
                            .dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ScopedEnv env("SURVEYSIM_TEST_KEY", "test-secret");
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    config.model = "test-model";
    config.api_key_env = "SURVEYSIM_TEST_KEY";
    config.requests_per_second = 1000;
    const auto dir = std::filesystem::temp_directory_path() / "surveysim_remote_cache";
    std::filesystem::remove_all(dir);
    config.cache_dir = dir;

    {
        RemoteBackend backend(config);
        const auto prompt =
            render_prompt(persona(), catalogs().at("EN"), ProbeKind::Mobilization1, false);
        CHECK(backend.complete_text(prompt) == "6");
        CHECK(hits == 1);
        // Cache hit: zero further network calls.
        CHECK(backend.complete_text(prompt) == "6");
        CHECK(hits == 1);
    }

    server.stop();
    runner.join();
    std::filesystem::remove_all(dir);
}

TEST_CASE("persistent failures exhaust the retry budget", "[backend]") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/fail", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ScopedEnv env("SURVEYSIM_TEST_KEY", "test-secret");
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/fail";
    config.api_key_env = "SURVEYSIM_TEST_KEY";
    config.requests_per_second = 1000;
    config.retry.max_attempts = 3;
    config.retry.initial_backoff = std::chrono::milliseconds(1);

    RemoteBackend backend(config);
    const auto prompt = render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, false);
    REQUIRE_THROWS_WITH(backend.complete_text(prompt),
                        Catch::Matchers::ContainsSubstring("after 3 attempts"));
    CHECK(hits == 3);

    server.stop();
    runner.join();
}

TEST_CASE("an unreachable endpoint fails after max attempts", "[backend]") {
    ScopedEnv env("SURVEYSIM_TEST_KEY", "test-secret");
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.endpoint = "http://127.0.0.1:1/nowhere"; // nothing listens on port 1
    config.api_key_env = "SURVEYSIM_TEST_KEY";
    config.requests_per_second = 1000;
    config.retry.max_attempts = 2;
    config.retry.initial_backoff = std::chrono::milliseconds(1);

    RemoteBackend backend(config);
    const auto prompt = render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, false);
    REQUIRE_THROWS_AS(backend.complete_text(prompt), BackendError);
}

TEST_CASE("client errors do not burn retries", "[backend]") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 404;
        res.set_content("no such model", "text/plain");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ScopedEnv env("SURVEYSIM_TEST_KEY", "test-secret");
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
    config.api_key_env = "SURVEYSIM_TEST_KEY";
    config.requests_per_second = 1000;
    config.retry.max_attempts = 5;

    RemoteBackend backend(config);
    const auto prompt = render_prompt(persona(), catalogs().at("EN"), ProbeKind::Persuasion1, false);
    REQUIRE_THROWS_WITH(backend.complete_text(prompt),
                        Catch::Matchers::ContainsSubstring("HTTP 404"));
    CHECK(hits == 1);

    server.stop();
    runner.join();
}

TEST_CASE("backend config round-trips through JSON", "[backend]") {
    BackendConfig config;
    config.kind = BackendKind::Remote;
    config.endpoint = "https://example.test/v1/chat/completions";
    config.model = "some-model";
    config.sampling.temperature = 0.25;
    config.sampling.max_output_tokens = 4;
    config.retry.max_attempts = 7;
    config.requests_per_second = 3.5;
    config.cache_dir = "/tmp/cache";
    const BackendConfig restored = backend_config_from_json(backend_config_to_json(config));
    CHECK(restored.kind == BackendKind::Remote);
    CHECK(restored.endpoint == config.endpoint);
    CHECK(restored.model == config.model);
    CHECK(restored.sampling.temperature == config.sampling.temperature);
    CHECK(restored.retry.max_attempts == config.retry.max_attempts);
    CHECK(restored.requests_per_second == config.requests_per_second);
    CHECK(restored.cache_dir == config.cache_dir);
    CHECK(restored.fingerprint() == config.fingerprint());
}

TEST_CASE("fingerprints identify the effective backend", "[backend]") {
    BackendConfig synthetic;
    synthetic.kind = BackendKind::Synthetic;
    const std::string a = synthetic.fingerprint();
    synthetic.synthetic.persuasion.intercept = 5.0;
    const std::string b = synthetic.fingerprint();
    CHECK(a != b);
    CHECK(a.rfind("synthetic:", 0) == 0);

    BackendConfig remote;
    remote.kind = BackendKind::Remote;
    CHECK(remote.fingerprint().find("gpt-3.5-turbo-1106") != std::string::npos);
}

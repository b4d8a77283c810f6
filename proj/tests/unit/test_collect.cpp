#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "surveysim/collect.hpp"

using namespace surveysim;

namespace {

const CatalogSet& catalogs() {
    static const CatalogSet set =
        load_catalog_dir(std::filesystem::path(SURVEYSIM_SOURCE_DIR) / "data" / "catalogs");
    return set;
}

std::vector<Persona> small_population(int per_country = 1) {
    PopulationSpec spec;
    for (Country c : kCountries) spec.per_country_counts[c] = per_country;
    spec.seed = 6;
    return assign_framing(synthesize_population(spec), 6);
}

// Test double that fails exactly the configured probes.
class FlakyBackend : public RespondentBackend {
public:
    std::string failing_persona;
    ProbeKind failing_probe = ProbeKind::Mobilization3;
    bool fail_everything = false;

    std::string complete_text(const RenderedPrompt& prompt) override {
        if (fail_everything ||
            (prompt.persona_id == failing_persona && prompt.probe == failing_probe)) {
            return "I cannot answer that.";
        }
        return "4";
    }
    std::string fingerprint() const override { return "test:flaky"; }
};

} // namespace

TEST_CASE("ten personas yield fifty ordered records", "[collect]") {
    PopulationSpec spec;
    spec.per_country_counts[Country::Austria] = 5;
    spec.per_country_counts[Country::Greece] = 5;
    spec.seed = 1;
    const auto personas = assign_framing(synthesize_population(spec), 1);

    SyntheticRespondentParams params;
    SyntheticBackend backend(params, catalogs());
    const auto plan = CollectionPlan::monolingual(personas, "EN");
    const CollectionResult result = collect_responses(personas, catalogs(), plan, backend);

    REQUIRE(result.records.size() == 50);
    REQUIRE(result.failures.empty());
    for (std::size_t i = 1; i < result.records.size(); ++i) {
        const auto& prev = result.records[i - 1];
        const auto& next = result.records[i];
        const bool ordered = prev.persona_id < next.persona_id ||
                             (prev.persona_id == next.persona_id &&
                              static_cast<int>(prev.probe) < static_cast<int>(next.probe));
        REQUIRE(ordered);
    }
    CHECK(result.records.front().backend_fingerprint.rfind("synthetic:", 0) == 0);
    CHECK(result.records.front().language_code == "EN");
}

TEST_CASE("one terminally unparseable probe leaves four records and one failure", "[collect]") {
    const auto personas = small_population();
    FlakyBackend backend;
    backend.failing_persona = personas.front().id;
    CollectionPlan plan = CollectionPlan::monolingual(personas, "EN");
    plan.max_failure_fraction = 0.05; // 1 of 75 stays under the threshold

    const CollectionResult result = collect_responses(personas, catalogs(), plan, backend);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].persona_id == personas.front().id);
    CHECK(result.failures[0].probe == ProbeKind::Mobilization3);
    CHECK(result.failures[0].reason.find("unparseable") != std::string::npos);
    int first_persona_records = 0;
    for (const ResponseRecord& r : result.records) {
        if (r.persona_id == personas.front().id) ++first_persona_records;
    }
    CHECK(first_persona_records == 4);
    CHECK(result.records.size() == personas.size() * 5 - 1);
}

TEST_CASE("excess failures raise an aggregate error", "[collect]") {
    const auto personas = small_population();
    FlakyBackend backend;
    backend.fail_everything = true;
    const auto plan = CollectionPlan::monolingual(personas, "EN");
    REQUIRE_THROWS_AS(collect_responses(personas, catalogs(), plan, backend), BackendError);
}

TEST_CASE("a persona without a language assignment fails that persona only", "[collect]") {
    const auto personas = small_population();
    SyntheticRespondentParams params;
    SyntheticBackend backend(params, catalogs());
    CollectionPlan plan = CollectionPlan::monolingual(personas, "EN");
    plan.language_by_persona.erase(personas.back().id);
    plan.max_failure_fraction = 0.10;
    const CollectionResult result = collect_responses(personas, catalogs(), plan, backend);
    CHECK(result.failures.size() == 5);
    CHECK(result.records.size() == (personas.size() - 1) * 5);
}

TEST_CASE("concurrent collection is byte-identical to serial", "[collect]") {
    const auto personas = small_population(4);
    SyntheticRespondentParams params;
    params.noise_sd = 0.9;
    params.seed = 77;
    SyntheticBackend backend(params, catalogs());

    CollectionPlan serial = CollectionPlan::monolingual(personas, "EN");
    serial.concurrency = 1;
    CollectionPlan parallel = serial;
    parallel.concurrency = 8;

    const auto a = collect_responses(personas, catalogs(), serial, backend);
    const auto b = collect_responses(personas, catalogs(), parallel, backend);
    REQUIRE(serialize_responses(a.records) == serialize_responses(b.records));
}

TEST_CASE("response records survive the JSONL round trip", "[collect]") {
    const auto personas = small_population();
    SyntheticRespondentParams params;
    params.noise_sd = 0.5;
    SyntheticBackend backend(params, catalogs());
    const auto plan = CollectionPlan::monolingual(personas, "DE", true);
    const auto result = collect_responses(personas, catalogs(), plan, backend);

    const auto path = std::filesystem::temp_directory_path() / "surveysim_responses_test.jsonl";
    save_responses(result.records, path);
    const auto loaded = load_responses(path);
    REQUIRE(loaded == result.records);
    std::filesystem::remove(path);
}

TEST_CASE("malformed response lines are rejected with context", "[collect]") {
    const auto path = std::filesystem::temp_directory_path() / "surveysim_responses_bad.jsonl";
    {
        std::ofstream f(path);
        f << R"({"v":1,"persona_id":"a","probe":"P1","rating":9,"language":"EN","masked":false})"
          << "\n";
    }
    REQUIRE_THROWS_WITH(load_responses(path), Catch::Matchers::ContainsSubstring(":1") &&
                                                  Catch::Matchers::ContainsSubstring("rating 9"));
    std::filesystem::remove(path);
}

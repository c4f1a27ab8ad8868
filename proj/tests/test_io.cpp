#include <cstring>
#include <filesystem>

#include "bcpnn/dataset.hpp"
#include "bcpnn/errors.hpp"
#include "bcpnn/oracle.hpp"
#include "bcpnn/report.hpp"
#include "bcpnn/snapshot.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bcpnn;

TEST_CASE("snapshot round-trip is byte-identical") {
    CounterRng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        Model model = testing::random_model(rng, 2, 4);
        model.config.purpose = "round trip";
        model.config.declared_at = "2026-01-15";
        const std::string a = serialize_snapshot(model);
        Model loaded = deserialize_snapshot(a);
        const std::string b = serialize_snapshot(loaded);
        CHECK(a == b);

        const WeightView wa = model.weights();
        const WeightView wb = loaded.weights();
        CHECK(std::memcmp(wa.ff.data(), wb.ff.data(), wa.ff.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("snapshot preserves recurrent and reconstruction traces") {
    Model model(testing::fruit_config(true));
    oracle::SyntheticGenerator gen(oracle::GenerativeSpec::fruit(0.1), 3);
    testing::train_from_generator(model, gen, 500);
    const std::string bytes = serialize_snapshot(model);
    Model loaded = deserialize_snapshot(bytes);
    CHECK(loaded.traces.rec_joint == model.traces.rec_joint);
    CHECK(loaded.traces.inprc_joint == model.traces.inprc_joint);
    CHECK(loaded.traces.update_count == model.traces.update_count);
    CHECK(loaded.config.recurrence);
}

TEST_CASE("snapshot rejects corrupted bytes") {
    Model model(NetworkConfig::make({2}, {2}));
    std::string bytes = serialize_snapshot(model);
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK_THROWS_AS(deserialize_snapshot(bytes), DataError);
    }
    SUBCASE("truncation") {
        bytes.resize(bytes.size() / 2);
        CHECK_THROWS_AS(deserialize_snapshot(bytes), DataError);
    }
    SUBCASE("trailing garbage") {
        bytes += "zz";
        CHECK_THROWS_AS(deserialize_snapshot(bytes), DataError);
    }
}

TEST_CASE("dataset parsing") {
    const NetworkConfig cfg = testing::fruit_config();
    SUBCASE("happy path with labels, shuffled columns") {
        const std::string text =
            "Size,Colour,Shape,Fruit\n"
            "small,red,round,apple\n"
            "medium,yellow,long,banana\n";
        const LabeledDataset data = parse_dataset(text, cfg);
        REQUIRE(data.size() == 2);
        CHECK(data.rows[0] == std::vector<int>{0, 0, 0});
        CHECK(data.rows[1] == std::vector<int>{1, 1, 1});
        CHECK(data.labels == std::vector<int>{0, 1});
    }
    SUBCASE("unlabeled data and integer states") {
        const std::string text = "Colour,Shape,Size\n2,0,1\n";
        const LabeledDataset data = parse_dataset(text, cfg);
        CHECK_FALSE(data.has_labels());
        CHECK(data.rows[0] == std::vector<int>{2, 0, 1});
    }
    SUBCASE("missing column names the unmatched attribute") {
        const std::string text = "Colour,Size\nred,small\n";
        CHECK_THROWS_WITH_AS(parse_dataset(text, cfg),
                             doctest::Contains("missing attribute column 'Shape'"), DataError);
    }
    SUBCASE("unknown columns are named") {
        const std::string text = "Colour,Shape,Size,Weight\nred,round,small,3\n";
        CHECK_THROWS_WITH_AS(parse_dataset(text, cfg), doctest::Contains("unknown column 'Weight'"),
                             DataError);
    }
    SUBCASE("unknown state values are diagnosed with row and column") {
        const std::string text = "Colour,Shape,Size\nred,square,small\n";
        CHECK_THROWS_WITH_AS(parse_dataset(text, cfg), doctest::Contains("column 'Shape'"),
                             DataError);
    }
    SUBCASE("format round-trip") {
        LabeledDataset data;
        data.rows = {{0, 1, 2}, {2, 0, 1}};
        data.labels = {3, 1};
        const std::string text = format_dataset(data, cfg);
        const LabeledDataset back = parse_dataset(text, cfg);
        CHECK(back.rows == data.rows);
        CHECK(back.labels == data.labels);
    }
}

TEST_CASE("report writer formatting") {
    SUBCASE("stable bytes and digest line") {
        ReportWriter a("explanation");
        a.section("p15");
        a.kv("margin", 0.5);
        ReportWriter b("explanation");
        b.section("p15");
        b.kv("margin", 0.5);
        const std::string ra = a.finish(), rb = b.finish();
        CHECK(ra == rb);
        CHECK(ra.find("bcpnn-report v1\n") == 0);
        CHECK(ra.find("digest: ") != std::string::npos);
    }
    SUBCASE("value formatting") {
        CHECK(format_value(0.4) == "0.400000");
        CHECK(format_value(-0.0) == "0.000000");
        CHECK(format_value(-1e-12) == "0.000000");
        CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
        CHECK(format_value(-std::numeric_limits<double>::infinity()) == "-inf");
    }
}

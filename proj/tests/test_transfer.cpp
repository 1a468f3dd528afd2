#include <catch2/catch_amalgamated.hpp>

#include "mtga/transfer.hpp"

using namespace mtga;
using transfer::BiasEstimate;
using transfer::GeneMatching;

namespace {

core::Population pop_from_genes(const std::vector<std::vector<double>>& genes) {
    core::Population pop;
    pop.capacity = genes.size();
    double f = 0.0;
    for (const auto& g : genes) {
        core::Chromosome c;
        c.genes = g;
        c.fitness = f++;  // already best-to-worst
        pop.members.push_back(c);
    }
    return pop;
}

GeneMatching identity_matching(std::size_t d) {
    std::vector<std::size_t> table(d);
    for (std::size_t i = 0; i < d; ++i) table[i] = i;
    return transfer::fixed_matching(std::move(table), d, d);
}

}  // namespace

TEST_CASE("top_mean of identical chromosomes is that chromosome") {
    const auto pop = pop_from_genes({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
    const auto m = transfer::top_mean(pop, 3);
    CHECK(m[0] == Catch::Approx(0.3).margin(1e-15));
    CHECK(m[1] == Catch::Approx(0.7).margin(1e-15));
}

TEST_CASE("top_mean hand example: first two of the sorted members") {
    const auto pop = pop_from_genes({{1.0, 2.0}, {3.0, 4.0}, {9.0, 9.0}});
    const auto m = transfer::top_mean(pop, 2);
    CHECK(m[0] == 2.0);
    CHECK(m[1] == 3.0);
}

TEST_CASE("top_mean over the fittest four of ten") {
    std::vector<std::vector<double>> genes;
    for (int i = 0; i < 10; ++i) genes.push_back({0.1 * i});
    const auto pop = pop_from_genes(genes);
    const auto m = transfer::top_mean(pop, 4);
    CHECK(m[0] == Catch::Approx((0.0 + 0.1 + 0.2 + 0.3) / 4.0).margin(1e-15));
}

TEST_CASE("top_mean validates n_t") {
    const auto pop = pop_from_genes({{0.1}, {0.2}});
    CHECK_THROWS_AS(transfer::top_mean(pop, 3), core::ConfigError);
    CHECK_THROWS_AS(transfer::top_mean(pop, 0), core::ConfigError);
}

TEST_CASE("top_mean marks categorical positions with NaN") {
    const auto pop = pop_from_genes({{0.2, 1.0}, {0.4, 0.0}});
    const std::vector<core::GeneKind> kinds{core::GeneKind::numeric, core::GeneKind::categorical};
    const auto m = transfer::top_mean(pop, 2, kinds);
    CHECK(m[0] == Catch::Approx(0.3).margin(1e-15));
    CHECK(std::isnan(m[1]));
}

TEST_CASE("random matching samples without replacement when the donor is larger") {
    core::RngStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = transfer::build_matching(5, 3, rng);
        REQUIRE(m.index_map.size() == 3);
        std::vector<bool> seen(5, false);
        for (auto i : m.index_map) {
            REQUIRE(i < 5);
            REQUIRE(!seen[i]);
            seen[i] = true;
        }
    }
}

TEST_CASE("random matching samples with replacement when the donor is smaller") {
    core::RngStream rng(12);
    const auto m = transfer::build_matching(2, 4, rng);
    REQUIRE(m.index_map.size() == 4);
    for (auto i : m.index_map) REQUIRE(i < 2);
    // four entries over two donor positions: duplicates are forced
    bool dup = false;
    for (std::size_t i = 0; i < 4 && !dup; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) dup = dup || m.index_map[i] == m.index_map[j];
    CHECK(dup);
}

TEST_CASE("fixed identity matching maps every position to itself") {
    const auto m = identity_matching(6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(m.index_map[i] == i);
}

TEST_CASE("fixed matching validates the table") {
    CHECK_THROWS_AS(transfer::fixed_matching({0, 1}, 2, 3), core::ConfigError);
    CHECK_THROWS_AS(transfer::fixed_matching({0, 5}, 2, 2), core::ConfigError);
}

TEST_CASE("transfer with zero bias and identity matching is the identity") {
    core::Chromosome src;
    src.genes = {0.2, 0.8, 0.5};
    BiasEstimate bias{{0.4, 0.4, 0.4}, {0.4, 0.4, 0.4}, 2};
    const auto out = transfer::transfer_chromosome(src, bias, identity_matching(3));
    CHECK(out.genes == src.genes);
    CHECK(!out.evaluated());
}

TEST_CASE("transfer 1-D worked example") {
    core::Chromosome src;
    src.genes = {0.75};
    BiasEstimate bias{{0.7}, {0.3}, 1};
    const auto out = transfer::transfer_chromosome(src, bias, identity_matching(1));
    CHECK(out.genes[0] == Catch::Approx(0.35).margin(1e-12));
}

TEST_CASE("transferring the source mean lands on the target mean") {
    core::Chromosome src;
    src.genes = {0.6, 0.1};
    BiasEstimate bias{{0.6, 0.1}, {0.25, 0.9}, 1};
    const auto out = transfer::transfer_chromosome(src, bias, identity_matching(2));
    CHECK(out.genes[0] == Catch::Approx(0.25).margin(1e-15));
    CHECK(out.genes[1] == Catch::Approx(0.9).margin(1e-15));
}

TEST_CASE("categorical positions are copied without bias correction") {
    core::Chromosome src;
    src.genes = {0.75, 1.0};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    BiasEstimate bias{{0.7, nan}, {0.3, nan}, 1};
    const auto out = transfer::transfer_chromosome(src, bias, identity_matching(2));
    CHECK(out.genes[0] == Catch::Approx(0.35).margin(1e-12));
    CHECK(out.genes[1] == 1.0);
}

TEST_CASE("transfer is shift-equivariant before clamping") {
    core::RngStream rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 4;
        core::Chromosome src, shifted;
        BiasEstimate bias, bias_shifted;
        const double delta = rng.uniform(-0.5, 0.5);
        for (std::size_t i = 0; i < d; ++i) {
            const double g = rng.uniform();
            const double ms = rng.uniform();
            const double mt = rng.uniform();
            src.genes.push_back(g);
            shifted.genes.push_back(g + delta);
            bias.mean_source.push_back(ms);
            bias.mean_target.push_back(mt);
            bias_shifted.mean_source.push_back(ms + delta);
            bias_shifted.mean_target.push_back(mt);
        }
        const auto m = identity_matching(d);
        const auto a = transfer::transfer_chromosome_raw(src, bias, m);
        const auto b = transfer::transfer_chromosome_raw(shifted, bias_shifted, m);
        for (std::size_t i = 0; i < d; ++i)
            REQUIRE(std::fabs(a.genes[i] - b.genes[i]) < 1e-12);
    }
}

TEST_CASE("unmatched positions take the native chromosome's value") {
    core::Chromosome src;
    src.genes = {0.9};
    BiasEstimate bias{{0.5}, {0.5, 0.5}, 1};
    const auto m = transfer::fixed_matching({0, GeneMatching::unmatched}, 1, 2);
    const std::vector<double> native{0.1, 0.2};
    const auto out = transfer::transfer_chromosome(src, bias, m, native);
    CHECK(out.genes[0] == Catch::Approx(0.9).margin(1e-12));
    CHECK(out.genes[1] == 0.2);
    CHECK_THROWS_AS(transfer::transfer_chromosome(src, bias, m), core::InternalError);
}

TEST_CASE("build_transfer_population composes transferred and native members") {
    std::vector<std::vector<double>> tg, dg;
    for (int i = 0; i < 6; ++i) {
        tg.push_back({0.1 + 0.1 * i, 0.2});
        dg.push_back({0.9 - 0.1 * i, 0.8});
    }
    auto target = pop_from_genes(tg);
    auto donor = pop_from_genes(dg);
    BiasEstimate bias{transfer::top_mean(donor, 2), transfer::top_mean(target, 2), 2};
    transfer::MatchingSpec spec;  // random
    core::RngStream rng(5);

    SECTION("n_t = 0 reproduces the target population") {
        const auto pt = transfer::build_transfer_population(target, donor, bias, 0, spec, rng);
        REQUIRE(pt.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) CHECK(pt.members[i].genes == target.members[i].genes);
    }
    SECTION("n_t = N transfers everything, fitness unset") {
        const auto pt = transfer::build_transfer_population(target, donor, bias, 6, spec, rng);
        REQUIRE(pt.size() == 6);
        for (const auto& c : pt.members) CHECK(!c.evaluated());
    }
    SECTION("interior n_t splits transferred head and native tail") {
        const auto pt = transfer::build_transfer_population(target, donor, bias, 2, spec, rng);
        REQUIRE(pt.size() == 6);
        CHECK(!pt.members[0].evaluated());
        CHECK(!pt.members[1].evaluated());
        for (std::size_t i = 2; i < 6; ++i)
            CHECK(pt.members[i].genes == target.members[i - 2].genes);
    }
    SECTION("n_t above the population size is rejected") {
        CHECK_THROWS_AS(transfer::build_transfer_population(target, donor, bias, 7, spec, rng),
                        core::ConfigError);
    }
}

TEST_CASE("transfer between identical converged populations is a no-op") {
    std::vector<std::vector<double>> genes(4, {0.42, 0.17, 0.8});
    auto a = pop_from_genes(genes);
    auto b = pop_from_genes(genes);
    BiasEstimate bias{transfer::top_mean(b, 4), transfer::top_mean(a, 4), 4};
    core::RngStream rng(3);
    transfer::MatchingSpec spec;
    const auto pt = transfer::build_transfer_population(a, b, bias, 4, spec, rng);
    for (const auto& c : pt.members) {
        // all donor members identical, so any matching permutes equal values
        std::vector<double> sorted_got = c.genes, sorted_want = genes[0];
        std::sort(sorted_got.begin(), sorted_got.end());
        std::sort(sorted_want.begin(), sorted_want.end());
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(sorted_got[i] == Catch::Approx(sorted_want[i]).margin(1e-12));
    }
}

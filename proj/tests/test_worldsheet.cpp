#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "worldline/worldsheet.hpp"

using namespace worldline;

TEST_CASE("minkowski dot uses signature (+,-,-,-)") {
    const FourVector timelike{1.0, 0.0, 0.0, 0.0};
    const FourVector spacelike{0.0, 1.0, 0.0, 0.0};
    CHECK(minkowski_dot(timelike, timelike) == 1.0);
    CHECK(minkowski_dot(spacelike, spacelike) == -1.0);
    CHECK(minkowski_dot(timelike, spacelike) == 0.0);
    const FourVector null{1.0, 1.0, 0.0, 0.0};
    CHECK(minkowski_dot(null, null) == 0.0);
}

TEST_CASE("static string preset") {
    const auto ws = Worldsheet::static_string(3.0, 2.0);
    CHECK_FALSE(ws.is_grid());
    CHECK(ws.domain().tau_max == 2.0);
    CHECK(ws.domain().sigma_max == 3.0);
    const auto X = ws.at(1.5, 2.5);
    CHECK(X[0] == 1.5);
    CHECK(X[1] == 2.5);
    FourVector dtau, dsigma;
    ws.tangents_at(0.7, 1.1, dtau, dsigma);
    CHECK(dtau == FourVector{1.0, 0.0, 0.0, 0.0});
    CHECK(dsigma == FourVector{0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(Worldsheet::static_string(0.0, 1.0), InputError);
    CHECK_THROWS_AS(Worldsheet::static_string(1.0, -2.0), InputError);
}

TEST_CASE("finite-difference tangents track exact ones") {
    // Curved embedding with known tangents, no TangentFn supplied.
    const auto ws = Worldsheet::analytic(
        [](double tau, double sigma) {
            return FourVector{tau, std::sin(sigma), std::cos(sigma) * 0.1 * tau, 0.0};
        },
        ParamRect{0.0, 2.0, 0.0, 3.0});
    for (double tau : {0.0, 0.5, 2.0}) {
        for (double sigma : {0.0, 1.3, 3.0}) {
            FourVector dtau, dsigma;
            ws.tangents_at(tau, sigma, dtau, dsigma);
            CHECK_THAT(dtau[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
            CHECK_THAT(dtau[2], Catch::Matchers::WithinAbs(0.1 * std::cos(sigma), 1e-9));
            CHECK_THAT(dsigma[1], Catch::Matchers::WithinAbs(std::cos(sigma), 1e-9));
            CHECK_THAT(dsigma[2],
                       Catch::Matchers::WithinAbs(-0.1 * tau * std::sin(sigma), 1e-9));
        }
    }
}

TEST_CASE("grid constructor validation") {
    std::vector<FourVector> nodes(9, FourVector{0, 0, 0, 0});
    CHECK_THROWS_AS(Worldsheet::from_grid({0, 1}, {0, 1, 2}, nodes), InputError);
    CHECK_THROWS_AS(Worldsheet::from_grid({0, 1, 2}, {0, 1, 2},
                                          std::vector<FourVector>(8)),
                    InputError);
    CHECK_THROWS_AS(Worldsheet::from_grid({0, 2, 1}, {0, 1, 2}, nodes), InputError);
    const auto ws = Worldsheet::from_grid({0, 1, 2}, {0, 1, 2}, nodes);
    CHECK(ws.is_grid());
    CHECK(ws.grid_taus().size() == 3);
}

TEST_CASE("worldsheet grid csv") {
    std::ostringstream csv;
    csv << "tau,sigma,x0,x1,x2,x3\n";
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 3; ++j)
            csv << i << ',' << j << ',' << i << ',' << j << ",0,0\n";
    std::istringstream in(csv.str());
    const auto ws = read_worldsheet_csv(in);
    REQUIRE(ws.is_grid());
    CHECK(ws.grid_taus() == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(ws.grid_sigmas() == std::vector<double>{0.0, 1.0, 2.0, 3.0});
    CHECK(ws.grid_node(1, 2) == FourVector{1.0, 2.0, 0.0, 0.0});

    auto reject = [](const std::string& text) {
        std::istringstream bad(text);
        CHECK_THROWS_AS(read_worldsheet_csv(bad), InputError);
    };
    reject("");
    reject("tau,sigma,x0,x1\n0,0,0,0\n");
    reject("tau,sigma,x0,x1,x2,x3\n0,0,0,0,0\n");  // five fields in a row
    // tensor structure broken: second block changes sigma values
    reject(
        "tau,sigma,x0,x1,x2,x3\n"
        "0,0,0,0,0,0\n0,1,0,1,0,0\n0,2,0,2,0,0\n"
        "1,0,1,0,0,0\n1,1.5,1,1,0,0\n1,2,1,2,0,0\n"
        "2,0,2,0,0,0\n2,1,2,1,0,0\n2,2,2,2,0,0\n");
    // incomplete final block
    reject(
        "tau,sigma,x0,x1,x2,x3\n"
        "0,0,0,0,0,0\n0,1,0,1,0,0\n0,2,0,2,0,0\n"
        "1,0,1,0,0,0\n1,1,1,1,0,0\n");
}

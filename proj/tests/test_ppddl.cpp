#include "doctest.h"

#include <string>

#include "dpa/ppddl.hpp"

using namespace dpa;

namespace {

const std::string kCanonicalDomain =
    "(define (domain treasure)\n"
    "    (:requirements :strips :probabilistic-effects :rewards)\n"
    "\n"
    "    (:predicates\n"
    "        (notfailed)\n"
    "        (symbol_0)\n"
    "        (symbol_1)\n"
    "        (symbol_2)\n"
    "    )\n"
    "\n"
    "    (:action option-0-partition-0-0\n"
    "        :parameters ()\n"
    "        :precondition (and (notfailed) (symbol_0))\n"
    "        :effect (and (symbol_1) (not (symbol_0)) (decrease (reward) 36.00))\n"
    "    )\n"
    "\n"
    "    (:action option-1-partition-0-1\n"
    "        :parameters ()\n"
    "        :precondition (and (notfailed) (symbol_1))\n"
    "        :effect (probabilistic\n"
    "            0.75 (and (symbol_2) (not (symbol_1)) (decrease (reward) 12.00))\n"
    "            0.25 (and (symbol_0) (not (symbol_1)) (decrease (reward) 20.00)))\n"
    "    )\n"
    ")\n";

const std::string kCanonicalProblem =
    "(define (problem treasure-goal)\n"
    "    (:domain treasure)\n"
    "\n"
    "    (:init (notfailed) (symbol_0))\n"
    "\n"
    "    (:goal (and (notfailed) (symbol_2)))\n"
    ")\n";

}  // namespace

TEST_CASE("canonical domain text survives parse/emit byte for byte") {
    PpddlDomain d = parse_ppddl_domain(kCanonicalDomain);
    CHECK(d.name == "treasure");
    CHECK(d.predicates.size() == 4);
    REQUIRE(d.operators.size() == 2);
    CHECK(d.operators[0].outcomes.size() == 1);
    CHECK(d.operators[0].outcomes[0].cost == doctest::Approx(36.0));
    REQUIRE(d.operators[1].outcomes.size() == 2);
    CHECK(d.operators[1].outcomes[0].probability == doctest::Approx(0.75));
    CHECK(emit_ppddl(d) == kCanonicalDomain);
}

TEST_CASE("canonical problem text survives parse/emit byte for byte") {
    PpddlDomain d = parse_ppddl_domain(kCanonicalDomain);
    PpddlProblem p = parse_ppddl_problem(kCanonicalProblem, d);
    CHECK(p.name == "treasure-goal");
    CHECK(p.init == std::vector<std::string>{"notfailed", "symbol_0"});
    CHECK(p.goal == std::vector<std::string>{"notfailed", "symbol_2"});
    CHECK(emit_ppddl(p) == kCanonicalProblem);
}

TEST_CASE("emission is stable under a second round trip") {
    PpddlDomain d = parse_ppddl_domain(kCanonicalDomain);
    std::string once = emit_ppddl(d);
    std::string twice = emit_ppddl(parse_ppddl_domain(once));
    CHECK(once == twice);
}

TEST_CASE("predicates are ordered notfailed first then numerically") {
    PpddlDomain d;
    d.name = "t";
    d.predicates = {"symbol_10", "symbol_2", "notfailed", "symbol_0"};
    auto sorted = sorted_predicates(d.predicates);
    CHECK(sorted == std::vector<std::string>{"notfailed", "symbol_0", "symbol_2", "symbol_10"});
}

TEST_CASE("sub-unit probability mass becomes an implicit no-op outcome") {
    std::string text =
        "(define (domain t)\n"
        "    (:requirements :strips :probabilistic-effects :rewards)\n"
        "    (:predicates (notfailed) (symbol_0) (symbol_1))\n"
        "    (:action op-a\n"
        "        :parameters ()\n"
        "        :precondition (and (notfailed) (symbol_0))\n"
        "        :effect (probabilistic 0.6 (and (symbol_1) (decrease (reward) 5.00)))\n"
        "    )\n"
        ")\n";
    PpddlDomain d = parse_ppddl_domain(text);
    REQUIRE(d.operators.size() == 1);
    REQUIRE(d.operators[0].outcomes.size() == 2);
    CHECK(d.operators[0].outcomes[1].probability == doctest::Approx(0.4));
    CHECK(d.operators[0].outcomes[1].add.empty());
    CHECK(d.operators[0].outcomes[1].del.empty());
    // the no-op stays implicit when the domain is written back out
    std::string emitted = emit_ppddl(d);
    CHECK(emitted.find("0.6") != std::string::npos);
    CHECK(emitted.find("0.4") == std::string::npos);
    CHECK(emit_ppddl(parse_ppddl_domain(emitted)) == emitted);
}

TEST_CASE("parse errors carry a usable reason") {
    auto domain_with = [](const std::string& body) {
        return "(define (domain t)\n(:requirements :strips)\n(:predicates (notfailed) (symbol_0))\n" +
               body + ")\n";
    };
    CHECK_THROWS_WITH_AS(
        parse_ppddl_domain("(define (domain t) (:requirements :adl))"),
        doctest::Contains(":adl"), PpddlParseError);
    CHECK_THROWS_WITH_AS(
        parse_ppddl_domain(domain_with("(:action a :parameters () "
                                       ":precondition (and (ghost)) "
                                       ":effect (and (symbol_0) (decrease (reward) 1.00)))")),
        doctest::Contains("ghost"), PpddlParseError);
    CHECK_THROWS_AS(
        parse_ppddl_domain(domain_with("(:action a :parameters () "
                                       ":precondition (and (notfailed)) "
                                       ":effect (probabilistic 0.8 (and (symbol_0) (decrease (reward) 1.00)) "
                                       "0.7 (and (notfailed) (decrease (reward) 1.00))))")),
        PpddlParseError);
    CHECK_THROWS_AS(parse_ppddl_domain("(define (domain t) (:predicates (p))"), PpddlParseError);

    PpddlDomain d = parse_ppddl_domain(kCanonicalDomain);
    CHECK_THROWS_AS(parse_ppddl_problem(
                        "(define (problem p) (:domain treasure) (:init (notfailed)) "
                        "(:goal (and)))",
                        d),
                    PpddlParseError);
    CHECK_THROWS_AS(parse_ppddl_problem(
                        "(define (problem p) (:domain treasure) (:init (ghost)) "
                        "(:goal (and (symbol_0))))",
                        d),
                    PpddlParseError);
    CHECK_THROWS_AS(parse_ppddl_problem(
                        "(define (problem p) (:domain other) (:init (notfailed)) "
                        "(:goal (and (symbol_0))))",
                        d),
                    PpddlParseError);
}

TEST_CASE("comments and loose whitespace are tolerated on input") {
    std::string text =
        "; machine generated\n"
        "(define (domain t) ; name\n"
        "  (:requirements :strips)\n"
        "  (:predicates (notfailed)(symbol_0))\n"
        "  (:action a :parameters () :precondition (and (notfailed))\n"
        "   :effect (and (symbol_0) (decrease (reward) 2.50))))\n";
    PpddlDomain d = parse_ppddl_domain(text);
    CHECK(d.operators.size() == 1);
    CHECK(d.operators[0].outcomes[0].cost == doctest::Approx(2.5));
}

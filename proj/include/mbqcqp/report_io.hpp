#pragma once

#include <string>

#include "mbqcqp/bounds.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rounding.hpp"

namespace mbqcqp {

// JSON documents written by the CLI. Matrices and vectors use the instance
// file convention (numbers for real data, [re, im] pairs for complex).
std::string solution_json(const Instance& inst, const RelaxationSolution& sol);
std::string outcome_json(const Instance& inst, const RelaxationSolution& relax, const RoundingOutcome& out);
std::string bound_json(const BoundReport& b);
std::string oracle_json(const Instance& inst, const OracleResult& r);

std::string bound_table(const BoundReport& b);

void write_text(const std::string& path, const std::string& text);

}  // namespace mbqcqp

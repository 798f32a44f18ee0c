#pragma once

#include <string>
#include <vector>

struct SelftestLine {
    std::string name;
    double value = 0.0;  // residual or error measure
    bool passed = false;
};

std::vector<SelftestLine> run_selftest(double tolerance);

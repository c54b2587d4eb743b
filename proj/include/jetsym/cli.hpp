#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "jetsym/invariance.hpp"

namespace jetsym::cli {

struct ReportItem {
    std::string id;
    std::string section;
    bool pass = false;
    std::string detail;
};

struct Report {
    std::string command;
    std::vector<ReportItem> items;
    double timing_ms = 0;

    bool pass() const;
    void add(std::string section, std::string id, bool pass, std::string detail);
    /// One item per generator (or per check id prefix before ':').
    void add_grouped(const std::string &section, const std::string &prefix, const CheckReport &r);
};

/// Full regression matrix; `only` filters by section id prefix.
Report reproduce(const std::string &only, int jobs);

/// Entry point behind the jetsym executable. Exit codes: 0 all checks pass,
/// 1 a check failed, 2 usage, parse or build error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace jetsym::cli

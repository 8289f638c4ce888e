#pragma once

#include "kinreg/checks.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace kinreg {

// A CSV artifact: `name` is the file stem, columns are written in the given order.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

// Shortest decimal that reads back to the same double.
std::string num(double x);
std::string num(long long x);
inline std::string num(int x) { return num(static_cast<long long>(x)); }

std::string to_csv(const Table& t);
void write_text(const std::filesystem::path& path, const std::string& text);

struct Verdict {
    std::string check;
    std::string status = "inconclusive";  // pass | fail | inconclusive
    double measured = 0;
    double limit = 0;
    bool advisory = false;
    std::string note;

    bool fails_run() const { return status == "fail" && !advisory; }
};

// pass iff measured is finite and <= limit.
Verdict verdict_at_most(const std::string& check, double measured, double limit, const std::string& note = "",
                        bool advisory = false);
// measured is ci_high for exponent checks and max/median otherwise.
Verdict verdict_from(const ModulusReport& rep);
Verdict verdict_from(const std::string& check, const CheckTable& t);

Table verdict_table(const std::vector<Verdict>& v);
Table modulus_table(const ModulusReport& rep);
Table check_table(const std::string& name, const CheckTable& t);

struct Phase {
    std::string name;
    double seconds = 0;
};

struct RunSummary {
    std::string command;
    std::string config_text;
    unsigned seed = 0;
    std::vector<Phase> timings;
    nlohmann::ordered_json convergence = nlohmann::ordered_json::object();
    std::vector<Verdict> verdicts;
    std::vector<std::string> artifacts;

    // Throws ArgumentError if the check is already registered.
    void add(const Verdict& v);
    bool failed() const;
};

nlohmann::ordered_json to_json(const RunSummary& s);

}  // namespace kinreg

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace kinreg {

// One evaluated inequality or identity.
struct CheckRow {
    std::string check;
    int sample_id = 0;
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;
    bool pass = true;
    bool advisory = false;  // reported, not counted as a violation
};

struct CheckTable {
    std::vector<CheckRow> rows;
    int skipped = 0;
    std::string note;

    void add(const std::string& check, int id, double lhs, double rhs, bool pass, bool advisory = false) {
        rows.push_back({check, id, lhs, rhs, rhs != 0 ? lhs / rhs : 0.0, pass, advisory});
    }
    int violations() const {
        return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass && !r.advisory; }));
    }
    int evaluated(const std::string& check = "") const {
        return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const CheckRow& r) {
            return check.empty() || r.check == check;
        }));
    }
    bool all_pass() const { return violations() == 0; }
    double max_ratio(const std::string& check = "") const {
        double m = 0;
        for (const auto& r : rows)
            if (check.empty() || r.check == check) m = std::max(m, r.ratio);
        return m;
    }
    void append(const CheckTable& other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
        skipped += other.skipped;
    }
};

// A sweep of measured quantities against a modulus or blow-up expression.
struct ModulusSample {
    double x = 0;         // separation or boundary distance
    double measured = 0;  // difference or derivative
    double bound = 0;     // value of the modulus expression
    double ratio = 0;     // measured / bound
};

struct ModulusReport {
    std::string check_name;
    std::vector<ModulusSample> samples;
    double fitted_constant = 0;
    double fitted_exponent = 0;
    double ci_low = 0, ci_high = 0;  // 95% interval of the exponent
    std::string status = "inconclusive";  // pass | fail | inconclusive
    std::string note;
    bool advisory = false;  // reported, never fails a run
    bool exponent_check = false;  // judged on ci_high <= limit, else max/median <= limit
    double limit = 0;

    bool pass() const { return status == "pass"; }
    double max_ratio() const {
        double m = 0;
        for (const auto& s : samples) m = std::max(m, s.ratio);
        return m;
    }
    double median_ratio() const {
        std::vector<double> r;
        for (const auto& s : samples) r.push_back(s.ratio);
        if (r.empty()) return 0;
        std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
        return r[r.size() / 2];
    }
};

}  // namespace kinreg

#include "kinreg/report.hpp"

#include "kinreg/core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kinreg {

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw ArgumentError("table " + name + ": row width does not match the header");
    rows.push_back(std::move(row));
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string num(long long x) { return std::to_string(x); }

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double json_number(double x) { return std::isfinite(x) ? x : 0.0; }

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += '\n';
    };
    line(t.columns);
    for (const auto& r : t.rows) line(r);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

Verdict verdict_at_most(const std::string& check, double measured, double limit, const std::string& note,
                        bool advisory) {
    Verdict v{check, "fail", measured, limit, advisory, note};
    if (std::isfinite(measured) && measured <= limit) v.status = "pass";
    return v;
}

Verdict verdict_from(const ModulusReport& rep) {
    Verdict v;
    v.check = rep.check_name;
    v.status = rep.status;
    v.limit = rep.limit;
    v.measured = rep.exponent_check ? rep.ci_high : (rep.median_ratio() > 0 ? rep.max_ratio() / rep.median_ratio() : 0.0);
    v.advisory = rep.advisory;
    std::ostringstream os;
    os << (rep.exponent_check ? "exponent upper 95% bound" : "max/median ratio") << "; fitted exponent "
       << rep.fitted_exponent << " [" << rep.ci_low << ", " << rep.ci_high << "], " << rep.samples.size()
       << " samples";
    if (!rep.note.empty()) os << "; " << rep.note;
    v.note = os.str();
    while (!v.note.empty() && (v.note.back() == ' ' || v.note.back() == ';')) v.note.pop_back();
    return v;
}

Verdict verdict_from(const std::string& check, const CheckTable& t) {
    Verdict v;
    v.check = check;
    v.measured = t.violations();
    v.limit = 0;
    v.status = t.evaluated() == 0 ? "inconclusive" : (t.all_pass() ? "pass" : "fail");
    v.note = std::to_string(t.evaluated()) + " rows, " + std::to_string(t.violations()) + " violations, " +
             std::to_string(t.skipped) + " skipped";
    if (!t.note.empty()) v.note += "; " + t.note;
    return v;
}

Table verdict_table(const std::vector<Verdict>& vs) {
    Table t{"verdicts", {"check", "status", "measured", "limit", "advisory", "note"}, {}};
    for (const auto& v : vs) t.add_row({v.check, v.status, num(v.measured), num(v.limit), v.advisory ? "1" : "0", v.note});
    return t;
}

Table modulus_table(const ModulusReport& rep) {
    Table t{rep.check_name, {"x", "measured", "bound", "ratio"}, {}};
    for (const auto& s : rep.samples) t.add_row({num(s.x), num(s.measured), num(s.bound), num(s.ratio)});
    return t;
}

Table check_table(const std::string& name, const CheckTable& ct) {
    Table t{name, {"check", "sample_id", "lhs", "rhs", "ratio", "pass", "advisory"}, {}};
    for (const auto& r : ct.rows)
        t.add_row({r.check, num(r.sample_id), num(r.lhs), num(r.rhs), num(r.ratio), r.pass ? "1" : "0",
                   r.advisory ? "1" : "0"});
    return t;
}

void RunSummary::add(const Verdict& v) {
    for (const auto& w : verdicts)
        if (w.check == v.check) throw ArgumentError("check registered twice: " + v.check);
    verdicts.push_back(v);
}

bool RunSummary::failed() const {
    for (const auto& v : verdicts)
        if (v.fails_run()) return true;
    return false;
}

nlohmann::ordered_json to_json(const RunSummary& s) {
    using json = nlohmann::ordered_json;
    json config = json::object();
    {
        std::istringstream in(s.config_text);
        std::string line, section;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line.front() == '[') {
                section = line.substr(1, line.size() - 2);
                config[section] = json::object();
                continue;
            }
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) config[section][line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    json timings = json::object();
    for (const auto& p : s.timings) timings[p.name] = p.seconds;
    json verdicts = json::array();
    int n_pass = 0, n_fail = 0, n_inconclusive = 0;
    for (const auto& v : s.verdicts) {
        verdicts.push_back(json{{"check", v.check},
                                {"status", v.status},
                                {"measured", json_number(v.measured)},
                                {"limit", json_number(v.limit)},
                                {"advisory", v.advisory},
                                {"note", v.note}});
        if (v.status == "pass") ++n_pass;
        else if (v.status == "fail") ++n_fail;
        else ++n_inconclusive;
    }
    return json{{"command", s.command},
                {"seed", s.seed},
                {"config", config},
                {"timings_s", timings},
                {"convergence", s.convergence},
                {"verdicts", verdicts},
                {"counts", json{{"pass", n_pass}, {"fail", n_fail}, {"inconclusive", n_inconclusive}}},
                {"failed", s.failed()},
                {"artifacts", s.artifacts}};
}

}  // namespace kinreg

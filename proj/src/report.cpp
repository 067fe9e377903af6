#include "neumann/report.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace neumann {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_point(Vec x, int dim) {
    if (dim == 1) return format_num(x.x);
    return format_num(x.x) + ";" + format_num(x.y);
}

void write_report_csv(std::ostream& os, const std::vector<InequalityReport>& rows, int dim) {
    os << "statement,model,f,x,t,lhs,rhs,se,margin,verdict\n";
    for (const auto& r : rows) {
        os << r.statement << ',' << r.model << ',' << r.f << ',' << format_point(r.x, dim) << ','
           << format_num(r.t) << ',' << format_num(r.lhs) << ',' << format_num(r.rhs) << ','
           << format_num(r.se) << ',' << format_num(r.margin) << ',' << to_string(r.verdict)
           << '\n';
    }
}

void write_report_json(std::ostream& os, const std::vector<InequalityReport>& rows,
                       const std::vector<IIEstimate>& ii, int dim, std::uint64_t base_seed) {
    nlohmann::ordered_json j;
    j["base_seed"] = base_seed;
    int n_pass = 0, n_fail = 0, n_inconclusive = 0;
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        switch (r.verdict) {
            case Verdict::Pass: ++n_pass; break;
            case Verdict::Fail: ++n_fail; break;
            case Verdict::Inconclusive: ++n_inconclusive; break;
        }
        nlohmann::ordered_json row;
        row["statement"] = r.statement;
        row["model"] = r.model;
        row["f"] = r.f;
        row["x"] = format_point(r.x, dim);
        row["t"] = r.t;
        row["lhs"] = r.lhs;
        row["rhs"] = r.rhs;
        row["slack"]["se"] = r.se;
        row["slack"]["margin_dt"] = r.margin_dt;
        row["slack"]["margin_h"] = r.margin_h;
        row["slack"]["budget"] = 3.0 * r.se + r.margin;
        row["verdict"] = to_string(r.verdict);
        jr.push_back(std::move(row));
    }
    j["tally"]["pass"] = n_pass;
    j["tally"]["fail"] = n_fail;
    j["tally"]["inconclusive"] = n_inconclusive;
    j["rows"] = std::move(jr);
    if (!ii.empty()) {
        nlohmann::ordered_json ji = nlohmann::ordered_json::array();
        for (const auto& e : ii) {
            nlohmann::ordered_json row;
            row["x"] = format_point(e.x, dim);
            row["v"] = format_point(e.v, dim);
            row["p"] = e.p;
            row["t_list"] = e.t_list;
            row["raw"] = e.raw;
            row["value"] = e.value;
            row["slope"] = e.slope;
            row["residual"] = e.residual;
            ji.push_back(std::move(row));
        }
        j["second_fundamental_form"] = std::move(ji);
    }
    os << j.dump(2) << '\n';
}

}  // namespace neumann

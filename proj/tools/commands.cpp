#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include "hurwitz/errors.hpp"

namespace hurwitz::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.kind() == ErrorKind::OnBoundary) return kBoundary;
        if (e.kind() == ErrorKind::InvalidInput) return kParseError;
        return kFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailed;
    }
}

std::string fmt(double x, int digits = 12) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string fmt_complex(const Json& z) {
    const double re = z[0].get<double>(), im = z[1].get<double>();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g %c %.12gi", re, std::signbit(im) ? '-' : '+', std::abs(im));
    return buf;
}

bool is_complex(const Json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

void print_value(std::ostream& out, const Json& v, const std::string& pad) {
    if (v.is_null()) {
        out << "-";
    } else if (is_complex(v)) {
        out << fmt_complex(v);
    } else if (v.is_array() && (v.empty() || !v[0].is_array())) {
        out << v.dump();
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << '\n' << pad << "  [" << i << "] ";
            print_value(out, v[i], pad + "  ");
        }
    } else if (v.is_number_float()) {
        out << fmt(v.get<double>());
    } else {
        out << v.dump();
    }
}

void print_table(std::ostream& out, const Json& j, const std::string& pad = "") {
    for (const auto& [key, v] : j.items()) {
        if (v.is_object() && v.contains("status")) {
            out << pad << key << " [" << v["status"].get<std::string>() << "]: ";
            print_value(out, v["value"], pad);
            out << '\n';
        } else if (v.is_object()) {
            out << pad << key << '\n';
            print_table(out, v, pad + "  ");
        } else {
            out << pad << key << ": ";
            print_value(out, v, pad);
            out << '\n';
        }
    }
}

}  // namespace

Complex parse_complex_arg(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw SpecError(str("expected RE,IM, got \"", text, "\""));
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string re = text.substr(0, comma), im = text.substr(comma + 1);
        const double a = std::stod(re, &p1), b = std::stod(im, &p2);
        if (p1 != re.size() || p2 != im.size()) throw std::invalid_argument("trailing characters");
        return {a, b};
    } catch (const std::exception&) {
        throw SpecError(str("expected RE,IM, got \"", text, "\""));
    }
}

int cmd_analyze(const std::string& file, bool json, bool strict, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Json report = analyze(load_spec(file));
        if (json)
            out << report.dump(2) << '\n';
        else
            print_table(out, report);
        if (report["caustic"]["warning"].get<bool>()) {
            err << "warning: instance lies within the caustic guard\n";
            if (strict) return int(kCaustic);
        }
        return int(kOk);
    });
}

int cmd_check(const std::string& file, const CheckOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::vector<CheckLine> lines = check(load_spec(file), options);
        bool ok = true;
        for (const CheckLine& l : lines) {
            ok = ok && l.passed;
            out << (l.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(52) << l.identity << " error "
                << std::setw(10) << fmt(l.error, 3) << " tol " << fmt(l.tol, 3);
            if (!l.note.empty()) out << "  (" << l.note << ")";
            out << '\n';
        }
        return int(ok ? kOk : kFailed);
    });
}

int cmd_sweep(const std::string& file, const SweepOptions& options, bool json, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SweepResult r = sweep(load_spec(file), options);
        if (json) {
            Json rows = Json::array();
            for (const SweepStep& s : r.steps)
                rows.push_back(Json{{"step", s.step},
                                    {"value", complex_json(s.value)},
                                    {"tau_ratio", complex_json(s.tau_ratio)},
                                    {"fg_ratio", s.fg_ratio ? complex_json(*s.fg_ratio) : Json(nullptr)}});
            Json doc{{"param", options.param},
                     {"steps", rows},
                     {"tau_drift", r.tau_drift},
                     {"fg_drift", r.fg_drift},
                     {"left_space", r.left_space},
                     {"offending_step", r.left_space ? Json(r.offending_step) : Json(nullptr)},
                     {"reason", r.reason}};
            out << doc.dump(2) << '\n';
        } else {
            out << "step  " << options.param << "  |  tau ratio (route A / route B)  |  R(f,g) ratio\n";
            for (const SweepStep& s : r.steps) {
                out << std::setw(4) << s.step << "  " << fmt_complex(complex_json(s.value)) << "  |  "
                    << fmt_complex(complex_json(s.tau_ratio)) << "  |  "
                    << (s.fg_ratio ? fmt_complex(complex_json(*s.fg_ratio)) : std::string("-")) << '\n';
            }
            out << "max drift: tau " << fmt(r.tau_drift) << ", R(f,g) " << fmt(r.fg_drift) << '\n';
        }
        if (r.left_space) {
            err << "error: step " << r.offending_step << " leaves the space: " << r.reason << '\n';
            return int(kSweepLeftSpace);
        }
        return int(kOk);
    });
}

int cmd_example(const std::string& name, const std::optional<std::string>& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::string text = to_json(example(name)).dump(2) + "\n";
        if (!path) {
            out << text;
            return int(kOk);
        }
        std::ofstream file(*path);
        if (!file) throw SpecError(str(*path, ": cannot write"));
        file << text;
        return int(kOk);
    });
}

}  // namespace hurwitz::cli

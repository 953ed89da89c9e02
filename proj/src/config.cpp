#include "chiral/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>

#include "chiral/analysis.hpp"
#include "chiral/errors.hpp"
#include "chiral/expression.hpp"

namespace chiral {

namespace {

constexpr double kPi = std::numbers::pi;

struct Entry {
    std::string value;
    std::size_t line = 0;
    std::size_t key_column = 0;
    std::size_t value_column = 0;
};

using Section = std::map<std::string, Entry, std::less<>>;

const std::map<std::string, std::set<std::string, std::less<>>, std::less<>>& known_keys() {
    static const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> keys{
        {"system",
         {"omega_0", "Omega", "omega_x0", "omega_y0", "gamma", "rate_imbalance",
          "weak_coupling_limit"}},
        {"loop",
         {"gamma_0", "a_gamma", "a_theta", "omega_c", "theta_center", "gamma_phase", "n_periods"}},
        {"integrator", {"method", "dt", "record_stride", "full_dt"}},
        {"run", {"initial_label", "direction", "outputs", "tie_ratio"}},
    };
    return keys;
}

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    std::size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    if (lead) *lead = b;
    return s.substr(b, e - b);
}

std::map<std::string, Section, std::less<>> tokenize(std::string_view text) {
    std::map<std::string, Section, std::less<>> sections;
    Section* current = nullptr;
    std::string current_name;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::size_t lead = 0;
        const std::string_view line = trim(raw, &lead);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("expected ']'", line_no, lead + line.size() + 1);
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!known_keys().contains(name)) {
                throw ParseError("unknown section [" + std::string(name) + "]", line_no, lead + 1);
            }
            if (sections.contains(name)) {
                throw ParseError("duplicate section [" + std::string(name) + "]", line_no, lead + 1);
            }
            current_name = std::string(name);
            current = &sections[current_name];
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, lead + 1);
        const std::string_view key = trim(line.substr(0, eq));
        std::size_t value_lead = 0;
        const std::string_view value = trim(line.substr(eq + 1), &value_lead);
        if (!current) throw ParseError("key outside of a section", line_no, lead + 1);
        if (key.empty()) throw ParseError("missing key", line_no, lead + 1);
        if (value.empty()) throw ParseError("missing value for '" + std::string(key) + "'", line_no, lead + eq + 2);

        if (!known_keys().at(current_name).contains(key)) {
            throw ParseError("unknown key '" + std::string(key) + "' in [" + current_name + "]", line_no,
                             lead + 1);
        }
        if (current->contains(key)) {
            throw ParseError("duplicate key '" + std::string(key) + "'", line_no, lead + 1);
        }
        (*current)[std::string(key)] =
            Entry{std::string(value), line_no, lead + 1, lead + eq + 1 + value_lead + 1};
    }
    return sections;
}

class Reader {
public:
    explicit Reader(const Section* section) : section_(section) {}

    const Entry* find(std::string_view key) const {
        if (!section_) return nullptr;
        const auto it = section_->find(key);
        return it == section_->end() ? nullptr : &it->second;
    }

    bool has(std::string_view key) const { return find(key) != nullptr; }

    double number(std::string_view key, double fallback, const SymbolTable& symbols) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        try {
            return evaluate_expression(e->value, symbols);
        } catch (const ExpressionError& err) {
            throw ParseError(std::string(key) + ": " + err.what(), e->line,
                             e->value_column + err.offset);
        }
    }

    // "auto" selects the fallback.
    double number_or_auto(std::string_view key, double fallback, const SymbolTable& symbols) const {
        const Entry* e = find(key);
        if (e && e->value == "auto") return fallback;
        return number(key, fallback, symbols);
    }

    long long integer(std::string_view key, long long fallback, const SymbolTable& symbols) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        const double v = number(key, 0.0, symbols);
        if (v != std::floor(v) || std::abs(v) > 1e15) {
            throw ValidationError(std::string(key) + " must be an integer");
        }
        return static_cast<long long>(v);
    }

    std::optional<std::string> word(std::string_view key) const {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        return e->value;
    }

    [[noreturn]] void reject(std::string_view key, const std::string& what) const {
        const Entry* e = find(key);
        throw ParseError(what, e ? e->line : 0, e ? e->value_column : 0);
    }

private:
    const Section* section_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SymbolTable symbols_for(const SystemParams& system, const LoopSpec* loop) {
    SymbolTable s{{"pi", kPi}, {"Omega", system.detuning()}, {"omega_0", system.omega_0()}};
    if (loop && loop->omega_c != 0.0) s.emplace("T", loop->period());
    return s;
}

}  // namespace

bool RunSection::wants(std::string_view output) const {
    return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

void RunConfig::validate() const {
    system.validate();
    loop.validate();
    if (!(integrator.dt > 0.0) || !std::isfinite(integrator.dt)) {
        throw ValidationError("integrator dt > 0 violated");
    }
    if (integrator.record_stride < 1) throw ValidationError("record_stride >= 1 violated");
    if (!(full_dt > 0.0) || !std::isfinite(full_dt)) throw ValidationError("full_dt > 0 violated");
    if (!(run.tie_ratio > 1.0) || !std::isfinite(run.tie_ratio)) {
        throw ValidationError("tie_ratio > 1 violated");
    }
    std::set<std::string> seen;
    for (const auto& o : run.outputs) {
        if (o != "trajectory" && o != "report") {
            throw ValidationError("unknown output '" + o + "' (expected trajectory or report)");
        }
        if (!seen.insert(o).second) throw ValidationError("output '" + o + "' listed twice");
    }
}

RunConfig parse_config(std::string_view text) {
    const auto sections = tokenize(text);
    auto section = [&](std::string_view name) -> Reader {
        const auto it = sections.find(name);
        return Reader(it == sections.end() ? nullptr : &it->second);
    };

    RunConfig cfg;

    const Reader sys = section("system");
    const SymbolTable angle_symbols{{"pi", kPi}};
    const bool split = sys.has("omega_x0") || sys.has("omega_y0");
    const bool carrier = sys.has("omega_0") || sys.has("Omega");
    if (split && carrier) {
        throw ValidationError("[system] takes either omega_0/Omega or omega_x0/omega_y0, not both");
    }
    if (split) {
        if (!sys.has("omega_x0") || !sys.has("omega_y0")) {
            throw ValidationError("[system] needs both omega_x0 and omega_y0");
        }
        cfg.system.omega_x0 = sys.number("omega_x0", 0.0, angle_symbols);
        cfg.system.omega_y0 = sys.number("omega_y0", 0.0, angle_symbols);
    } else {
        const double omega_0 = sys.number("omega_0", 2.0 * kPi * 10.0, angle_symbols);
        const double detuning = sys.number("Omega", 2.0 * kPi * 0.1, angle_symbols);
        cfg.system = SystemParams::from_carrier(omega_0, detuning);
    }
    cfg.system.gamma = sys.number("gamma", 0.0, angle_symbols);
    cfg.system.rate_imbalance = sys.number("rate_imbalance", 0.0, angle_symbols);
    cfg.system.weak_coupling_limit = sys.number("weak_coupling_limit", 0.1, angle_symbols);
    cfg.system.validate();

    const Reader loop = section("loop");
    const SymbolTable rate_symbols = symbols_for(cfg.system, nullptr);
    const double omega = cfg.system.detuning();
    cfg.loop.gamma_0 = loop.number("gamma_0", omega, rate_symbols);
    cfg.loop.a_gamma = loop.number("a_gamma", omega / 30.0, rate_symbols);
    cfg.loop.a_theta = loop.number("a_theta", kPi / 30.0, rate_symbols);
    cfg.loop.omega_c = loop.number("omega_c", omega / 8.0, rate_symbols);
    cfg.loop.theta_center = loop.number("theta_center", kPi / 4.0, rate_symbols);
    cfg.loop.gamma_phase = loop.number("gamma_phase", kPi, rate_symbols);
    const long long periods = loop.integer("n_periods", 1, rate_symbols);
    if (periods < 1 || periods > 1000000) throw ValidationError("n_periods >= 1 violated");
    cfg.loop.n_periods = static_cast<int>(periods);

    const Reader run = section("run");
    if (const auto d = run.word("direction")) {
        if (*d == "cw") {
            cfg.loop = cfg.loop.with_direction(Direction::cw);
        } else if (*d == "ccw") {
            cfg.loop = cfg.loop.with_direction(Direction::ccw);
        } else {
            run.reject("direction", "direction must be cw or ccw");
        }
    }
    cfg.loop.validate();

    const Reader integ = section("integrator");
    const SymbolTable step_symbols = symbols_for(cfg.system, &cfg.loop);
    if (const auto m = integ.word("method"); m && *m != "rk4") {
        integ.reject("method", "method must be rk4");
    }
    cfg.integrator.dt = integ.number_or_auto(
        "dt", cfg.loop.period() / static_cast<double>(kDefaultStepsPerPeriod), step_symbols);
    const long long stride = integ.integer("record_stride", 1, step_symbols);
    if (stride < 1) throw ValidationError("record_stride >= 1 violated");
    cfg.integrator.record_stride = static_cast<std::size_t>(stride);
    cfg.full_dt = integ.number_or_auto("full_dt", FullOptions::for_carrier(cfg.system.omega_0()).dt,
                                       step_symbols);

    if (const auto l = run.word("initial_label")) {
        if (*l == "plus") {
            cfg.run.initial_label = Label::plus;
        } else if (*l == "minus") {
            cfg.run.initial_label = Label::minus;
        } else {
            run.reject("initial_label", "initial_label must be plus or minus");
        }
    }
    if (const auto o = run.word("outputs")) {
        cfg.run.outputs.clear();
        std::string_view rest = *o;
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            const std::string_view item = trim(rest.substr(0, comma));
            if (!item.empty()) cfg.run.outputs.emplace_back(item);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    cfg.run.tie_ratio = run.number("tie_ratio", kDefaultTieRatio, angle_symbols);

    cfg.validate();
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    auto line = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    out += "[system]\n";
    line("omega_x0", fmt(cfg.system.omega_x0));
    line("omega_y0", fmt(cfg.system.omega_y0));
    line("gamma", fmt(cfg.system.gamma));
    line("rate_imbalance", fmt(cfg.system.rate_imbalance));
    line("weak_coupling_limit", fmt(cfg.system.weak_coupling_limit));
    out += "\n[loop]\n";
    line("gamma_0", fmt(cfg.loop.gamma_0));
    line("a_gamma", fmt(cfg.loop.a_gamma));
    line("a_theta", fmt(cfg.loop.a_theta));
    line("omega_c", fmt(cfg.loop.omega_c));
    line("theta_center", fmt(cfg.loop.theta_center));
    line("gamma_phase", fmt(cfg.loop.gamma_phase));
    line("n_periods", std::to_string(cfg.loop.n_periods));
    out += "\n[integrator]\n";
    line("method", "rk4");
    line("dt", fmt(cfg.integrator.dt));
    line("record_stride", std::to_string(cfg.integrator.record_stride));
    line("full_dt", fmt(cfg.full_dt));
    out += "\n[run]\n";
    line("initial_label", to_string(cfg.run.initial_label));
    line("direction", to_string(cfg.direction()));
    std::string outputs;
    for (const auto& o : cfg.run.outputs) outputs += (outputs.empty() ? "" : ", ") + o;
    // An empty list would not parse back, so it is spelled as a lone comma.
    line("outputs", outputs.empty() ? "," : outputs);
    line("tie_ratio", fmt(cfg.run.tie_ratio));
    return out;
}

double evaluate_setting(const RunConfig& cfg, std::string_view text) {
    try {
        return evaluate_expression(text, symbols_for(cfg.system, &cfg.loop));
    } catch (const ExpressionError& err) {
        throw ParseError(std::string("'") + std::string(text) + "': " + err.what(), 1, err.offset + 1);
    }
}

}  // namespace chiral
